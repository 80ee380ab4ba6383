//! Operator 2-norm of `Π seq − T_G` by power iteration, with a dense oracle.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{OperatorKind, StateSpace, WalkVector};
use crate::error::{Error, Result};
use crate::rng::RngSeed;

/// Largest state space (in packed bits) the dense oracle accepts.
pub const DENSE_ORACLE_BITS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
    pub seed: RngSeed,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            rel_tol: 1e-10,
            max_iter: 10_000,
            seed: RngSeed::new(0x5eed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub norm: f64,
    pub iterations: usize,
    pub seed: RngSeed,
}

// Below this the operator is numerically zero and relative convergence is meaningless.
const ZERO_FLOOR: f64 = 1e-13;

fn difference(space: &StateSpace, seq: &[OperatorKind], v: &WalkVector) -> Result<WalkVector> {
    let prod = space.apply(&OperatorKind::Composition(seq.to_vec()), v)?;
    let glob = space.apply(&OperatorKind::GlobalWalk, v)?;
    Ok(prod.sub(&glob))
}

/// `‖Π seq − T_G‖₂`, estimated as the square root of the top eigenvalue of
/// `AᵀA`. Stops when consecutive estimates agree to `rel_tol`.
pub fn spectral_norm_diff(space: &StateSpace, seq: &[OperatorKind], opts: &PowerOptions) -> Result<SpectralEstimate> {
    let adjoint: Vec<OperatorKind> = seq.iter().rev().map(|k| k.adjoint()).collect();
    let mut rng = opts.seed.rng();
    let mut v = space.zeros();
    v.values_mut().iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
    let n0 = v.norm2();
    v.scale(1.0 / n0);

    let mut previous = f64::NAN;
    for it in 1..=opts.max_iter {
        let w = difference(space, seq, &v)?;
        let estimate = w.norm2();
        if estimate < ZERO_FLOOR {
            return Ok(SpectralEstimate {
                norm: estimate,
                iterations: it,
                seed: opts.seed,
            });
        }
        if (estimate - previous).abs() <= opts.rel_tol * estimate {
            return Ok(SpectralEstimate {
                norm: estimate,
                iterations: it,
                seed: opts.seed,
            });
        }
        let mut u = difference(space, &adjoint, &w)?;
        let un = u.norm2();
        if un < ZERO_FLOOR * ZERO_FLOOR {
            return Ok(SpectralEstimate {
                norm: estimate,
                iterations: it,
                seed: opts.seed,
            });
        }
        if it == opts.max_iter {
            return Err(Error::NoConvergence {
                iterations: it,
                previous,
                last: estimate,
            });
        }
        u.scale(1.0 / un);
        v = u;
        previous = estimate;
    }
    Err(Error::NoConvergence {
        iterations: 0,
        previous: f64::NAN,
        last: f64::NAN,
    })
}

/// `‖Π seq − T_G‖₂` from a dense symmetric eigendecomposition; only for
/// state spaces of at most `2^DENSE_ORACLE_BITS` states.
pub fn dense_spectral_norm(space: &StateSpace, seq: &[OperatorKind]) -> Result<f64> {
    if space.shape().bits() > DENSE_ORACLE_BITS as usize {
        return Err(Error::capacity(format!(
            "dense oracle limited to 2^{DENSE_ORACLE_BITS} states"
        )));
    }
    let n = space.states();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let col = difference(space, seq, &space.basis(j as u64)?)?;
        for (i, &v) in col.values().iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    let asym = (&m - m.transpose()).amax();
    let sym = if asym <= 1e-14 {
        (&m + m.transpose()) * 0.5
    } else {
        m.transpose() * &m
    };
    let eig = sym.symmetric_eigenvalues();
    let top = eig.iter().fold(0.0f64, |acc, &l| acc.max(l.abs()));
    Ok(if asym <= 1e-14 { top } else { top.sqrt() })
}
