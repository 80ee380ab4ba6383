//! Samplers of end states for Monte Carlo: idealized walks drawn class by
//! class, the uniform distribution on distinct tuples, and real circuits.

use rand::Rng;

use crate::circuit::{LatticeCircuitParams, LatticeCircuitSampler};
use crate::color::{fast_label, FiberFamily, Fibers, RegionLabel};
use crate::error::{Error, Result};
use crate::lattice::LatticeShape;
use crate::rng::RngSeed;
use crate::walk::{fibers_for, OperatorKind};

/// Draws the state reached from `x` by one random trajectory.
pub trait StateSampler: Sync {
    fn shape(&self) -> &LatticeShape;
    fn sample(&self, x: u64, seed: RngSeed) -> u64;
    fn describe(&self) -> String;
}

/// Region labels of packed states without enumerating the space.
#[derive(Debug, Clone)]
pub struct Labeler {
    rows: FiberFamily,
    whole: FiberFamily,
}

impl Labeler {
    pub fn new(shape: &LatticeShape) -> Result<Self> {
        Ok(Labeler {
            rows: FiberFamily::new(shape, Fibers::Hyperplanes { axis: 0 })?,
            whole: FiberFamily::new(shape, Fibers::Whole)?,
        })
    }

    pub fn label(&self, state: u64) -> RegionLabel {
        fast_label(&self.rows, &self.whole, state)
    }

    /// Member `ell` as a word with site `i` in bit `i`.
    pub fn member(&self, state: u64, ell: usize) -> u64 {
        self.whole.value(state, 0, ell)
    }

    pub fn with_member(&self, state: u64, ell: usize, value: u64) -> u64 {
        self.whole.write(state, 0, ell, value)
    }
}

fn uniform_bits<R: Rng + ?Sized>(rng: &mut R, bits: usize) -> u64 {
    if bits >= 64 {
        rng.gen()
    } else {
        rng.gen_range(0..1u64 << bits)
    }
}

/// Resamples every class of the given walk: on each fiber the members'
/// distinct values are replaced by fresh distinct uniform values, which is one
/// step of independent uniform permutations of the fibers.
fn resample_fibers<R: Rng + ?Sized>(family: &FiberFamily, state: u64, rng: &mut R) -> u64 {
    let k = family.k();
    let mut labels = [0u8; 16];
    let mut fresh = [0u64; 16];
    let mut out = state;
    for f in 0..family.fiber_count() {
        family.fiber_labels(state, f, &mut labels[..k]);
        let blocks = labels[..k].iter().copied().max().unwrap_or(0) as usize + 1;
        for b in 0..blocks {
            fresh[b] = loop {
                let v = uniform_bits(rng, family.fiber_len());
                if !fresh[..b].contains(&v) {
                    break v;
                }
            };
        }
        for ell in 0..k {
            out = family.write(out, f, ell, fresh[labels[ell] as usize]);
        }
    }
    out
}

/// Runs a list of idealized walks, first step first.
#[derive(Debug, Clone)]
pub struct IdealizedSampler {
    shape: LatticeShape,
    steps: Vec<FiberFamily>,
    kinds: Vec<OperatorKind>,
}

impl IdealizedSampler {
    pub fn new(shape: LatticeShape, kinds: &[OperatorKind]) -> Result<Self> {
        let steps = kinds
            .iter()
            .map(|k| FiberFamily::new(&shape, fibers_for(&shape, k)?))
            .collect::<Result<_>>()?;
        Ok(IdealizedSampler {
            shape,
            steps,
            kinds: kinds.to_vec(),
        })
    }

    /// Rows, then `t` rounds of columns and rows.
    pub fn mixing(shape: LatticeShape, t: usize) -> Result<Self> {
        Self::new(shape, &OperatorKind::mixing_sequence(t))
    }

    /// One row step followed by one column step.
    pub fn row_then_column(shape: LatticeShape) -> Result<Self> {
        Self::new(shape, &[OperatorKind::rows(), OperatorKind::columns()])
    }
}

impl StateSampler for IdealizedSampler {
    fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    fn sample(&self, x: u64, seed: RngSeed) -> u64 {
        let mut rng = seed.rng();
        self.steps
            .iter()
            .fold(x, |s, family| resample_fibers(family, s, &mut rng))
    }

    fn describe(&self) -> String {
        let labels: Vec<String> = self.kinds.iter().map(|k| k.label()).collect();
        format!("idealized[{}]", labels.join(","))
    }
}

/// Uniform over distinct tuples, ignoring the start.
#[derive(Debug, Clone)]
pub struct UniformDistinctSampler {
    shape: LatticeShape,
    whole: FiberFamily,
}

impl UniformDistinctSampler {
    pub fn new(shape: LatticeShape) -> Result<Self> {
        if shape.k() as u128 > 1u128 << shape.n().min(127) {
            return Err(Error::domain("no distinct tuples exist for this shape"));
        }
        Ok(UniformDistinctSampler {
            whole: FiberFamily::new(&shape, Fibers::Whole)?,
            shape,
        })
    }
}

impl StateSampler for UniformDistinctSampler {
    fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    fn sample(&self, _x: u64, seed: RngSeed) -> u64 {
        let mut rng = seed.rng();
        loop {
            let s = uniform_bits(&mut rng, self.shape.bits());
            if self.whole.fiber_partition_is_identity(s, 0) {
                return s;
            }
        }
    }

    fn describe(&self) -> String {
        "uniform_distinct".into()
    }
}

/// Samples a fresh lattice circuit per trajectory and applies it to every member.
#[derive(Debug, Clone)]
pub struct CircuitStateSampler {
    shape: LatticeShape,
    labeler: Labeler,
    circuit: LatticeCircuitSampler,
}

impl CircuitStateSampler {
    pub fn new(params: LatticeCircuitParams, k: u32) -> Result<Self> {
        Self::from_sampler(LatticeCircuitSampler::new(params)?, k)
    }

    /// Only the first row layer and the first column layer of a `t ≥ 1` circuit.
    pub fn row_then_column(params: LatticeCircuitParams, k: u32) -> Result<Self> {
        let p = LatticeCircuitParams {
            t: params.t.max(1),
            ..params
        };
        Self::from_sampler(LatticeCircuitSampler::new(p)?.truncated(2), k)
    }

    fn from_sampler(circuit: LatticeCircuitSampler, k: u32) -> Result<Self> {
        let p = circuit.params();
        let shape = LatticeShape::new(p.dims, p.side, k)?;
        Ok(CircuitStateSampler {
            labeler: Labeler::new(&shape)?,
            shape,
            circuit,
        })
    }
}

impl StateSampler for CircuitStateSampler {
    fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    fn sample(&self, x: u64, seed: RngSeed) -> u64 {
        let k = self.shape.k() as usize;
        let mut members = [0u64; 16];
        for (ell, m) in members.iter_mut().enumerate().take(k) {
            *m = self.labeler.member(x, ell);
        }
        self.circuit.sample_apply(seed, &mut members[..k]);
        members[..k]
            .iter()
            .enumerate()
            .fold(0u64, |s, (ell, &m)| self.labeler.with_member(s, ell, m))
    }

    fn describe(&self) -> String {
        let p = self.circuit.params();
        format!(
            "circuit[dims={},side={},t={},base_layers={}]",
            p.dims, p.side, p.t, p.base_layers
        )
    }
}
