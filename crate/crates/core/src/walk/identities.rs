//! Structural identities of the idealized walk operators, checked numerically.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{OperatorKind, StateSpace, WalkVector};
use crate::color::RegionLabel;
use crate::error::{Error, Result};
use crate::lattice::LatticeShape;
use crate::rng::RngSeed;

/// Max-abs residual allowed on identities that hold exactly over the rationals.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

// Dense basis sweeps up to 2^10 states; larger spaces use seeded random probes.
const SWEEP_BITS: usize = 10;
const RANDOM_PROBES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub identity: String,
    pub shape: LatticeShape,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Basis state attaining the residual, when the check sweeps a basis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<u64>,
}

impl IdentityRecord {
    fn new(identity: String, shape: LatticeShape, residual: f64, witness: Option<u64>) -> Self {
        IdentityRecord {
            identity,
            shape,
            residual,
            tolerance: IDENTITY_TOLERANCE,
            pass: residual <= IDENTITY_TOLERANCE,
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub records: Vec<IdentityRecord>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.records.iter().fold(0.0, |m, r| m.max(r.residual))
    }

    fn first_failure(&self) -> Option<&IdentityRecord> {
        self.records.iter().find(|r| !r.pass)
    }
}

/// Tracks the largest residual and where it occurred.
#[derive(Default)]
struct Worst {
    residual: f64,
    witness: Option<u64>,
}

impl Worst {
    fn see(&mut self, residual: f64, witness: u64) {
        if self.witness.is_none() || residual > self.residual {
            self.residual = residual;
            self.witness = Some(witness);
        }
    }
}

fn walks(space: &StateSpace) -> Vec<OperatorKind> {
    let dims = space.shape().dims() as usize;
    let mut kinds: Vec<OperatorKind> = (0..dims).map(OperatorKind::AxisWalk).collect();
    if dims > 2 {
        kinds.push(OperatorKind::LineWalk(0));
    }
    kinds.push(OperatorKind::GlobalWalk);
    kinds
}

/// Checks self-adjointness, idempotence, absorption by the global walk, and
/// `‖T_rows e_U‖₂ = |B(U)|^{-1/2}`. The report lists every check; the first
/// failure is returned as [`Error::Violation`].
pub fn check_operator_identities(space: &StateSpace) -> Result<IdentityReport> {
    let report = if space.shape().bits() <= SWEEP_BITS {
        basis_sweep(space)?
    } else {
        random_probes(space, RngSeed::new(0x1de7))?
    };
    match report.first_failure() {
        Some(r) => Err(Error::Violation {
            identity: r.identity.clone(),
            witness: r.witness,
            residual: r.residual,
            tolerance: r.tolerance,
        }),
        None => Ok(report),
    }
}

fn basis_sweep(space: &StateSpace) -> Result<IdentityReport> {
    let shape = *space.shape();
    let n = space.states();
    let mut records = Vec::new();
    let global = OperatorKind::GlobalWalk;
    let global_cols: Vec<WalkVector> = (0..n as u64)
        .map(|j| space.apply(&global, &space.basis(j)?))
        .collect::<Result<_>>()?;

    for kind in walks(space) {
        let cols: Vec<WalkVector> = (0..n as u64)
            .map(|j| space.apply(&kind, &space.basis(j)?))
            .collect::<Result<_>>()?;

        let mut sym = Worst::default();
        for j in 0..n {
            for i in 0..j {
                let r = (cols[j].values()[i] - cols[i].values()[j]).abs();
                sym.see(r, j as u64);
            }
        }
        records.push(IdentityRecord::new(
            format!("self_adjoint[{}]", kind.label()),
            shape,
            sym.residual,
            sym.witness,
        ));

        let mut idem = Worst::default();
        let mut absorb = Worst::default();
        for j in 0..n {
            let twice = space.apply(&kind, &cols[j])?;
            idem.see(twice.max_abs_diff(&cols[j]), j as u64);
            let after_global = space.apply(&kind, &global_cols[j])?;
            absorb.see(after_global.max_abs_diff(&global_cols[j]), j as u64);
            let before_global = space.apply(&global, &cols[j])?;
            absorb.see(before_global.max_abs_diff(&global_cols[j]), j as u64);
        }
        records.push(IdentityRecord::new(
            format!("idempotent[{}]", kind.label()),
            shape,
            idem.residual,
            idem.witness,
        ));
        if kind != global {
            records.push(IdentityRecord::new(
                format!("absorbs_global[{}]", kind.label()),
                shape,
                absorb.residual,
                absorb.witness,
            ));
        }

        if kind == OperatorKind::rows() {
            let ix = space.class_index(&kind)?;
            let mut norms = Worst::default();
            for (u, col) in cols.iter().enumerate() {
                let expect = 1.0 / (ix.size_of(u as u64) as f64).sqrt();
                norms.see((col.norm2() - expect).abs(), u as u64);
            }
            records.push(IdentityRecord::new(
                "row_basis_norm".into(),
                shape,
                norms.residual,
                norms.witness,
            ));
        }
    }
    Ok(IdentityReport { records })
}

fn random_vector(space: &StateSpace, rng: &mut impl Rng) -> WalkVector {
    let mut v = space.zeros();
    v.values_mut().iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
    v
}

fn random_probes(space: &StateSpace, seed: RngSeed) -> Result<IdentityReport> {
    let shape = *space.shape();
    let mut rng = seed.rng();
    let global = OperatorKind::GlobalWalk;
    let mut records = Vec::new();
    for kind in walks(space) {
        let (mut sym, mut idem, mut absorb) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..RANDOM_PROBES {
            let f = random_vector(space, &mut rng);
            let g = random_vector(space, &mut rng);
            let tf = space.apply(&kind, &f)?;
            let tg = space.apply(&kind, &g)?;
            // normalize by vector scale so the tolerance stays meaningful
            let scale = (f.norm2() * g.norm2()).max(1.0);
            sym = sym.max((f.dot(&tg) - tf.dot(&g)).abs() / scale);
            idem = idem.max(space.apply(&kind, &tf)?.max_abs_diff(&tf));
            let gf = space.apply(&global, &f)?;
            absorb = absorb.max(space.apply(&kind, &gf)?.max_abs_diff(&gf));
            absorb = absorb.max(space.apply(&global, &tf)?.max_abs_diff(&gf));
        }
        records.push(IdentityRecord::new(
            format!("self_adjoint[{}]", kind.label()),
            shape,
            sym,
            None,
        ));
        records.push(IdentityRecord::new(
            format!("idempotent[{}]", kind.label()),
            shape,
            idem,
            None,
        ));
        if kind != global {
            records.push(IdentityRecord::new(
                format!("absorbs_global[{}]", kind.label()),
                shape,
                absorb,
                None,
            ));
        }
    }
    let rows = OperatorKind::rows();
    let ix = space.class_index(&rows)?;
    let mut norms = Worst::default();
    for _ in 0..64 {
        let u = rng.gen_range(0..space.states() as u64);
        let col = space.apply(&rows, &space.basis(u)?)?;
        let expect = 1.0 / (ix.size_of(u) as f64).sqrt();
        norms.see((col.norm2() - expect).abs(), u);
    }
    records.push(IdentityRecord::new(
        "row_basis_norm".into(),
        shape,
        norms.residual,
        norms.witness,
    ));
    Ok(IdentityReport { records })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportTransitionReport {
    pub operator: String,
    /// `⟨f, T g⟩`.
    pub lhs: f64,
    /// `max_{X∈supp f} √Pr[X → supp g] · ‖f‖₂‖g‖₂`.
    pub rhs: f64,
    /// The square-root transition factor alone.
    pub factor: f64,
    pub holds: bool,
}

/// The support-transition inequality `⟨f, T g⟩ ≤ max_{X∈supp f} √Pr[X → supp g]·‖f‖₂‖g‖₂`.
pub fn support_transition_check(
    space: &StateSpace,
    f: &WalkVector,
    g: &WalkVector,
    kind: &OperatorKind,
) -> Result<SupportTransitionReport> {
    let tg = space.apply(kind, g)?;
    let lhs = f.dot(&tg);
    let reach = space.apply(kind, &g.support_indicator())?;
    let factor = f
        .values()
        .iter()
        .zip(reach.values())
        .filter(|(fx, _)| **fx != 0.0)
        .fold(0.0f64, |m, (_, &p)| m.max(p.max(0.0).sqrt()));
    let rhs = factor * f.norm2() * g.norm2();
    let slack = IDENTITY_TOLERANCE * (1.0 + rhs.abs());
    let report = SupportTransitionReport {
        operator: kind.label(),
        lhs,
        rhs,
        factor,
        holds: lhs <= rhs + slack,
    };
    if !report.holds {
        return Err(Error::Violation {
            identity: format!("support_transition_bound[{}]", kind.label()),
            witness: None,
            residual: lhs - rhs,
            tolerance: slack,
        });
    }
    Ok(report)
}

/// Runs [`support_transition_check`] over all pairs of region indicators and `trials`
/// seeded random ±1 vectors on the distinct tuples.
pub fn support_transition_sweep(
    space: &StateSpace,
    kind: &OperatorKind,
    trials: usize,
    seed: RngSeed,
) -> Result<Vec<SupportTransitionReport>> {
    let regions = [RegionLabel::Safe, RegionLabel::Coll, RegionLabel::Ident];
    let mut out = Vec::new();
    for a in regions {
        for b in regions {
            let f = space.region_indicator(a);
            let g = space.region_indicator(b);
            if f.norm1() == 0.0 || g.norm1() == 0.0 {
                continue;
            }
            out.push(support_transition_check(space, &f, &g, kind)?);
        }
    }
    let labels = space.labels();
    let mut rng = seed.rng();
    for _ in 0..trials {
        let mut f = space.zeros();
        for (v, l) in f.values_mut().iter_mut().zip(labels.iter()) {
            if *l != RegionLabel::Ident {
                *v = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            }
        }
        out.push(support_transition_check(space, &f, &f, kind)?);
    }
    Ok(out)
}

/// Largest `|⟨f, (T_rows T_cols T_rows − T_global) f⟩|` over the indicator of
/// `B_I` and `trials` seeded random vectors supported on `B_I`. On these
/// tuples the walk acts as on fewer members, so the form vanishes for `k = 2`.
pub fn ident_quadratic_form(space: &StateSpace, trials: usize, seed: RngSeed) -> Result<f64> {
    let labels = space.labels();
    let seq = OperatorKind::Composition(OperatorKind::mixing_sequence(1));
    let form = |f: &WalkVector| -> Result<f64> {
        let a = space.apply(&seq, f)?.sub(&space.apply(&OperatorKind::GlobalWalk, f)?);
        Ok(f.dot(&a).abs())
    };
    let mut worst = form(&space.region_indicator(RegionLabel::Ident))?;
    let mut rng = seed.rng();
    for _ in 0..trials {
        let mut f = space.zeros();
        for (v, l) in f.values_mut().iter_mut().zip(labels.iter()) {
            if *l == RegionLabel::Ident {
                *v = rng.gen_range(-1.0..1.0);
            }
        }
        worst = worst.max(form(&f)?);
    }
    Ok(worst)
}
