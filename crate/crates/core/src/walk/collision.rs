//! Exact probability of landing in `B_coll` after one row step and one column step.

use serde::{Deserialize, Serialize};

use super::{OperatorKind, StateSpace, WalkVector};
use crate::color::RegionLabel;
use crate::error::{Error, Result};
use crate::lattice::LatticeShape;

/// Pairwise union bound `2·s·k² / 2^{(n/s)/16}` on a slice pair colliding after
/// the row-then-column step. Vacuous at desk scale; reported for reference.
pub fn pair_collision_bound(shape: &LatticeShape) -> f64 {
    let k = shape.k() as f64;
    2.0 * shape.side() as f64 * k * k / 2f64.powf(shape.slice_len() as f64 / 16.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub shape: LatticeShape,
    pub state: u64,
    pub probability: f64,
    pub bound: f64,
}

/// `Pr[X → B_coll]` under rows then columns, by pushing `e_X` forward.
pub fn collision_probability_exact(space: &StateSpace, x: u64) -> Result<CollisionReport> {
    space.check_state(x)?;
    if space.label(x) == RegionLabel::Ident {
        return Err(Error::domain(format!("state {x} has two equal members")));
    }
    let p = space.push_forward(x, &[OperatorKind::rows(), OperatorKind::columns()])?;
    let labels = space.labels();
    let probability = p
        .values()
        .iter()
        .zip(labels.iter())
        .filter(|(_, l)| **l == RegionLabel::Coll)
        .map(|(v, _)| *v)
        .sum();
    Ok(CollisionReport {
        shape: *space.shape(),
        state: x,
        probability,
        bound: pair_collision_bound(space.shape()),
    })
}

/// Collision probabilities of every distinct start at once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionProfile {
    pub shape: LatticeShape,
    /// Largest probability over `D`, and a start attaining it.
    pub worst: f64,
    pub worst_state: u64,
    /// Average over starts in `B_safe`.
    pub mean_safe: f64,
    /// Average over all of `D`.
    pub mean_distinct: f64,
    pub bound: f64,
}

/// Computes `h = T_rows T_cols 1_{B_coll}`, whose entry at `X` is the
/// collision probability from `X`; one vector pass instead of one push per start.
pub fn collision_profile(space: &StateSpace) -> Result<(CollisionProfile, WalkVector)> {
    let coll = space.region_indicator(RegionLabel::Coll);
    let h = space.apply(
        &OperatorKind::Composition(vec![OperatorKind::rows(), OperatorKind::columns()]),
        &coll,
    )?;
    let labels = space.labels();
    let (mut worst, mut worst_state) = (f64::NEG_INFINITY, 0u64);
    let (mut safe_sum, mut safe_n, mut d_sum, mut d_n) = (0.0, 0usize, 0.0, 0usize);
    for (s, (&v, l)) in h.values().iter().zip(labels.iter()).enumerate() {
        if *l == RegionLabel::Ident {
            continue;
        }
        if v > worst {
            worst = v;
            worst_state = s as u64;
        }
        d_sum += v;
        d_n += 1;
        if *l == RegionLabel::Safe {
            safe_sum += v;
            safe_n += 1;
        }
    }
    if d_n == 0 {
        return Err(Error::domain("shape has no distinct tuples"));
    }
    let profile = CollisionProfile {
        shape: *space.shape(),
        worst,
        worst_state,
        mean_safe: if safe_n > 0 { safe_sum / safe_n as f64 } else { 0.0 },
        mean_distinct: d_sum / d_n as f64,
        bound: pair_collision_bound(space.shape()),
    };
    Ok((profile, h))
}
