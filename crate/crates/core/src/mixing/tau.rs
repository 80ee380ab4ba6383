//! Tuples with repeated members mix exactly like the tuple of their distinct members.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{exact_tv_trajectory, Labeler};
use crate::color::{FiberFamily, Fibers};
use crate::error::{Error, Result};
use crate::lattice::LatticeShape;
use crate::walk::{OperatorKind, StateSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KToTauReport {
    pub shape: LatticeShape,
    pub start: u64,
    /// Number of distinct members of the start.
    pub tau: u32,
    /// The start with repeats removed, as a state of the τ-tuple space.
    pub projected: u64,
    /// `(t, TV of the k-tuple walk to uniform on its coloring class, TV of the τ-tuple walk to uniform on D)`.
    pub points: Vec<(usize, f64, f64)>,
    pub max_abs_diff: f64,
    /// Projection is injective on the start's coloring class and lifting inverts it.
    pub projection_injective: bool,
    pub pass: bool,
}

const TAU_TOLERANCE: f64 = 1e-12;

/// Compares the idealized walk from a tuple with repeated members against the
/// walk from its projection onto first-occurrence members.
pub fn k_to_tau_check(space: &StateSpace, x: u64, t_max: usize) -> Result<KToTauReport> {
    space.check_state(x)?;
    let shape = *space.shape();
    let k = shape.k() as usize;
    let whole = FiberFamily::new(&shape, Fibers::Whole)?;
    let mut labels = vec![0u8; k];
    whole.fiber_labels(x, 0, &mut labels);
    let tau = labels.iter().copied().max().unwrap_or(0) as usize + 1;
    if tau == k {
        return Err(Error::domain(format!("state {x} has no repeated members")));
    }
    let reps: Vec<usize> = (0..tau)
        .map(|b| {
            labels
                .iter()
                .position(|&l| l as usize == b)
                .expect("every block has a member")
        })
        .collect();

    let sub_shape = shape.with_k(tau as u32)?;
    let sub_labeler = Labeler::new(&sub_shape)?;
    let project = |y: u64| {
        reps.iter().enumerate().fold(0u64, |s, (j, &ell)| {
            sub_labeler.with_member(s, j, whole.value(y, 0, ell))
        })
    };
    let lift = |z: u64| {
        (0..k).fold(0u64, |s, ell| {
            whole.write(s, 0, ell, sub_labeler.member(z, labels[ell] as usize))
        })
    };
    let projected = project(x);

    let global = space.class_index(&OperatorKind::GlobalWalk)?;
    let cls = global.class_of(x);
    let mut seen = HashSet::new();
    let mut projection_injective = true;
    for y in (0..space.states() as u64).filter(|&y| global.class_of(y) == cls) {
        let z = project(y);
        projection_injective &= seen.insert(z) && lift(z) == y;
    }

    let target = space.apply(&OperatorKind::GlobalWalk, &space.basis(x)?)?;
    let mut p = space.push_forward(x, &[OperatorKind::rows()])?;
    let round = [OperatorKind::columns(), OperatorKind::rows()];
    let sub_space = StateSpace::new(sub_shape)?;
    let sub = exact_tv_trajectory(&sub_space, projected, t_max)?;
    let mut points = Vec::with_capacity(t_max + 1);
    let mut max_abs_diff = 0.0f64;
    for t in 0..=t_max {
        if t > 0 {
            p = space.push_distribution(&p, &round)?;
        }
        let tv_k = 0.5 * p.sub(&target).norm1();
        let tv_tau = sub.points[t].tv;
        max_abs_diff = max_abs_diff.max((tv_k - tv_tau).abs());
        points.push((t, tv_k, tv_tau));
    }
    Ok(KToTauReport {
        shape,
        start: x,
        tau: tau as u32,
        projected,
        points,
        max_abs_diff,
        projection_injective,
        pass: projection_injective && max_abs_diff <= TAU_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BitLatticeTuple;

    #[test]
    fn equal_pair_reduces_to_single_grid() {
        let sp = StateSpace::new(LatticeShape::grid(2, 2).unwrap()).unwrap();
        let m = BitLatticeTuple::from_state(LatticeShape::grid(2, 1).unwrap(), 0b1011).unwrap();
        let x = BitLatticeTuple::from_members(&[m.clone(), m]).unwrap().state().unwrap();
        let r = k_to_tau_check(&sp, x, 3).unwrap();
        assert_eq!(r.tau, 1);
        assert_eq!(r.projected, 0b1011);
        assert!(r.pass, "{r:?}");
        assert!(r.points.iter().all(|&(_, a, b)| a.abs() < 1e-12 && b.abs() < 1e-12));
    }

    #[test]
    fn distinct_start_rejected() {
        let sp = StateSpace::new(LatticeShape::grid(2, 2).unwrap()).unwrap();
        assert!(matches!(k_to_tau_check(&sp, 0b0001_0010, 1), Err(Error::Domain(_))));
    }
}
