//! Distance to k-wise independence: exact TV trajectories of the idealized
//! walk, per-target transition bounds, Monte Carlo estimates for sampled
//! circuits, and the reduction from repeated members to fewer members.

mod monte_carlo;
mod sampler;
mod tau;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::RegionLabel;
use crate::error::{Error, Result};
use crate::lattice::LatticeShape;
use crate::rng::RngSeed;
use crate::walk::{OperatorKind, StateSpace};

pub use monte_carlo::{hamming_tail, mc_collision_rate, mc_tv_estimate, CollisionRate, HammingTail, McTvEstimate};
pub use sampler::{CircuitStateSampler, IdealizedSampler, Labeler, StateSampler, UniformDistinctSampler};
pub use tau::{k_to_tau_check, KToTauReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvPoint {
    pub t: usize,
    pub tv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvTrajectory {
    pub shape: LatticeShape,
    pub start: u64,
    /// Operator sequence or circuit description.
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<RngSeed>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    pub points: Vec<TvPoint>,
}

impl TvTrajectory {
    /// True when no value exceeds its predecessor by more than `tol`.
    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        self.points.windows(2).all(|w| w[1].tv <= w[0].tv + tol)
    }

    /// First `t` whose TV is below `eps`.
    pub fn first_below(&self, eps: f64) -> Option<usize> {
        self.points.iter().find(|p| p.tv < eps).map(|p| p.t)
    }

    /// Geometric-mean ratio of consecutive TV values over the positive tail.
    pub fn contraction_factor(&self) -> Option<f64> {
        let pos: Vec<&TvPoint> = self.points.iter().filter(|p| p.tv > 0.0).collect();
        if pos.len() < 3 {
            return None;
        }
        let (a, b) = (pos[1], pos[pos.len() - 1]);
        Some((b.tv / a.tv).powf(1.0 / (b.t - a.t) as f64))
    }
}

fn require_distinct(space: &StateSpace, x: u64) -> Result<()> {
    space.check_state(x)?;
    if space.label(x) == RegionLabel::Ident {
        return Err(Error::domain(format!("state {x} has two equal members")));
    }
    Ok(())
}

/// Exact `d_TV(G^t(x), U(D))` for `t = 0..=t_max`, where `G^t` is rows followed
/// by `t` rounds of columns then rows.
pub fn exact_tv_trajectory(space: &StateSpace, x: u64, t_max: usize) -> Result<TvTrajectory> {
    require_distinct(space, x)?;
    let mut p = space.push_forward(x, &[OperatorKind::rows()])?;
    let round = [OperatorKind::columns(), OperatorKind::rows()];
    let mut points = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            p = space.push_distribution(&p, &round)?;
        }
        points.push(TvPoint {
            t,
            tv: space.tv_to_uniform_distinct(&p),
        });
    }
    Ok(TvTrajectory {
        shape: *space.shape(),
        start: x,
        source: "idealized".into(),
        seed: None,
        samples: None,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerTargetReport {
    pub x: u64,
    pub y: u64,
    pub t: usize,
    /// `|⟨e_X, (T_{G^t} − T_G) e_Y⟩|`.
    pub lhs: f64,
    /// `(t+1) / |B(Y)|` with `B(Y)` the row color class of `Y`.
    pub envelope: f64,
    pub class_size: u64,
    pub pass: bool,
}

/// The per-target transition bound for one `(X, Y, t)`.
pub fn per_target_bound_report(space: &StateSpace, x: u64, y: u64, t: usize) -> Result<PerTargetReport> {
    require_distinct(space, x)?;
    require_distinct(space, y)?;
    let p = space.push_forward(x, &OperatorKind::mixing_sequence(t))?;
    let d = space.distinct_count() as f64;
    let size = space.class_index(&OperatorKind::rows())?.size_of(y);
    Ok(target_report(x, y, t, p.get(y), d, size))
}

fn target_report(x: u64, y: u64, t: usize, prob: f64, distinct: f64, class_size: u64) -> PerTargetReport {
    let lhs = (prob - 1.0 / distinct).abs();
    let envelope = (t + 1) as f64 / class_size as f64;
    PerTargetReport {
        x,
        y,
        t,
        lhs,
        envelope,
        class_size,
        pass: lhs <= envelope * (1.0 + 1e-12),
    }
}

/// Worst case of the per-target bound at one `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerTargetWorst {
    pub t: usize,
    /// Largest LHS over all `X, Y ∈ D`, with a pair attaining it.
    pub max_lhs: f64,
    pub argmax: (u64, u64),
    /// Largest `lhs / envelope`; the bound holds iff this is at most 1.
    pub max_ratio: f64,
    pub violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerTargetSweep {
    pub shape: LatticeShape,
    pub by_t: Vec<PerTargetWorst>,
}

impl PerTargetSweep {
    pub fn all_pass(&self) -> bool {
        self.by_t.iter().all(|w| w.violations == 0)
    }

    /// Worst-case LHS never grows with `t`.
    pub fn worst_nonincreasing(&self, tol: f64) -> bool {
        self.by_t.windows(2).all(|w| w[1].max_lhs <= w[0].max_lhs + tol)
    }
}

/// Checks the per-target bound for every `X, Y ∈ D` and `t ≤ t_max`.
pub fn per_target_sweep(space: &StateSpace, t_max: usize) -> Result<PerTargetSweep> {
    let labels = space.labels();
    let rows = space.class_index(&OperatorKind::rows())?;
    let d = space.distinct_count() as f64;
    let starts: Vec<u64> = (0..space.states() as u64)
        .filter(|&s| labels[s as usize] != RegionLabel::Ident)
        .collect();
    let round = [OperatorKind::columns(), OperatorKind::rows()];
    // rows: t, columns: start; each entry is the worst over targets for that start
    let per_start: Vec<Vec<PerTargetWorst>> = starts
        .par_iter()
        .map(|&x| {
            let mut p = space.push_forward(x, &[OperatorKind::rows()])?;
            let mut out = Vec::with_capacity(t_max + 1);
            for t in 0..=t_max {
                if t > 0 {
                    p = space.push_distribution(&p, &round)?;
                }
                let mut w = PerTargetWorst {
                    t,
                    max_lhs: -1.0,
                    argmax: (x, x),
                    max_ratio: 0.0,
                    violations: 0,
                };
                for &y in &starts {
                    let r = target_report(x, y, t, p.get(y), d, rows.size_of(y));
                    if r.lhs > w.max_lhs {
                        w.max_lhs = r.lhs;
                        w.argmax = (x, y);
                    }
                    w.max_ratio = w.max_ratio.max(r.lhs / r.envelope);
                    w.violations += (!r.pass) as u64;
                }
                out.push(w);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let by_t = (0..=t_max)
        .map(|t| {
            per_start.iter().map(|v| v[t]).fold(
                PerTargetWorst {
                    t,
                    max_lhs: -1.0,
                    argmax: (0, 0),
                    max_ratio: 0.0,
                    violations: 0,
                },
                |acc, w| PerTargetWorst {
                    t,
                    max_lhs: acc.max_lhs.max(w.max_lhs),
                    argmax: if w.max_lhs > acc.max_lhs { w.argmax } else { acc.argmax },
                    max_ratio: acc.max_ratio.max(w.max_ratio),
                    violations: acc.violations + w.violations,
                },
            )
        })
        .collect();
    Ok(PerTargetSweep {
        shape: *space.shape(),
        by_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(side: u32, k: u32) -> StateSpace {
        StateSpace::new(LatticeShape::grid(side, k).unwrap()).unwrap()
    }

    fn first(sp: &StateSpace, label: RegionLabel) -> u64 {
        (0..sp.states() as u64).find(|&s| sp.label(s) == label).unwrap()
    }

    #[test]
    fn k1_trajectory_is_zero() {
        let sp = space(2, 1);
        let tr = exact_tv_trajectory(&sp, 5, 4).unwrap();
        assert!(tr.points.iter().all(|p| p.tv.abs() < 1e-15));
    }

    #[test]
    fn safe_start_t0_matches_census_arithmetic() {
        let sp = space(2, 2);
        let x = first(&sp, RegionLabel::Safe);
        let tr = exact_tv_trajectory(&sp, x, 3).unwrap();
        let closed = 0.5 * (144.0 * (1.0 / 144.0 - 1.0 / 240.0) + 96.0 / 240.0);
        assert!((tr.points[0].tv - closed).abs() < 1e-12);
        assert!((closed - 0.4).abs() < 1e-15);
        assert!(tr.is_nonincreasing(1e-15));
        assert!(tr.points[3].tv < tr.points[1].tv);
    }

    #[test]
    fn ident_start_rejected() {
        let sp = space(2, 2);
        let x = first(&sp, RegionLabel::Ident);
        assert!(matches!(exact_tv_trajectory(&sp, x, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn per_target_t0_closed_forms() {
        let sp = space(2, 2);
        let y = first(&sp, RegionLabel::Safe);
        let inside = per_target_bound_report(&sp, y, y, 0).unwrap();
        assert!((inside.lhs - (1.0 / 144.0 - 1.0 / 240.0)).abs() < 1e-15);
        assert!((inside.envelope - 1.0 / 144.0).abs() < 1e-15);
        assert!(inside.pass);
        let x = first(&sp, RegionLabel::Coll);
        let outside = per_target_bound_report(&sp, x, y, 0).unwrap();
        assert!((outside.lhs - 1.0 / 240.0).abs() < 1e-15);
        assert!(outside.pass);
    }

    #[test]
    fn per_target_sweep_small() {
        let sp = space(2, 2);
        let sweep = per_target_sweep(&sp, 2).unwrap();
        assert!(sweep.all_pass());
        assert!(sweep.worst_nonincreasing(1e-15));
        let k1 = per_target_sweep(&space(2, 1), 2).unwrap();
        assert!(k1.by_t.iter().all(|w| w.max_lhs < 1e-15));
    }

    #[test]
    fn contraction_factor_of_geometric_sequence() {
        let tr = TvTrajectory {
            shape: LatticeShape::grid(2, 2).unwrap(),
            start: 0,
            source: String::new(),
            seed: None,
            samples: None,
            points: (0..6)
                .map(|t| TvPoint {
                    t,
                    tv: 0.5f64.powi(t as i32),
                })
                .collect(),
        };
        assert!((tr.contraction_factor().unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(tr.first_below(0.1), Some(4));
    }
}
