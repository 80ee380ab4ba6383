//! Idealized walks on the packed state space `{±1}^{nk}`.
//!
//! Every idealized walk applies independent uniform permutations to a family
//! of sub-lattices (rows, columns, hyperplanes, lines, or the whole lattice).
//! Its transition operator replaces `f(X)` by the mean of `f` over the color
//! class of `X` with respect to that family, so an application is one
//! group-by pass over the states.

mod collision;
mod identities;
mod spectral;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::{fast_label, FiberFamily, Fibers, RegionLabel};
use crate::error::{Error, Result};
use crate::lattice::{BitLatticeTuple, LatticeShape, DEFAULT_ENUMERATION_BITS};

pub use collision::{
    collision_probability_exact, collision_profile, pair_collision_bound, CollisionProfile, CollisionReport,
};
pub use identities::{
    check_operator_identities, ident_quadratic_form, support_transition_check, support_transition_sweep,
    IdentityRecord, IdentityReport, SupportTransitionReport, IDENTITY_TOLERANCE,
};
pub use spectral::{dense_spectral_norm, spectral_norm_diff, PowerOptions, SpectralEstimate, DENSE_ORACLE_BITS};

/// A real function on the packed states of one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkVector {
    shape: LatticeShape,
    values: Vec<f64>,
}

impl WalkVector {
    pub fn zeros(shape: LatticeShape, len: usize) -> Self {
        WalkVector {
            shape,
            values: vec![0.0; len],
        }
    }

    pub fn from_values(shape: LatticeShape, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("walk vectors must be finite"));
        }
        if shape.bits() >= usize::BITS as usize || values.len() != 1usize << shape.bits() {
            return Err(Error::domain(format!(
                "expected 2^{} entries, got {}",
                shape.bits(),
                values.len()
            )));
        }
        Ok(WalkVector { shape, values })
    }

    pub fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, state: u64) -> f64 {
        self.values[state as usize]
    }

    pub fn dot(&self, other: &WalkVector) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn norm1(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn sub(&self, other: &WalkVector) -> WalkVector {
        WalkVector {
            shape: self.shape,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&mut self, c: f64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }

    /// Largest entrywise gap.
    pub fn max_abs_diff(&self, other: &WalkVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Support as a 0/1 vector.
    pub fn support_indicator(&self) -> WalkVector {
        WalkVector {
            shape: self.shape,
            values: self.values.iter().map(|&v| if v != 0.0 { 1.0 } else { 0.0 }).collect(),
        }
    }
}

/// A transition operator built from idealized walks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// Uniform permutations of each slice `coord[axis] == i`. Axis 0 is the
    /// row walk; in two dimensions axis 1 is the column walk.
    AxisWalk(usize),
    /// Uniform permutations of each line running along `axis`; the column
    /// layer of the recursive construction is `LineWalk(0)`.
    LineWalk(usize),
    /// A uniform permutation of the whole cube.
    GlobalWalk,
    /// Matrix product; the rightmost factor acts first on vectors.
    Composition(Vec<OperatorKind>),
}

impl OperatorKind {
    pub fn rows() -> Self {
        OperatorKind::AxisWalk(0)
    }

    /// Lines along axis 0; the columns of a 2-D grid.
    pub fn columns() -> Self {
        OperatorKind::LineWalk(0)
    }

    /// `T_R (T_C T_R)^t` as a list of matrix factors.
    pub fn mixing_sequence(t: usize) -> Vec<OperatorKind> {
        let mut seq = vec![Self::rows()];
        for _ in 0..t {
            seq.push(Self::columns());
            seq.push(Self::rows());
        }
        seq
    }

    /// Matrix transpose: every walk is self-adjoint, so only products reverse.
    pub fn adjoint(&self) -> OperatorKind {
        match self {
            OperatorKind::Composition(parts) => {
                OperatorKind::Composition(parts.iter().rev().map(|p| p.adjoint()).collect())
            }
            other => other.clone(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            OperatorKind::AxisWalk(a) => format!("axis{a}"),
            OperatorKind::LineWalk(a) => format!("line{a}"),
            OperatorKind::GlobalWalk => "global".into(),
            OperatorKind::Composition(parts) => {
                let inner: Vec<String> = parts.iter().map(|p| p.label()).collect();
                format!("({})", inner.join("·"))
            }
        }
    }
}

/// Fiber family whose color classes a single walk resamples.
pub(crate) fn fibers_for(shape: &LatticeShape, kind: &OperatorKind) -> Result<Fibers> {
    let dims = shape.dims() as usize;
    match *kind {
        OperatorKind::AxisWalk(axis) => {
            shape.check_axis(axis)?;
            Ok(Fibers::Hyperplanes { axis })
        }
        OperatorKind::LineWalk(axis) => {
            shape.check_axis(axis)?;
            // in two dimensions a line along one axis is a slice of the other
            if dims == 2 {
                Ok(Fibers::Hyperplanes { axis: 1 - axis })
            } else if dims == 1 {
                Ok(Fibers::Whole)
            } else {
                Ok(Fibers::Lines { axis })
            }
        }
        OperatorKind::GlobalWalk => Ok(Fibers::Whole),
        OperatorKind::Composition(_) => Err(Error::domain("composition has no single class index")),
    }
}

/// Dense class ids of every state for one fiber family.
#[derive(Debug)]
pub struct ClassIndex {
    class_of: Vec<u32>,
    sizes: Vec<u64>,
}

impl ClassIndex {
    fn build(family: &FiberFamily, states: usize) -> Result<Self> {
        if !family.key_fits() {
            return Err(Error::capacity("signature keys exceed 128 bits"));
        }
        const CHUNK: usize = 1 << 16;
        let mut ids: HashMap<u128, u32> = HashMap::new();
        let mut sizes = Vec::new();
        let mut class_of = Vec::with_capacity(states);
        let mut keys = vec![0u128; CHUNK.min(states)];
        for start in (0..states).step_by(CHUNK) {
            let len = CHUNK.min(states - start);
            keys[..len]
                .par_iter_mut()
                .enumerate()
                .for_each(|(i, key)| *key = family.signature_key((start + i) as u64));
            for key in &keys[..len] {
                let next = sizes.len() as u32;
                let id = *ids.entry(*key).or_insert(next);
                if id == next {
                    sizes.push(0);
                }
                sizes[id as usize] += 1;
                class_of.push(id);
            }
        }
        Ok(ClassIndex { class_of, sizes })
    }

    pub fn class_of(&self, state: u64) -> u32 {
        self.class_of[state as usize]
    }

    pub fn size_of(&self, state: u64) -> u64 {
        self.sizes[self.class_of[state as usize] as usize]
    }

    pub fn class_count(&self) -> usize {
        self.sizes.len()
    }

    fn mean_into(&self, input: &[f64], out: &mut [f64]) {
        let mut sums = vec![0.0f64; self.sizes.len()];
        for (&c, &v) in self.class_of.iter().zip(input) {
            sums[c as usize] += v;
        }
        for (s, &n) in sums.iter_mut().zip(&self.sizes) {
            *s /= n as f64;
        }
        for (o, &c) in out.iter_mut().zip(&self.class_of) {
            *o = sums[c as usize];
        }
    }
}

/// Exact operator engine for one enumerable shape. Class indices are built on
/// first use and cached.
pub struct StateSpace {
    shape: LatticeShape,
    states: usize,
    classes: RwLock<HashMap<Fibers, Arc<ClassIndex>>>,
    labels: RwLock<Option<Arc<Vec<RegionLabel>>>>,
}

impl std::fmt::Debug for StateSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StateSpace")
            .field("shape", &self.shape)
            .field("states", &self.states)
            .finish()
    }
}

impl StateSpace {
    pub fn new(shape: LatticeShape) -> Result<Self> {
        Self::with_ceiling(shape, DEFAULT_ENUMERATION_BITS)
    }

    pub fn with_ceiling(shape: LatticeShape, ceiling_bits: u32) -> Result<Self> {
        let states = shape.state_count(ceiling_bits.min(32))?;
        Ok(StateSpace {
            shape,
            states,
            classes: RwLock::new(HashMap::new()),
            labels: RwLock::new(None),
        })
    }

    pub fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    pub fn states(&self) -> usize {
        self.states
    }

    fn fibers_of(&self, kind: &OperatorKind) -> Result<Fibers> {
        fibers_for(&self.shape, kind)
    }

    /// Class index of a single walk.
    pub fn class_index(&self, kind: &OperatorKind) -> Result<Arc<ClassIndex>> {
        let fibers = self.fibers_of(kind)?;
        if let Some(ix) = self.classes.read().unwrap().get(&fibers) {
            return Ok(ix.clone());
        }
        let family = FiberFamily::new(&self.shape, fibers)?;
        let ix = Arc::new(ClassIndex::build(&family, self.states)?);
        self.classes
            .write()
            .unwrap()
            .entry(fibers)
            .or_insert_with(|| ix.clone());
        Ok(ix)
    }

    /// Region label of every state, relative to axis-0 slices.
    pub fn labels(&self) -> Arc<Vec<RegionLabel>> {
        if let Some(l) = self.labels.read().unwrap().as_ref() {
            return l.clone();
        }
        let rows =
            FiberFamily::new(&self.shape, Fibers::Hyperplanes { axis: 0 }).expect("enumerable shapes fit 64 bits");
        let whole = FiberFamily::new(&self.shape, Fibers::Whole).expect("enumerable");
        let labels: Vec<RegionLabel> = (0..self.states as u64)
            .into_par_iter()
            .map(|s| fast_label(&rows, &whole, s))
            .collect();
        let labels = Arc::new(labels);
        *self.labels.write().unwrap() = Some(labels.clone());
        labels
    }

    pub fn label(&self, state: u64) -> RegionLabel {
        self.labels()[state as usize]
    }

    pub fn distinct_count(&self) -> usize {
        self.labels().iter().filter(|&&l| l != RegionLabel::Ident).count()
    }

    pub fn zeros(&self) -> WalkVector {
        WalkVector::zeros(self.shape, self.states)
    }

    pub fn basis(&self, state: u64) -> Result<WalkVector> {
        self.check_state(state)?;
        let mut v = self.zeros();
        v.values[state as usize] = 1.0;
        Ok(v)
    }

    /// 0/1 indicator of the states satisfying `pred`.
    pub fn indicator(&self, pred: impl Fn(u64) -> bool) -> WalkVector {
        let mut v = self.zeros();
        for (s, x) in v.values.iter_mut().enumerate() {
            if pred(s as u64) {
                *x = 1.0;
            }
        }
        v
    }

    pub fn region_indicator(&self, label: RegionLabel) -> WalkVector {
        let labels = self.labels();
        self.indicator(|s| labels[s as usize] == label)
    }

    /// Uniform distribution over the distinct tuples.
    pub fn uniform_on_distinct(&self) -> WalkVector {
        let labels = self.labels();
        let mut v = self.indicator(|s| labels[s as usize] != RegionLabel::Ident);
        let d = v.sum();
        if d > 0.0 {
            v.scale(1.0 / d);
        }
        v
    }

    pub fn check_state(&self, state: u64) -> Result<()> {
        if state as usize >= self.states {
            return Err(Error::domain(format!("state {state} out of range")));
        }
        Ok(())
    }

    pub fn state_of(&self, x: &BitLatticeTuple) -> Result<u64> {
        if x.shape() != &self.shape {
            return Err(Error::domain(format!(
                "tuple shape {} does not match {}",
                x.shape(),
                self.shape
            )));
        }
        x.state()
            .ok_or_else(|| Error::capacity("tuple does not fit a state index"))
    }

    fn check_vector(&self, f: &WalkVector) -> Result<()> {
        if f.shape != self.shape || f.values.len() != self.states {
            return Err(Error::domain(format!(
                "vector of shape {} does not match {}",
                f.shape, self.shape
            )));
        }
        Ok(())
    }

    /// `T f` for any operator kind.
    pub fn apply(&self, kind: &OperatorKind, f: &WalkVector) -> Result<WalkVector> {
        self.check_vector(f)?;
        match kind {
            OperatorKind::Composition(parts) => {
                let mut v = f.clone();
                for part in parts.iter().rev() {
                    v = self.apply(part, &v)?;
                }
                Ok(v)
            }
            atom => {
                let ix = self.class_index(atom)?;
                let mut out = self.zeros();
                ix.mean_into(&f.values, &mut out.values);
                Ok(out)
            }
        }
    }

    /// `Pr[X → Y] = ⟨e_X, T e_Y⟩`.
    pub fn transition_probability(&self, kind: &OperatorKind, x: u64, y: u64) -> Result<f64> {
        self.check_state(x)?;
        let ey = self.basis(y)?;
        Ok(self.apply(kind, &ey)?.get(x))
    }

    /// Distribution of the walk from `x` after the steps in `kinds`, first step first.
    pub fn push_forward(&self, x: u64, kinds: &[OperatorKind]) -> Result<WalkVector> {
        let mut v = self.basis(x)?;
        for k in kinds {
            v = self.apply(k, &v)?;
        }
        Ok(v)
    }

    /// Pushes an arbitrary distribution forward.
    pub fn push_distribution(&self, p: &WalkVector, kinds: &[OperatorKind]) -> Result<WalkVector> {
        let mut v = p.clone();
        for k in kinds {
            v = self.apply(k, &v)?;
        }
        Ok(v)
    }

    /// `½ Σ_{Y∈D} |p(Y) − 1/|D||`, plus any mass outside D.
    pub fn tv_to_uniform_distinct(&self, p: &WalkVector) -> f64 {
        let labels = self.labels();
        let d = self.distinct_count() as f64;
        let mut acc = 0.0;
        for (v, l) in p.values.iter().zip(labels.iter()) {
            acc += if *l == RegionLabel::Ident {
                v.abs()
            } else {
                (v - 1.0 / d).abs()
            };
        }
        0.5 * acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::classify;

    fn space(side: u32, k: u32) -> StateSpace {
        StateSpace::new(LatticeShape::grid(side, k).unwrap()).unwrap()
    }

    fn first_safe(sp: &StateSpace) -> u64 {
        (0..sp.states() as u64)
            .find(|&s| sp.label(s) == RegionLabel::Safe)
            .unwrap()
    }

    #[test]
    fn k1_row_walk_is_global_mean() {
        let sp = space(2, 1);
        let f = WalkVector::from_values(*sp.shape(), (0..16).map(|i| (i * i) as f64).collect()).unwrap();
        let out = sp.apply(&OperatorKind::rows(), &f).unwrap();
        let mean = f.sum() / 16.0;
        assert!(out.values().iter().all(|v| (v - mean).abs() < 1e-12));
    }

    #[test]
    fn global_walk_on_distinct_state() {
        let sp = space(2, 2);
        let x = first_safe(&sp);
        let out = sp.apply(&OperatorKind::GlobalWalk, &sp.basis(x).unwrap()).unwrap();
        for s in 0..256u64 {
            let expect = if sp.label(s) == RegionLabel::Ident {
                0.0
            } else {
                1.0 / 240.0
            };
            assert!((out.get(s) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn row_walk_spreads_over_safe_class() {
        let sp = space(2, 2);
        let x = first_safe(&sp);
        let out = sp.apply(&OperatorKind::rows(), &sp.basis(x).unwrap()).unwrap();
        let support = out.values().iter().filter(|&&v| v != 0.0).count();
        assert_eq!(support, 144);
        for s in 0..256u64 {
            if sp.label(s) == RegionLabel::Safe {
                assert!((out.get(s) - 1.0 / 144.0).abs() < 1e-15);
            }
        }
        let y = (0..256u64).rev().find(|&s| sp.label(s) == RegionLabel::Safe).unwrap();
        assert!((sp.transition_probability(&OperatorKind::rows(), x, y).unwrap() - 1.0 / 144.0).abs() < 1e-15);
        let coll = (0..256u64).find(|&s| sp.label(s) == RegionLabel::Coll).unwrap();
        assert_eq!(sp.transition_probability(&OperatorKind::rows(), x, coll).unwrap(), 0.0);
        assert!((sp.transition_probability(&OperatorKind::GlobalWalk, x, coll).unwrap() - 1.0 / 240.0).abs() < 1e-15);
    }

    #[test]
    fn push_forward_identities() {
        let sp = space(2, 2);
        let x = first_safe(&sp);
        assert_eq!(sp.push_forward(x, &[]).unwrap(), sp.basis(x).unwrap());
        let once = sp.push_forward(x, &[OperatorKind::rows()]).unwrap();
        let twice = sp
            .push_forward(x, &[OperatorKind::rows(), OperatorKind::rows()])
            .unwrap();
        assert!(once.max_abs_diff(&twice) < 1e-15);
        let g = sp.push_forward(x, &[OperatorKind::GlobalWalk]).unwrap();
        let rg = sp
            .push_forward(x, &[OperatorKind::rows(), OperatorKind::GlobalWalk])
            .unwrap();
        assert!(g.max_abs_diff(&rg) < 1e-15);
        for p in [&once, &g, &rg] {
            assert!(p.values().iter().all(|&v| v >= 0.0));
            assert!((p.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn transition_symmetry_and_class_constancy_exhaustive() {
        let sp = space(2, 2);
        for kind in [
            OperatorKind::rows(),
            OperatorKind::AxisWalk(1),
            OperatorKind::GlobalWalk,
        ] {
            let cols: Vec<WalkVector> = (0..256u64)
                .map(|y| sp.apply(&kind, &sp.basis(y).unwrap()).unwrap())
                .collect();
            for x in 0..256usize {
                for y in 0..256usize {
                    assert_eq!(cols[y].values()[x], cols[x].values()[y]);
                }
            }
            let ix = sp.class_index(&kind).unwrap();
            for out in cols.iter().take(32) {
                for a in 0..256u64 {
                    for b in 0..256u64 {
                        if ix.class_of(a) == ix.class_of(b) {
                            assert_eq!(out.get(a), out.get(b));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn line_walk_is_column_walk_in_two_dimensions() {
        let sp = space(2, 2);
        let a = sp.class_index(&OperatorKind::LineWalk(0)).unwrap();
        let b = sp.class_index(&OperatorKind::AxisWalk(1)).unwrap();
        for s in 0..256u64 {
            assert_eq!(a.size_of(s), b.size_of(s));
        }
    }

    #[test]
    fn class_sizes_match_color_class_size() {
        let sp = space(2, 2);
        let ix = sp.class_index(&OperatorKind::rows()).unwrap();
        assert_eq!(ix.class_count(), 4);
        for s in 0..256u64 {
            let x = BitLatticeTuple::from_state(*sp.shape(), s).unwrap();
            let sig = crate::color::slice_coloring(&x, 0).unwrap();
            let size = crate::color::color_class_size(&sig, sp.shape()).unwrap();
            assert_eq!(ix.size_of(s) as u128, size);
            assert_eq!(classify(&x, 0).unwrap(), sp.label(s));
        }
    }

    #[test]
    fn shape_and_axis_errors() {
        let sp = space(2, 2);
        let other = space(2, 1);
        assert!(sp.apply(&OperatorKind::rows(), &other.zeros()).is_err());
        assert!(matches!(
            sp.apply(&OperatorKind::AxisWalk(2), &sp.zeros()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            StateSpace::new(LatticeShape::grid(5, 1).unwrap()),
            Err(Error::Capacity(_))
        ));
        assert!(sp.basis(256).is_err());
    }

    #[test]
    fn three_dimensional_line_walk_builds() {
        let sp = StateSpace::new(LatticeShape::new(3, 2, 2).unwrap()).unwrap();
        let lines = sp.class_index(&OperatorKind::LineWalk(0)).unwrap();
        let planes = sp.class_index(&OperatorKind::AxisWalk(0)).unwrap();
        // lines carry 2-bit values, hyperplanes 4-bit values
        let s = 0x1234u64;
        assert!(lines.size_of(s) > 0 && planes.size_of(s) > 0);
        let f = sp.basis(s).unwrap();
        let out = sp.apply(&OperatorKind::LineWalk(0), &f).unwrap();
        assert!((out.sum() - 1.0).abs() < 1e-12);
    }
}
