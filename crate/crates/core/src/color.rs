//! Color classes: per-slice equality patterns of a k-tuple, the
//! Safe / Coll / Ident regions, and their exact sizes.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{hyperplane_sites, line_sites, BitLatticeTuple, LatticeShape};
use crate::partition::{all_partitions, falling_factorial, SetPartition};

/// Per-slice partitions of `[k]` along one axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColorSignature {
    slice_partitions: Vec<SetPartition>,
}

impl ColorSignature {
    pub fn new(slice_partitions: Vec<SetPartition>) -> Self {
        ColorSignature { slice_partitions }
    }

    pub fn slice_partitions(&self) -> &[SetPartition] {
        &self.slice_partitions
    }

    /// Every slice all-singletons: the signature of `B_safe`.
    pub fn is_all_identity(&self) -> bool {
        self.slice_partitions.iter().all(SetPartition::is_identity)
    }

    /// ℓ ~ m iff they agree on every slice; this is the whole-lattice equality pattern.
    pub fn grid_partition(&self) -> Option<SetPartition> {
        let mut it = self.slice_partitions.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, p| acc.meet(p)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    Safe,
    Coll,
    Ident,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionLabel::Safe => "safe",
            RegionLabel::Coll => "coll",
            RegionLabel::Ident => "ident",
        })
    }
}

fn member_slice_words(x: &BitLatticeTuple, sites: &[usize], ell: usize) -> Vec<u64> {
    sites.chunks(64).map(|chunk| x.gather(chunk, ell)).collect()
}

/// Equality pattern of the k members' slices at each index along `axis`.
pub fn slice_coloring(x: &BitLatticeTuple, axis: usize) -> Result<ColorSignature> {
    let shape = x.shape();
    shape.check_axis(axis)?;
    let k = shape.k() as usize;
    let parts = (0..shape.side() as usize)
        .map(|i| {
            let sites = hyperplane_sites(shape.dims(), shape.side(), axis, i);
            let values: Vec<Vec<u64>> = (0..k).map(|l| member_slice_words(x, &sites, l)).collect();
            SetPartition::from_values(&values)
        })
        .collect();
    Ok(ColorSignature::new(parts))
}

/// Equality pattern of the k members as whole lattices.
pub fn grid_coloring(x: &BitLatticeTuple) -> SetPartition {
    let shape = x.shape();
    let sites: Vec<usize> = (0..shape.n()).collect();
    let values: Vec<Vec<u64>> = (0..shape.k() as usize)
        .map(|l| member_slice_words(x, &sites, l))
        .collect();
    SetPartition::from_values(&values)
}

/// Whether the members are pairwise distinct lattices.
pub fn is_distinct(x: &BitLatticeTuple) -> bool {
    grid_coloring(x).is_identity()
}

pub fn classify(x: &BitLatticeTuple, axis: usize) -> Result<RegionLabel> {
    let sig = slice_coloring(x, axis)?;
    Ok(label_of_signature(&sig))
}

/// Region of every tuple carrying `sig`.
pub fn label_of_signature(sig: &ColorSignature) -> RegionLabel {
    match sig.grid_partition() {
        Some(g) if !g.is_identity() => RegionLabel::Ident,
        _ if sig.is_all_identity() => RegionLabel::Safe,
        _ => RegionLabel::Coll,
    }
}

/// Number of possible values of one slice, `2^{n/side}`.
pub fn slice_alphabet(shape: &LatticeShape) -> Result<u128> {
    let len = shape.slice_len();
    if len >= 128 {
        return Err(Error::capacity(format!("slice alphabet 2^{len} overflows")));
    }
    Ok(1u128 << len)
}

/// Exact number of tuples carrying `sig`: the product over slices of
/// falling factorials `A(A−1)⋯(A−τ_i+1)`. Unrealizable signatures give 0.
pub fn color_class_size(sig: &ColorSignature, shape: &LatticeShape) -> Result<u128> {
    if sig.slice_partitions.len() != shape.side() as usize {
        return Err(Error::domain(format!(
            "signature has {} slices, shape has {}",
            sig.slice_partitions.len(),
            shape.side()
        )));
    }
    if sig.slice_partitions.iter().any(|p| p.len() != shape.k() as usize) {
        return Err(Error::domain("signature partitions must cover [k]"));
    }
    let alphabet = slice_alphabet(shape)?;
    sig.slice_partitions.iter().try_fold(1u128, |acc, p| {
        let f =
            falling_factorial(alphabet, p.block_count()).ok_or_else(|| Error::capacity("class size overflows u128"))?;
        acc.checked_mul(f)
            .ok_or_else(|| Error::capacity("class size overflows u128"))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CensusStrategy {
    Enumeration,
    Formula,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCensus {
    pub shape: LatticeShape,
    pub safe: u128,
    pub coll: u128,
    pub ident: u128,
    pub distinct: u128,
    pub strategy: CensusStrategy,
}

impl RegionCensus {
    pub fn total(&self) -> u128 {
        self.safe + self.coll + self.ident
    }

    /// Exact `|B_coll| / |D|`.
    pub fn coll_ratio(&self) -> f64 {
        if self.distinct == 0 {
            0.0
        } else {
            self.coll as f64 / self.distinct as f64
        }
    }

    /// Union-bound value `2·side·k² / 2^{n/side}` that caps [`coll_ratio`](Self::coll_ratio).
    pub fn collision_bound(&self) -> f64 {
        collision_bound(&self.shape)
    }

    pub fn bound_holds(&self) -> bool {
        self.coll_ratio() <= self.collision_bound()
    }
}

/// `2·side·k² / 2^{n/side}`.
pub fn collision_bound(shape: &LatticeShape) -> f64 {
    let k = shape.k() as f64;
    2.0 * shape.side() as f64 * k * k / 2f64.powi(shape.slice_len() as i32)
}

/// Exact region sizes, by enumeration when `2^{nk}` is within `2^ceiling_bits`,
/// otherwise by summing class sizes over signatures.
pub fn region_census(shape: &LatticeShape, ceiling_bits: u32) -> Result<RegionCensus> {
    if shape.bits() <= ceiling_bits as usize {
        census_by_enumeration(shape, ceiling_bits)
    } else {
        census_by_formula(shape)
    }
}

/// Classifies every packed state.
pub fn census_by_enumeration(shape: &LatticeShape, ceiling_bits: u32) -> Result<RegionCensus> {
    let states = shape.state_count(ceiling_bits)?;
    let rows = FiberFamily::new(shape, Fibers::Hyperplanes { axis: 0 })?;
    let whole = FiberFamily::new(shape, Fibers::Whole)?;
    let (safe, coll, ident) = (0..states as u64)
        .into_par_iter()
        .fold(
            || (0u128, 0u128, 0u128),
            |(s, c, i), state| match fast_label(&rows, &whole, state) {
                RegionLabel::Safe => (s + 1, c, i),
                RegionLabel::Coll => (s, c + 1, i),
                RegionLabel::Ident => (s, c, i + 1),
            },
        )
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    Ok(RegionCensus {
        shape: *shape,
        safe,
        coll,
        ident,
        distinct: safe + coll,
        strategy: CensusStrategy::Enumeration,
    })
}

pub(crate) fn fast_label(rows: &FiberFamily, whole: &FiberFamily, state: u64) -> RegionLabel {
    if !whole.fiber_partition_is_identity(state, 0) {
        RegionLabel::Ident
    } else if (0..rows.fiber_count()).all(|f| rows.fiber_partition_is_identity(state, f)) {
        RegionLabel::Safe
    } else {
        RegionLabel::Coll
    }
}

/// Sums class sizes over all per-slice partitions. Tuples are distinct iff no
/// pair is merged in every slice, so the sum is carried over the running meet
/// of the slice partitions.
pub fn census_by_formula(shape: &LatticeShape) -> Result<RegionCensus> {
    let k = shape.k() as usize;
    if k > 8 {
        return Err(Error::capacity(format!(
            "signature enumeration for k = {k} is out of range"
        )));
    }
    let overflow = || Error::capacity("census overflows u128");
    let alphabet = slice_alphabet(shape)?;
    let parts: Vec<(SetPartition, u128)> = all_partitions(k)
        .into_iter()
        .map(|p| {
            let w = falling_factorial(alphabet, p.block_count()).ok_or_else(overflow)?;
            Ok((p, w))
        })
        .collect::<Result<_>>()?;

    let mut by_meet: std::collections::BTreeMap<SetPartition, u128> = Default::default();
    by_meet.insert(SetPartition::trivial(k), 1);
    for _ in 0..shape.side() {
        let mut next: std::collections::BTreeMap<SetPartition, u128> = Default::default();
        for (meet, &count) in &by_meet {
            for (p, w) in &parts {
                if *w == 0 {
                    continue;
                }
                let add = count.checked_mul(*w).ok_or_else(overflow)?;
                let slot = next.entry(meet.meet(p)).or_insert(0);
                *slot = slot.checked_add(add).ok_or_else(overflow)?;
            }
        }
        by_meet = next;
    }
    let distinct = by_meet.get(&SetPartition::identity(k)).copied().unwrap_or(0);
    let total = by_meet
        .values()
        .try_fold(0u128, |a, &b| a.checked_add(b))
        .ok_or_else(overflow)?;
    let per_slice_safe = falling_factorial(alphabet, k).ok_or_else(overflow)?;
    let safe = (0..shape.side())
        .try_fold(1u128, |a, _| a.checked_mul(per_slice_safe))
        .ok_or_else(overflow)?;
    Ok(RegionCensus {
        shape: *shape,
        safe,
        coll: distinct - safe,
        ident: total - distinct,
        distinct,
        strategy: CensusStrategy::Formula,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassCount {
    /// Realizable signatures.
    pub exact: u128,
    /// `k^{k·side}`.
    pub bound: f64,
}

impl ClassCount {
    pub fn bound_holds(&self) -> bool {
        self.exact as f64 <= self.bound
    }
}

/// Number of realizable signatures along one axis: `r^side`, where `r`
/// counts partitions of `[k]` with at most `2^{n/side}` blocks.
pub fn count_color_classes(shape: &LatticeShape) -> Result<ClassCount> {
    let k = shape.k() as usize;
    if k > 12 {
        return Err(Error::capacity(format!("partition enumeration for k = {k}")));
    }
    let alphabet = slice_alphabet(shape)?;
    let realizable = all_partitions(k)
        .iter()
        .filter(|p| p.block_count() as u128 <= alphabet)
        .count() as u128;
    let exact = (0..shape.side())
        .try_fold(1u128, |a, _| a.checked_mul(realizable))
        .ok_or_else(|| Error::capacity("class count overflows u128"))?;
    let bound = (k as f64).powf((k * shape.side() as usize) as f64);
    Ok(ClassCount { exact, bound })
}

/// Which sub-lattices a walk permutes independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Fibers {
    /// The `side` slices `coord[axis] == i`.
    Hyperplanes { axis: usize },
    /// The `side^{D−1}` lines running along `axis`.
    Lines { axis: usize },
    /// The whole lattice as one fiber.
    Whole,
}

/// Precomputed bit positions of each fiber of each member, for packed states of
/// at most 64 bits.
#[derive(Debug, Clone)]
pub struct FiberFamily {
    k: usize,
    fiber_len: usize,
    /// `positions[f][ell]` lists the flat bit positions of fiber `f` of member `ell`.
    positions: Vec<Vec<Vec<u8>>>,
}

impl FiberFamily {
    pub fn new(shape: &LatticeShape, fibers: Fibers) -> Result<Self> {
        if shape.bits() > 64 {
            return Err(Error::capacity("fiber extraction needs n·k ≤ 64"));
        }
        if shape.k() > 16 {
            return Err(Error::capacity("fiber extraction supports k ≤ 16"));
        }
        let (dims, side) = (shape.dims(), shape.side());
        let site_lists: Vec<Vec<usize>> = match fibers {
            Fibers::Hyperplanes { axis } => {
                shape.check_axis(axis)?;
                (0..side as usize)
                    .map(|i| hyperplane_sites(dims, side, axis, i))
                    .collect()
            }
            Fibers::Lines { axis } => {
                shape.check_axis(axis)?;
                (0..shape.slice_len())
                    .map(|f| line_sites(dims, side, axis, f))
                    .collect()
            }
            Fibers::Whole => vec![(0..shape.n()).collect()],
        };
        let k = shape.k() as usize;
        let positions = site_lists
            .iter()
            .map(|sites| {
                (0..k)
                    .map(|ell| sites.iter().map(|&s| (s * k + ell) as u8).collect())
                    .collect()
            })
            .collect();
        Ok(FiberFamily {
            k,
            fiber_len: site_lists[0].len(),
            positions,
        })
    }

    pub fn fiber_count(&self) -> usize {
        self.positions.len()
    }

    pub fn fiber_len(&self) -> usize {
        self.fiber_len
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn value(&self, state: u64, fiber: usize, ell: usize) -> u64 {
        self.positions[fiber][ell]
            .iter()
            .enumerate()
            .fold(0u64, |acc, (b, &p)| acc | ((state >> p) & 1) << b)
    }

    /// Clears fiber `fiber` of member `ell` in `state` and writes `value`.
    #[inline]
    pub fn write(&self, state: u64, fiber: usize, ell: usize, value: u64) -> u64 {
        self.positions[fiber][ell]
            .iter()
            .enumerate()
            .fold(state, |acc, (b, &p)| (acc & !(1u64 << p)) | (((value >> b) & 1) << p))
    }

    /// Canonical labels of the members' values on one fiber.
    #[inline]
    pub fn fiber_labels(&self, state: u64, fiber: usize, labels: &mut [u8]) {
        let mut reps = [0u64; 16];
        let mut count = 0usize;
        for (ell, label) in labels.iter_mut().enumerate().take(self.k) {
            let v = self.value(state, fiber, ell);
            *label = match reps[..count].iter().position(|&r| r == v) {
                Some(p) => p as u8,
                None => {
                    reps[count] = v;
                    count += 1;
                    (count - 1) as u8
                }
            };
        }
    }

    pub fn fiber_partition_is_identity(&self, state: u64, fiber: usize) -> bool {
        let mut vals = [0u64; 16];
        for (ell, slot) in vals.iter_mut().enumerate().take(self.k) {
            *slot = self.value(state, fiber, ell);
        }
        for a in 0..self.k {
            for b in a + 1..self.k {
                if vals[a] == vals[b] {
                    return false;
                }
            }
        }
        true
    }

    /// Packs every fiber's canonical labels, 4 bits each.
    pub fn signature_key(&self, state: u64) -> u128 {
        let mut labels = [0u8; 16];
        let mut key = 0u128;
        for f in 0..self.fiber_count() {
            self.fiber_labels(state, f, &mut labels[..self.k]);
            for &l in &labels[..self.k] {
                key = (key << 4) | l as u128;
            }
        }
        key
    }

    pub(crate) fn key_fits(&self) -> bool {
        self.k <= 16 && self.fiber_count() * self.k * 4 <= 128
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(side: u32, k: u32) -> LatticeShape {
        LatticeShape::grid(side, k).unwrap()
    }

    fn all_signatures(shape: &LatticeShape) -> Vec<ColorSignature> {
        let parts = all_partitions(shape.k() as usize);
        let mut sigs = vec![Vec::new()];
        for _ in 0..shape.side() {
            sigs = sigs
                .into_iter()
                .flat_map(|prefix: Vec<SetPartition>| {
                    parts.iter().map(move |p| {
                        let mut v = prefix.clone();
                        v.push(p.clone());
                        v
                    })
                })
                .collect();
        }
        sigs.into_iter().map(ColorSignature::new).collect()
    }

    #[test]
    fn k1_signature_is_trivial_and_safe() {
        let s = shape(2, 1);
        for state in 0..16u64 {
            let x = BitLatticeTuple::from_state(s, state).unwrap();
            let sig = slice_coloring(&x, 0).unwrap();
            assert!(sig.slice_partitions().iter().all(|p| p.labels() == [0]));
            assert_eq!(classify(&x, 0).unwrap(), RegionLabel::Safe);
            assert_eq!(color_class_size(&sig, &s).unwrap(), 16);
        }
    }

    #[test]
    fn worked_signature_example() {
        let s = shape(2, 1);
        let a = BitLatticeTuple::from_signs(s, &[1, 1, 1, -1]).unwrap();
        let b = BitLatticeTuple::from_signs(s, &[1, 1, -1, 1]).unwrap();
        let x = BitLatticeTuple::from_members(&[a.clone(), b]).unwrap();
        let sig = slice_coloring(&x, 0).unwrap();
        assert_eq!(sig.slice_partitions()[0].labels(), &[0, 0]);
        assert_eq!(sig.slice_partitions()[1].labels(), &[0, 1]);
        assert_eq!(classify(&x, 0).unwrap(), RegionLabel::Coll);

        let same = BitLatticeTuple::from_members(&[a.clone(), a]).unwrap();
        assert_eq!(classify(&same, 0).unwrap(), RegionLabel::Ident);
    }

    #[test]
    fn exhaustive_counts_at_side2_k2() {
        let s = shape(2, 2);
        let mut safe = 0;
        let mut by_sig: std::collections::HashMap<ColorSignature, u128> = Default::default();
        let mut labels = [0u32; 3];
        for state in 0..256u64 {
            let x = BitLatticeTuple::from_state(s, state).unwrap();
            let sig = slice_coloring(&x, 0).unwrap();
            if sig.is_all_identity() {
                safe += 1;
            }
            *by_sig.entry(sig).or_default() += 1;
            labels[classify(&x, 0).unwrap() as usize] += 1;
        }
        assert_eq!(safe, 144);
        assert_eq!(labels, [144, 96, 16]);
        for (sig, count) in by_sig {
            assert_eq!(color_class_size(&sig, &s).unwrap(), count);
        }
        let merged = ColorSignature::new(vec![SetPartition::trivial(2); 2]);
        assert_eq!(color_class_size(&merged, &s).unwrap(), 16);
        let split = ColorSignature::new(vec![SetPartition::identity(2); 2]);
        assert_eq!(color_class_size(&split, &s).unwrap(), 144);
    }

    #[test]
    fn class_sizes_match_enumeration_at_side3_k2_and_side2_k1() {
        for s in [shape(3, 2), shape(2, 1)] {
            let rows = FiberFamily::new(&s, Fibers::Hyperplanes { axis: 0 }).unwrap();
            let mut by_key: std::collections::HashMap<u128, (u64, u128)> = Default::default();
            for state in 0..(1u64 << s.bits()) {
                by_key.entry(rows.signature_key(state)).or_insert((state, 0)).1 += 1;
            }
            for (_, (rep, count)) in by_key {
                let x = BitLatticeTuple::from_state(s, rep).unwrap();
                let sig = slice_coloring(&x, 0).unwrap();
                assert_eq!(color_class_size(&sig, &s).unwrap(), count);
            }
        }
    }

    #[test]
    fn signature_soundness_exhaustive() {
        // equal signatures iff equal pairwise slice-equality pattern
        let s = shape(2, 2);
        let sigs: Vec<_> = (0..256u64)
            .map(|st| slice_coloring(&BitLatticeTuple::from_state(s, st).unwrap(), 0).unwrap())
            .collect();
        let pattern = |st: u64| {
            let x = BitLatticeTuple::from_state(s, st).unwrap();
            (0..2)
                .map(|i| x.slice_value(0, i, 0).unwrap() == x.slice_value(0, i, 1).unwrap())
                .collect::<Vec<_>>()
        };
        for a in 0..256u64 {
            for b in 0..256u64 {
                assert_eq!(sigs[a as usize] == sigs[b as usize], pattern(a) == pattern(b));
            }
        }
    }

    #[test]
    fn unrealizable_signature_has_size_zero() {
        // side 2 in one dimension: slices are single sites with alphabet 2
        let s = LatticeShape::new(1, 2, 3).unwrap();
        let sig = ColorSignature::new(vec![SetPartition::identity(3); 2]);
        assert_eq!(color_class_size(&sig, &s).unwrap(), 0);
        let bad = ColorSignature::new(vec![SetPartition::identity(3)]);
        assert!(color_class_size(&bad, &s).is_err());
    }

    #[test]
    fn every_realizable_signature_sums_to_cube() {
        for s in [shape(2, 2), shape(2, 3), shape(3, 2)] {
            let total: u128 = all_signatures(&s)
                .iter()
                .map(|sig| color_class_size(sig, &s).unwrap())
                .sum();
            assert_eq!(total, 1u128 << s.bits());
        }
    }

    #[test]
    fn census_small_shapes() {
        let c = region_census(&shape(2, 2), 24).unwrap();
        assert_eq!((c.safe, c.coll, c.ident, c.distinct), (144, 96, 16, 240));
        assert!((c.coll_ratio() - 0.4).abs() < 1e-15);
        assert_eq!(c.collision_bound(), 4.0);
        assert!(c.bound_holds());

        let f = census_by_formula(&shape(3, 2)).unwrap();
        assert_eq!((f.safe, f.coll, f.ident, f.distinct), (175616, 86016, 512, 261632));
        let e = census_by_enumeration(&shape(3, 2), 24).unwrap();
        assert_eq!(
            (e.safe, e.coll, e.ident, e.distinct),
            (f.safe, f.coll, f.ident, f.distinct)
        );

        let k1 = region_census(&shape(3, 1), 24).unwrap();
        assert_eq!((k1.safe, k1.coll, k1.ident, k1.distinct), (512, 0, 0, 512));
    }

    #[test]
    fn formula_matches_enumeration_on_several_shapes() {
        for (d, s, k) in [(2, 2, 3), (3, 2, 2), (1, 4, 3), (2, 2, 4), (3, 2, 3)] {
            let sh = LatticeShape::new(d, s, k).unwrap();
            let e = census_by_enumeration(&sh, 24).unwrap();
            let f = census_by_formula(&sh).unwrap();
            assert_eq!((e.safe, e.coll, e.ident), (f.safe, f.coll, f.ident), "{sh}");
            assert_eq!(e.total(), 1u128 << sh.bits());
            let distinct = falling_factorial(1u128 << sh.n(), k as usize).unwrap();
            assert_eq!(f.distinct, distinct);
        }
    }

    #[test]
    fn census_too_large_is_capacity_error() {
        let huge = LatticeShape::grid(12, 2).unwrap();
        assert!(matches!(region_census(&huge, 24), Err(Error::Capacity(_))));
    }

    #[test]
    fn class_counts() {
        let c = count_color_classes(&shape(2, 2)).unwrap();
        assert_eq!(c.exact, 4);
        assert_eq!(c.bound, 16.0);
        let c = count_color_classes(&shape(2, 3)).unwrap();
        assert_eq!(c.exact, 25);
        assert_eq!(c.bound, 729.0);
        assert!(c.bound_holds());
        for side in 1..5 {
            assert_eq!(count_color_classes(&shape(side, 1)).unwrap().exact, 1);
        }
        // side-2 line: alphabet 2 rules out the 3-block partition
        let line = LatticeShape::new(1, 2, 3).unwrap();
        assert_eq!(count_color_classes(&line).unwrap().exact, 16);
    }

    #[test]
    fn fiber_family_matches_slice_values() {
        let s = LatticeShape::new(3, 2, 2).unwrap();
        let planes = FiberFamily::new(&s, Fibers::Hyperplanes { axis: 1 }).unwrap();
        for state in [0u64, 0xBEEF, 0x1357] {
            let x = BitLatticeTuple::from_state(s, state).unwrap();
            for i in 0..2 {
                for ell in 0..2 {
                    assert_eq!(planes.value(state, i, ell), x.slice_value(1, i, ell).unwrap());
                    let v = planes.value(state, i, ell);
                    assert_eq!(planes.write(state, i, ell, v), state);
                }
            }
        }
    }
}
