//! Property tests for packing, colorings, and the walk operators.

use latticeperm::color::{census_by_enumeration, census_by_formula, classify, slice_coloring};
use latticeperm::lattice::{index_pack, index_unpack};
use latticeperm::walk::{OperatorKind, StateSpace};
use latticeperm::{BitLatticeTuple, LatticeShape, RegionLabel};
use proptest::prelude::*;

fn shape_strategy() -> impl Strategy<Value = LatticeShape> {
    (2u32..=4, 2u32..=5, 1u32..=4).prop_filter_map("fits", |(d, s, k)| {
        LatticeShape::new(d, s, k).ok().filter(|sh| sh.bits() <= 256)
    })
}

proptest! {
    #[test]
    fn pack_is_a_bijection(shape in shape_strategy()) {
        let mut seen = vec![false; shape.bits()];
        for flat in 0..shape.bits() {
            let (coords, member) = index_unpack(flat, &shape).unwrap();
            let back = index_pack(&coords, member, &shape).unwrap();
            prop_assert_eq!(back, flat);
            prop_assert!(!std::mem::replace(&mut seen[back], true));
        }
        prop_assert!(index_unpack(shape.bits(), &shape).is_err());
    }

    #[test]
    fn state_round_trips_through_members(state in 0u64..(1 << 12)) {
        let shape = LatticeShape::grid(2, 3).unwrap();
        let x = BitLatticeTuple::from_state(shape, state).unwrap();
        let members: Vec<_> = (0..3).map(|l| x.member(l).unwrap()).collect();
        let y = BitLatticeTuple::from_members(&members).unwrap();
        prop_assert_eq!(y.state(), Some(state));
    }

    /// The region label depends only on the slice coloring, and the
    /// coloring's partitions agree with direct comparison of slice values.
    #[test]
    fn signature_is_sound(state in 0u64..(1 << 18)) {
        let shape = LatticeShape::grid(3, 2).unwrap();
        let x = BitLatticeTuple::from_state(shape, state).unwrap();
        let sig = slice_coloring(&x, 0).unwrap();
        for (i, part) in sig.slice_partitions().iter().enumerate() {
            let a = x.slice_value(0, i, 0).unwrap();
            let b = x.slice_value(0, i, 1).unwrap();
            prop_assert_eq!(part.same_block(0, 1), a == b);
        }
        let label = classify(&x, 0).unwrap();
        let distinct = x.member(0).unwrap() != x.member(1).unwrap();
        let all_split = sig.is_all_identity();
        let expected = match (distinct, all_split) {
            (false, _) => RegionLabel::Ident,
            (true, true) => RegionLabel::Safe,
            (true, false) => RegionLabel::Coll,
        };
        prop_assert_eq!(label, expected);
    }
}

#[test]
fn census_formula_matches_enumeration() {
    for (d, s, k) in [(2, 2, 1), (2, 2, 2), (2, 2, 3), (2, 3, 1), (2, 3, 2), (3, 2, 2)] {
        let shape = LatticeShape::new(d, s, k).unwrap();
        let a = census_by_enumeration(&shape, 24).unwrap();
        let b = census_by_formula(&shape).unwrap();
        assert_eq!((a.safe, a.coll, a.ident), (b.safe, b.coll, b.ident), "{shape}");
        assert_eq!(a.total(), 1u128 << shape.bits());
    }
}

#[test]
fn operators_are_stochastic() {
    let sp = StateSpace::new(LatticeShape::grid(2, 3).unwrap()).unwrap();
    let ones = sp.indicator(|_| true);
    let kinds = [
        OperatorKind::rows(),
        OperatorKind::columns(),
        OperatorKind::GlobalWalk,
        OperatorKind::Composition(OperatorKind::mixing_sequence(2)),
    ];
    for kind in &kinds {
        let image = sp.apply(kind, &ones).unwrap();
        assert!(image.max_abs_diff(&ones) < 1e-12, "{}", kind.label());
    }
    for x in [0u64, 0x123, 0xabc, 0xfff] {
        let p = sp.push_forward(x, &OperatorKind::mixing_sequence(2)).unwrap();
        assert!((p.sum() - 1.0).abs() < 1e-12);
        assert!(p.values().iter().all(|&v| v >= -1e-15));
    }
}
