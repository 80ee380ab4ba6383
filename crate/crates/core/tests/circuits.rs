//! Whole-circuit properties: inversion, per-member action, determinism, serialization.

use latticeperm::circuit::{CircuitDocument, CompiledCircuit};
use latticeperm::{build_lattice_circuit, BitLatticeTuple, LatticeCircuitParams, LatticeShape, RngSeed};
use rand::Rng;

fn circuit(dims: u32, side: u32, t: usize, seed: u64) -> latticeperm::CircuitSpec {
    let p = LatticeCircuitParams::new(dims, side, t, 4).unwrap();
    build_lattice_circuit(&p, RngSeed::new(seed)).unwrap()
}

#[test]
fn inverse_undoes_circuit_on_random_inputs() {
    for (dims, side) in [(2, 5), (2, 8), (3, 4)] {
        let c = circuit(dims, side, 1, 11);
        let (fwd, back): (CompiledCircuit, CompiledCircuit) = (c.compile(), c.invert().compile());
        let mask = if fwd.width == 64 {
            u64::MAX
        } else {
            (1u64 << fwd.width) - 1
        };
        let mut rng = RngSeed::new(12).rng();
        for _ in 0..10_000 {
            let x = rng.gen::<u64>() & mask;
            assert_eq!(back.apply_word(fwd.apply_word(x)), x);
            assert_eq!(fwd.apply_word(back.apply_word(x)), x);
        }
    }
}

#[test]
fn tuple_action_is_per_member() {
    let c = circuit(2, 3, 1, 21);
    let shape = LatticeShape::grid(3, 3).unwrap();
    let mut rng = RngSeed::new(22).rng();
    for _ in 0..200 {
        let members: Vec<BitLatticeTuple> = (0..3)
            .map(|_| BitLatticeTuple::from_state(LatticeShape::grid(3, 1).unwrap(), rng.gen_range(0..512)).unwrap())
            .collect();
        let x = BitLatticeTuple::from_members(&members).unwrap();
        assert_eq!(x.shape(), &shape);
        let y = c.apply_tuple(&x).unwrap();
        for (l, m) in members.iter().enumerate() {
            assert_eq!(y.member(l).unwrap(), c.apply(m).unwrap());
        }
    }
}

#[test]
fn same_seed_same_circuit() {
    assert_eq!(circuit(3, 3, 2, 5), circuit(3, 3, 2, 5));
    assert_ne!(circuit(3, 3, 2, 5), circuit(3, 3, 2, 6));
}

#[test]
fn document_round_trip_preserves_action() {
    let c = circuit(2, 4, 1, 31);
    let text = c.to_document(None).to_json();
    let doc = CircuitDocument::from_json(&text).unwrap();
    assert_eq!(doc.circuit, c);
    let (a, b) = (c.compile(), doc.circuit.compile());
    for x in [0u64, 1, 0xbeef, 0xffff] {
        assert_eq!(a.apply_word(x), b.apply_word(x));
    }
    assert!(CircuitDocument::from_json(&text.replace("\"table\"", "\"tabel\"")).is_err());
}
