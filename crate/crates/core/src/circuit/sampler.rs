//! Sample-and-apply without materializing the circuit, for Monte Carlo loops.

use super::{brickwork_triples, predicted_depth, slice_site_lists, Gate3, LatticeCircuitParams, SliceKind};
use crate::error::{Error, Result};
use crate::rng::RngSeed;

/// One brickwork line of the construction: its seed path and gate positions on global wires.
#[derive(Debug, Clone)]
struct Block {
    path: Vec<u64>,
    layers: Vec<Vec<[u32; 3]>>,
}

/// Draws the gates of `build_lattice_circuit(params, seed)` in the same
/// order from the same streams and applies them on the fly, so
/// `sample_apply(seed, xs)` equals building that circuit and applying it.
/// Lattices are packed one per `u64`, so `side^dims ≤ 64`.
#[derive(Debug, Clone)]
pub struct LatticeCircuitSampler {
    params: LatticeCircuitParams,
    blocks: Vec<Block>,
}

impl LatticeCircuitSampler {
    pub fn new(params: LatticeCircuitParams) -> Result<Self> {
        if params.wires() > 64 {
            return Err(Error::capacity(format!(
                "streaming sampler packs lattices in 64 bits; {} sites requested",
                params.wires()
            )));
        }
        let wires: Vec<u32> = (0..params.wires() as u32).collect();
        let mut blocks = Vec::new();
        plan_level(params.dims, &params, Vec::new(), &wires, &mut blocks)?;
        Ok(LatticeCircuitSampler { params, blocks })
    }

    pub fn params(&self) -> &LatticeCircuitParams {
        &self.params
    }

    /// Keeps only the first `layers` top-level layers. The kept gates are
    /// still drawn from the streams of the full construction.
    pub fn truncated(mut self, layers: u64) -> Self {
        self.blocks.retain(|b| b.path[0] < layers);
        self
    }

    /// Samples one circuit from `seed` and applies it to every lattice in `xs`.
    pub fn sample_apply(&self, seed: RngSeed, xs: &mut [u64]) {
        for block in &self.blocks {
            let stream = block.path.iter().fold(seed, |s, &c| s.child(c));
            let mut rng = stream.rng();
            for layer in &block.layers {
                for &wires in layer {
                    let g = Gate3::sample(&mut rng, wires);
                    for x in xs.iter_mut() {
                        *x = g.apply_word(*x);
                    }
                }
            }
        }
    }
}

fn brickwork_block(side: usize, layers: usize, wires: &[u32], path: Vec<u64>) -> Block {
    Block {
        path,
        layers: (0..layers)
            .map(|l| {
                brickwork_triples(side, l)
                    .into_iter()
                    .map(|t| t.map(|w| wires[w as usize]))
                    .collect()
            })
            .collect(),
    }
}

fn plan_level(dims: u32, p: &LatticeCircuitParams, path: Vec<u64>, wires: &[u32], out: &mut Vec<Block>) -> Result<()> {
    let side = p.side as usize;
    if dims == 1 {
        out.push(brickwork_block(side, p.base_layers, wires, path));
        return Ok(());
    }
    let line_layers = predicted_depth(dims - 1, p.t, p.base_layers)? as usize;
    for j in 0..2 * p.t as u64 + 1 {
        let kind = if j % 2 == 0 {
            SliceKind::Hyperplane
        } else {
            SliceKind::Line
        };
        for (i, sites) in slice_site_lists(dims, p.side, 0, kind).iter().enumerate() {
            let sub: Vec<u32> = sites.iter().map(|&s| wires[s]).collect();
            let mut child_path = path.clone();
            child_path.extend([j, i as u64]);
            match kind {
                SliceKind::Hyperplane => plan_level(dims - 1, p, child_path, &sub, out)?,
                SliceKind::Line => out.push(brickwork_block(side, line_layers, &sub, child_path)),
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::build_lattice_circuit;
    use super::*;

    #[test]
    fn streaming_matches_built_circuit() {
        for (dims, side, t, b) in [(2, 4, 0, 3), (2, 4, 2, 2), (3, 3, 1, 2), (2, 8, 1, 4)] {
            let p = LatticeCircuitParams::new(dims, side, t, b).unwrap();
            let sampler = LatticeCircuitSampler::new(p).unwrap();
            for s in 0..4 {
                let seed = RngSeed::new(11).child(s);
                let compiled = build_lattice_circuit(&p, seed).unwrap().compile();
                let mut xs = [0u64, 0x1234_5678_9abc_def0, u64::MAX, 0x0f0f];
                let mask = if p.wires() == 64 {
                    u64::MAX
                } else {
                    (1u64 << p.wires()) - 1
                };
                xs.iter_mut().for_each(|x| *x &= mask);
                let expect: Vec<u64> = xs.iter().map(|&x| compiled.apply_word(x)).collect();
                sampler.sample_apply(seed, &mut xs);
                assert_eq!(xs.to_vec(), expect, "dims {dims} side {side} t {t}");
            }
        }
    }

    #[test]
    fn refuses_wide_lattices() {
        let p = LatticeCircuitParams::new(2, 9, 1, 1).unwrap();
        assert!(matches!(LatticeCircuitSampler::new(p), Err(Error::Capacity(_))));
    }
}
