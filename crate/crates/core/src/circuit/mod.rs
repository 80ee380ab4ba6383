//! Random reversible circuits of 3-bit gates: 1-D brickwork, axis-parallel
//! layers over lattice slices, and the recursive D-dimensional construction.

mod gate;
mod sampler;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{hyperplane_sites, line_sites, BitLatticeTuple, LatticeShape};
use crate::rng::RngSeed;

pub use gate::Gate3;
pub use sampler::LatticeCircuitSampler;

/// Version tag of the JSON circuit document.
pub const CIRCUIT_SCHEMA_VERSION: u32 = 1;

/// Which sub-lattices an axis-parallel layer acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceKind {
    /// The `side` slices `coord[axis] == i`, each of `side^{dims-1}` sites.
    Hyperplane,
    /// The `side^{dims-1}` lines running along `axis`, each of `side` sites.
    Line,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum CircuitSpec {
    /// Layers of gates on `width` wires; gates within a layer touch disjoint wires.
    Base1d { width: usize, layers: Vec<Vec<Gate3>> },
    /// One sub-circuit per slice of a `dims`-dimensional lattice, run side by side.
    /// Child `i` sees the sites of slice `i` in row-major order as its wires.
    AxisParallel {
        dims: u32,
        side: u32,
        axis: usize,
        slices: SliceKind,
        children: Vec<CircuitSpec>,
    },
    /// Children applied first to last.
    Sequence { children: Vec<CircuitSpec> },
}

/// Site lists of the slices an axis-parallel layer acts on.
pub(crate) fn slice_site_lists(dims: u32, side: u32, axis: usize, slices: SliceKind) -> Vec<Vec<usize>> {
    match slices {
        SliceKind::Hyperplane => (0..side as usize)
            .map(|i| hyperplane_sites(dims, side, axis, i))
            .collect(),
        SliceKind::Line => (0..(side as usize).pow(dims - 1))
            .map(|f| line_sites(dims, side, axis, f))
            .collect(),
    }
}

/// Wire triples of one brickwork layer: triples from wire 0 on even layers,
/// from wire 1 on odd layers; leftover boundary wires idle.
pub fn brickwork_triples(width: usize, layer: usize) -> Vec<[u32; 3]> {
    let offset = layer % 2;
    (0..)
        .map(|i| offset + 3 * i)
        .take_while(|&start| start + 3 <= width)
        .map(|s| [s as u32, s as u32 + 1, s as u32 + 2])
        .collect()
}

/// A 1-D brickwork circuit with freshly sampled gates, drawn layer by layer from `rng`.
pub fn build_brickwork_1d<R: Rng + ?Sized>(width: usize, layers: usize, rng: &mut R) -> Result<CircuitSpec> {
    if width < 3 {
        return Err(Error::domain(format!("brickwork needs at least 3 wires, got {width}")));
    }
    if layers == 0 {
        return Err(Error::domain("brickwork needs at least one layer"));
    }
    let layers = (0..layers)
        .map(|l| {
            brickwork_triples(width, l)
                .into_iter()
                .map(|w| Gate3::sample(rng, w))
                .collect()
        })
        .collect();
    Ok(CircuitSpec::Base1d { width, layers })
}

/// `(2t+1)^{dims-1} · base_layers`, the depth of [`build_lattice_circuit`].
pub fn predicted_depth(dims: u32, t: usize, base_layers: usize) -> Result<u64> {
    if dims < 1 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let per_level = 2 * t as u64 + 1;
    per_level
        .checked_pow(dims - 1)
        .and_then(|f| f.checked_mul(base_layers as u64))
        .ok_or_else(|| Error::capacity("predicted depth overflows u64"))
}

/// Heuristic layer count `ceil(c · width · (k + log2 width))` for the 1-D base
/// circuit; a tunable stand-in, not a proven mixing time.
pub fn suggested_layers(width: usize, k: u32, c: f64) -> usize {
    let w = width.max(2) as f64;
    (c * w * (k as f64 + w.log2())).ceil().max(1.0) as usize
}

/// Parameters of the recursive lattice construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCircuitParams {
    pub dims: u32,
    pub side: u32,
    pub t: usize,
    pub base_layers: usize,
}

impl LatticeCircuitParams {
    pub fn new(dims: u32, side: u32, t: usize, base_layers: usize) -> Result<Self> {
        if dims < 2 {
            return Err(Error::domain(format!("lattice circuits need dims ≥ 2, got {dims}")));
        }
        if side < 3 {
            return Err(Error::domain(format!(
                "side {side} is too short for a 3-bit brickwork line"
            )));
        }
        if base_layers == 0 {
            return Err(Error::domain("base_layers must be positive"));
        }
        LatticeShape::new(dims, side, 1)?;
        predicted_depth(dims, t, base_layers)?;
        Ok(LatticeCircuitParams {
            dims,
            side,
            t,
            base_layers,
        })
    }

    pub fn wires(&self) -> usize {
        (self.side as usize).pow(self.dims)
    }

    pub fn predicted_depth(&self) -> u64 {
        predicted_depth(self.dims, self.t, self.base_layers).expect("checked at construction")
    }
}

/// The recursive construction. A 1-D level is a brickwork line. A level of
/// dimension `d ≥ 2` is `2t+1` layers alternating, starting and ending with
/// slices along axis 0 (each a level of dimension `d−1`), with lines along
/// axis 0 in between (each a brickwork line as deep as one level `d−1`
/// circuit, so every layer of level `d` has equal depth).
///
/// Layer `j` uses stream `seed.child(j)` and its slice `i` uses
/// `seed.child(j).child(i)`, so sampling order and thread count do not matter.
pub fn build_lattice_circuit(params: &LatticeCircuitParams, seed: RngSeed) -> Result<CircuitSpec> {
    build_level(params.dims, params, seed)
}

fn build_level(dims: u32, p: &LatticeCircuitParams, seed: RngSeed) -> Result<CircuitSpec> {
    if dims == 1 {
        return build_brickwork_1d(p.side as usize, p.base_layers, &mut seed.rng());
    }
    let line_layers = predicted_depth(dims - 1, p.t, p.base_layers)? as usize;
    let layers = (0..2 * p.t + 1)
        .map(|j| {
            let layer_seed = seed.child(j as u64);
            if j % 2 == 0 {
                let children = (0..p.side as u64)
                    .into_par_iter()
                    .map(|i| build_level(dims - 1, p, layer_seed.child(i)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(CircuitSpec::AxisParallel {
                    dims,
                    side: p.side,
                    axis: 0,
                    slices: SliceKind::Hyperplane,
                    children,
                })
            } else {
                let lines = (p.side as u64).pow(dims - 1);
                let children = (0..lines)
                    .into_par_iter()
                    .map(|f| build_brickwork_1d(p.side as usize, line_layers, &mut layer_seed.child(f).rng()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(CircuitSpec::AxisParallel {
                    dims,
                    side: p.side,
                    axis: 0,
                    slices: SliceKind::Line,
                    children,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CircuitSpec::Sequence { children: layers })
}

impl CircuitSpec {
    /// Number of wires, or `None` for an empty sequence (which fits any width).
    pub fn width(&self) -> Option<usize> {
        match self {
            CircuitSpec::Base1d { width, .. } => Some(*width),
            CircuitSpec::AxisParallel { dims, side, .. } => Some((*side as usize).pow(*dims)),
            CircuitSpec::Sequence { children } => children.iter().find_map(|c| c.width()),
        }
    }

    /// Layer count of the base circuits, summed along sequences and maximized across parallel slices.
    pub fn depth(&self) -> u64 {
        match self {
            CircuitSpec::Base1d { layers, .. } => layers.len() as u64,
            CircuitSpec::AxisParallel { children, .. } => children.iter().map(|c| c.depth()).max().unwrap_or(0),
            CircuitSpec::Sequence { children } => children.iter().map(|c| c.depth()).sum(),
        }
    }

    pub fn gate_count(&self) -> usize {
        match self {
            CircuitSpec::Base1d { layers, .. } => layers.iter().map(|l| l.len()).sum(),
            CircuitSpec::AxisParallel { children, .. } | CircuitSpec::Sequence { children } => {
                children.iter().map(|c| c.gate_count()).sum()
            }
        }
    }

    /// The inverse circuit: order reversed at every level, every table inverted.
    pub fn invert(&self) -> CircuitSpec {
        match self {
            CircuitSpec::Base1d { width, layers } => CircuitSpec::Base1d {
                width: *width,
                layers: layers
                    .iter()
                    .rev()
                    .map(|l| l.iter().map(|g| g.inverse()).collect())
                    .collect(),
            },
            CircuitSpec::AxisParallel {
                dims,
                side,
                axis,
                slices,
                children,
            } => CircuitSpec::AxisParallel {
                dims: *dims,
                side: *side,
                axis: *axis,
                slices: *slices,
                children: children.iter().map(|c| c.invert()).collect(),
            },
            CircuitSpec::Sequence { children } => CircuitSpec::Sequence {
                children: children.iter().rev().map(|c| c.invert()).collect(),
            },
        }
    }

    /// Checks gate tables, wire ranges, slice widths, and that no wire is used
    /// twice within one layer.
    pub fn validate(&self) -> Result<()> {
        match self {
            CircuitSpec::Base1d { width, layers } => {
                for (li, layer) in layers.iter().enumerate() {
                    let mut used = vec![false; *width];
                    for g in layer {
                        g.validate()?;
                        for &w in &g.wires {
                            let w = w as usize;
                            if w >= *width {
                                return Err(Error::domain(format!("layer {li}: wire {w} outside width {width}")));
                            }
                            if std::mem::replace(&mut used[w], true) {
                                return Err(Error::domain(format!("layer {li}: wire {w} used by two gates")));
                            }
                        }
                    }
                }
                Ok(())
            }
            CircuitSpec::AxisParallel {
                dims,
                side,
                axis,
                slices,
                children,
            } => {
                LatticeShape::new(*dims, *side, 1)?.check_axis(*axis)?;
                let lists = slice_site_lists(*dims, *side, *axis, *slices);
                if lists.len() != children.len() {
                    return Err(Error::domain(format!(
                        "{} children for {} slices",
                        children.len(),
                        lists.len()
                    )));
                }
                for (c, sites) in children.iter().zip(&lists) {
                    if let Some(w) = c.width() {
                        if w != sites.len() {
                            return Err(Error::domain(format!(
                                "child of width {w} on a slice of {} sites",
                                sites.len()
                            )));
                        }
                    }
                    c.validate()?;
                }
                Ok(())
            }
            CircuitSpec::Sequence { children } => {
                let width = self.width();
                for c in children {
                    if c.width().is_some() && c.width() != width {
                        return Err(Error::domain("sequence children differ in width"));
                    }
                    c.validate()?;
                }
                Ok(())
            }
        }
    }

    /// Flattens to time-ordered layers of gates on global wire indices.
    pub fn compile(&self) -> CompiledCircuit {
        let width = self.width().unwrap_or(0);
        let wires: Vec<u32> = (0..width as u32).collect();
        let mut layers = Vec::new();
        self.flatten_into(&wires, &mut layers, 0);
        CompiledCircuit { width, layers }
    }

    // Appends this circuit's layers starting at `start`; returns the layer after the last one.
    fn flatten_into(&self, wires: &[u32], layers: &mut Vec<Vec<Gate3>>, start: usize) -> usize {
        match self {
            CircuitSpec::Base1d { layers: own, .. } => {
                for (i, layer) in own.iter().enumerate() {
                    if layers.len() <= start + i {
                        layers.push(Vec::new());
                    }
                    layers[start + i].extend(layer.iter().map(|g| g.on_wires(g.wires.map(|w| wires[w as usize]))));
                }
                start + own.len()
            }
            CircuitSpec::AxisParallel {
                dims,
                side,
                axis,
                slices,
                children,
            } => {
                let lists = slice_site_lists(*dims, *side, *axis, *slices);
                let mut end = start;
                for (c, sites) in children.iter().zip(&lists) {
                    let sub: Vec<u32> = sites.iter().map(|&s| wires[s]).collect();
                    end = end.max(c.flatten_into(&sub, layers, start));
                }
                while layers.len() < end {
                    layers.push(Vec::new());
                }
                end
            }
            CircuitSpec::Sequence { children } => {
                children.iter().fold(start, |at, c| c.flatten_into(wires, layers, at))
            }
        }
    }

    /// Applies the circuit to a single lattice (`k = 1`).
    pub fn apply(&self, x: &BitLatticeTuple) -> Result<BitLatticeTuple> {
        if x.shape().k() != 1 {
            return Err(Error::domain("apply takes a single lattice; use apply_tuple for k > 1"));
        }
        self.apply_tuple(x)
    }

    /// Applies the same circuit to every member of the tuple.
    pub fn apply_tuple(&self, x: &BitLatticeTuple) -> Result<BitLatticeTuple> {
        self.compile().apply_tuple(x)
    }

    pub fn to_document(&self, generator: Option<CircuitGenerator>) -> CircuitDocument {
        CircuitDocument {
            schema_version: CIRCUIT_SCHEMA_VERSION,
            generator,
            circuit: self.clone(),
        }
    }
}

/// Time-ordered gate layers on global wires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledCircuit {
    pub width: usize,
    pub layers: Vec<Vec<Gate3>>,
}

impl CompiledCircuit {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate3> {
        self.layers.iter().flatten()
    }

    /// Applies the circuit to a lattice packed in one word (`width ≤ 64`).
    pub fn apply_word(&self, x: u64) -> u64 {
        self.gates().fold(x, |acc, g| g.apply_word(acc))
    }

    pub fn apply_tuple(&self, x: &BitLatticeTuple) -> Result<BitLatticeTuple> {
        let n = x.shape().n();
        if self.width != 0 && self.width != n {
            return Err(Error::domain(format!(
                "circuit of width {} applied to a lattice of {n} sites",
                self.width
            )));
        }
        let k = x.shape().k() as usize;
        let mut words = x.words().to_vec();
        for g in self.gates() {
            for ell in 0..k {
                g.apply_strided(&mut words, k, ell);
            }
        }
        let mut out = BitLatticeTuple::new(*x.shape());
        for flat in 0..x.shape().bits() {
            if (words[flat / 64] >> (flat % 64)) & 1 == 1 {
                out.set(flat, true);
            }
        }
        Ok(out)
    }

    /// The full permutation on `2^width` inputs (`width ≤ 24`).
    pub fn permutation(&self) -> Result<Vec<u32>> {
        if self.width > 24 {
            return Err(Error::capacity("permutation tables limited to 24 wires"));
        }
        Ok((0..1u64 << self.width)
            .into_par_iter()
            .map(|x| self.apply_word(x) as u32)
            .collect())
    }
}

/// How a circuit was sampled, kept alongside it for reproducibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitGenerator {
    pub params: LatticeCircuitParams,
    pub seed: RngSeed,
}

/// Versioned JSON form of a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitDocument {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<CircuitGenerator>,
    pub circuit: CircuitSpec,
}

impl CircuitDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit documents always serialize")
    }

    /// Parses and validates a document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CircuitDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.schema_version != CIRCUIT_SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported circuit schema version {}",
                doc.schema_version
            )));
        }
        doc.circuit.validate()?;
        Ok(doc)
    }
}
