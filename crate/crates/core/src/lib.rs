//! Random reversible circuits on D-dimensional bit lattices, and an exact
//! laboratory for the idealized walks that model them.
//!
//! * [`lattice`], [`partition`], [`color`]: packed k-tuples of lattices, their
//!   per-slice equality patterns, and exact region sizes.
//! * [`walk`]: the idealized walks as class-mean operators, their identities,
//!   spectral norms, and collision probabilities.
//! * [`circuit`]: sampled 3-bit-gate circuits, from 1-D brickwork up to the
//!   recursive D-dimensional construction.
//! * [`mixing`]: exact and Monte Carlo distances to uniform on distinct tuples.

pub mod circuit;
pub mod color;
pub mod error;
pub mod lattice;
pub mod mixing;
pub mod partition;
pub mod rng;
pub mod stats;
pub mod walk;

pub use circuit::{build_lattice_circuit, predicted_depth, CircuitSpec, Gate3, LatticeCircuitParams};
pub use color::{
    classify, color_class_size, count_color_classes, region_census, slice_coloring, ClassCount, ColorSignature,
    RegionCensus, RegionLabel,
};
pub use error::{Error, Result};
pub use lattice::{BitLatticeTuple, LatticeShape, DEFAULT_ENUMERATION_BITS};
pub use mixing::{exact_tv_trajectory, TvTrajectory};
pub use partition::SetPartition;
pub use rng::RngSeed;
pub use walk::{OperatorKind, StateSpace, WalkVector};
