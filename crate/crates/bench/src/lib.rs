//! Criterion benchmarks for the latticeperm kernels; see `benches/`.
