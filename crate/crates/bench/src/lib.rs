//! Criterion benchmarks for the kerr-phase kernels live in `benches/`.
