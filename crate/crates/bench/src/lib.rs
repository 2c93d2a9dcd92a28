//! Criterion benchmarks for the `qsl-core` kernels live in `benches/`.
