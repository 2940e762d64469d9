//! Benchmarks for sphere-kernels; see `benches/`.
