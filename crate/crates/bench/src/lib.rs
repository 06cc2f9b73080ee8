//! Benchmarks for the constants and spectral routines; see `benches/`.
