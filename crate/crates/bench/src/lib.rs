//! Criterion benchmarks for the hystwave core; see `benches/`.
