//! Criterion benchmarks for orthlab-core; see `benches/`.
