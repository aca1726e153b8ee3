//! Criterion benchmarks for the rwrs laboratory; see `benches/`.
