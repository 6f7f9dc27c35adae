//! Criterion benchmarks for solharm-core; see `benches/`.
