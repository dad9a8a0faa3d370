//! Criterion benchmarks for tdho-core live in `benches/`.
