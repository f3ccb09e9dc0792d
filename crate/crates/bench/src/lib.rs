//! Criterion benchmarks for the descent engine live in `benches/`.
