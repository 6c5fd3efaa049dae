//! Criterion benchmarks for the symbol engine live in `benches/`.
