//! Criterion benchmarks for the `newton-ensemble` core crate; see `benches/`.
