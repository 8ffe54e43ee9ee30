//! Criterion benchmarks for the prover live in `benches/`; this crate has no
//! library code of its own.
