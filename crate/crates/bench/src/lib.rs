//! Criterion benchmarks for `fixpoint-core`; see `benches/`.
