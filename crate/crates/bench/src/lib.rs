//! Criterion benchmarks for `nlwalk-core`; see `benches/`.
