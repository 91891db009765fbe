//! Benchmarks for `tentflex`; see `benches/`.
