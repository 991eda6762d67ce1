//! Benchmark harness crate; see `benches/partitioning.rs`.
