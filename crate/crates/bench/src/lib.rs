//! Benchmark-only crate; the targets live in `benches/hot_paths.rs`.
//! Run with `cargo bench -p projlog-bench`.
