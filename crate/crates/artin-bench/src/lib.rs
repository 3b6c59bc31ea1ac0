//! Benchmark-only crate; see `benches/pipeline.rs` for the suite covering
//! exact correction factors, the coefficient recursion, Kummer degrees, and
//! the segmented order sieve.
