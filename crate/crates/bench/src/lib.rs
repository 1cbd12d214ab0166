//! Criterion benchmarks for inference and simulation throughput.
