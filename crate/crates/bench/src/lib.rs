//! Benchmarks for ezpath live under `benches/`.
