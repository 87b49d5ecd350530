//! Criterion benchmarks for the robinfem pipeline; see `benches/pipeline.rs`.
