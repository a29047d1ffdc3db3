//! Workloads, replay, verification and benchmarking behind the CLI.
//!
//! Work is counted as elementary touches: every applied update request,
//! every adjacency entry scanned, every palette slot offered to a partial
//! coloring round, plus one unit per level visited by each pass. The
//! parallel algorithm splits this by phase in
//! [`crate::updater::WorkCounters`].

pub mod bench;
pub mod run;
pub mod verify;
pub mod workload;

pub use bench::{bench, BenchConfig, BenchPoint, BenchReport};
pub use run::{run, Algorithm, RunConfig, RunOutcome, RunReport, VerifyMode};
pub use verify::{verify_proper, ColoringView, Violation};
pub use workload::{emit_workload, generate_workload, parse_workload, GenConfig, Workload};
