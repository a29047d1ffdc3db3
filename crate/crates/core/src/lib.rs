//! Batch-dynamic (Δ+1) vertex coloring.
//!
//! Vertices live on levels `5..=λ`. Each vertex keeps its neighbors split by
//! level, counters of the colors used by neighbors at its own level or above,
//! and a palette partitioned into an upper part (colors taken by those
//! neighbors) and a lower part. A batch of edge insertions and deletions is
//! applied by [`updater::BatchUpdater`], which recolors the endpoints of
//! monochromatic edges level by level and then moves vertices whose
//! neighborhood no longer fits their level.
//!
//! The crate also ships two baselines ([`baselines`]), a token ledger used to
//! audit the amortized analysis ([`conditions`]) and a replay harness with a
//! small text workload format ([`harness`]).

pub mod baselines;
pub mod conditions;
pub mod error;
pub mod exec;
pub mod framework;
pub mod graph;
pub mod harness;
pub mod palette;
pub mod partial;
pub mod rng;
pub mod updater;

pub use error::{Error, Result};
pub use graph::{ColorId, GraphState, Level, Timestamp, VertexId};
pub use updater::{BatchMetrics, BatchUpdater, EdgeOp, EdgeUpdate, UpdaterConfig};
