//! Reference algorithms for differential testing and cost comparison.
//!
//! - [`folklore::FolkloreState`]: the parallel warmup that keeps a 2Δ
//!   coloring and recolors the blank vertices of each batch from scratch.
//! - [`relaxed::RelaxedSequential`]: the sequential (Δ+1) algorithm with
//!   levels, one edge at a time.
//! - [`greedy::greedy_static`]: first-fit (Δ+1) coloring of a static graph.

pub mod folklore;
pub mod greedy;
pub mod relaxed;

use serde::Serialize;

use crate::updater::DropCounts;

pub use folklore::FolkloreState;
pub use greedy::greedy_static;
pub use relaxed::RelaxedSequential;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BaselineKind {
    Folklore2Delta,
    RelaxedSequential,
    GreedyStatic,
}

impl BaselineKind {
    /// Number of colors the baseline may use.
    pub fn palette_size(self, delta: u32) -> u32 {
        match self {
            BaselineKind::Folklore2Delta => 2 * delta,
            _ => delta + 1,
        }
    }
}

/// What a baseline reports for one batch.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BaselineMetrics {
    pub batch: u64,
    pub applied: usize,
    pub dropped: DropCounts,
    pub blank_initial: usize,
    pub recolored: usize,
    pub rounds: u64,
    pub work: u64,
    /// Longest recoloring chain (relaxed baseline only).
    pub max_chain: usize,
    /// Level moves (relaxed baseline only).
    pub moves: usize,
}
