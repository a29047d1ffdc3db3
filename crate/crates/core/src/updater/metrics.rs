use serde::Serialize;

use crate::graph::{Level, VertexId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WorkCounters {
    pub init: u64,
    pub color_marked: u64,
    pub color_unmarked: u64,
    pub raise: u64,
    pub lower: u64,
    /// Per-level loop overhead of the three passes.
    pub overhead: u64,
}

impl WorkCounters {
    pub fn total(&self) -> u64 {
        self.init + self.color_marked + self.color_unmarked + self.raise + self.lower + self.overhead
    }

    pub fn add(&mut self, other: &WorkCounters) {
        self.init += other.init;
        self.color_marked += other.color_marked;
        self.color_unmarked += other.color_unmarked;
        self.raise += other.raise;
        self.lower += other.lower;
        self.overhead += other.overhead;
    }
}

/// Ops removed by normalization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DropCounts {
    pub self_loops: u64,
    pub duplicates: u64,
    pub cancelled: u64,
    pub noops: u64,
}

impl DropCounts {
    pub fn total(&self) -> u64 {
        self.self_loops + self.duplicates + self.cancelled + self.noops
    }

    pub fn add(&mut self, other: &DropCounts) {
        self.self_loops += other.self_loops;
        self.duplicates += other.duplicates;
        self.cancelled += other.cancelled;
        self.noops += other.noops;
    }
}

/// Activity at one level during one batch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub level: Level,
    pub marked_upper: usize,
    pub marked_lower: usize,
    pub unmarked: usize,
    pub rounds_marked: u64,
    pub rounds_unmarked: u64,
    pub rounds_raise: u64,
    pub rounds_lower: u64,
}

impl LevelStats {
    fn is_quiet(&self) -> bool {
        *self == LevelStats { level: self.level, ..Default::default() }
    }
}

/// One sample-filter-move round of the raising loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RaiseRound {
    pub level: Level,
    pub target: Level,
    /// Vertices for which the level predicate held.
    pub active: usize,
    pub moved: usize,
    pub drop_sixths: i64,
}

/// One sample-filter-move round of the lowering loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LowerRound {
    pub level: Level,
    pub active: usize,
    pub moved: usize,
    pub drop_sixths: i64,
}

/// One recoloring of one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RecordEntry {
    pub vertex: VertexId,
    pub batch: u64,
    pub level: Level,
    pub dirty: bool,
    pub base_level: Level,
    /// The vertex was uncolored by an inserted edge, not by a neighbor.
    pub chain_start: bool,
    /// The new color was blank, so no further vertex was uncolored.
    pub chain_end: bool,
}

impl RecordEntry {
    /// Clean chain starts and dirty chain ends.
    pub fn is_important(&self) -> bool {
        (self.chain_start && !self.dirty) || (self.chain_end && self.dirty)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BatchMetrics {
    pub batch: u64,
    pub applied: usize,
    pub dropped: DropCounts,
    pub work: WorkCounters,
    pub blank_initial: usize,
    pub recolored: usize,
    pub uncolored_unique: usize,
    pub levels: Vec<LevelStats>,
    pub injected_sixths: i64,
    pub released_sixths: i64,
    pub gamma_sixths: i64,
    pub raise_rounds: Vec<RaiseRound>,
    pub lower_rounds: Vec<LowerRound>,
    pub records: Vec<RecordEntry>,
    /// Unmoved raise candidates left with |N_u(5, i)| > 3^i.
    pub raise_residual_violations: usize,
    /// Marked vertices whose classification changed before their level was processed.
    pub mark_stability_violations: usize,
    /// Lower-marked vertices dropped because moves of others fixed them.
    pub lower_refiltered: usize,
}

impl BatchMetrics {
    pub(crate) fn level_mut(&mut self, level: Level) -> &mut LevelStats {
        match self.levels.iter().position(|s| s.level == level) {
            Some(k) => &mut self.levels[k],
            None => {
                self.levels.push(LevelStats { level, ..Default::default() });
                self.levels.last_mut().unwrap()
            }
        }
    }

    pub(crate) fn tidy(&mut self) {
        self.levels.retain(|s| !s.is_quiet());
        self.levels.sort_by_key(|s| s.level);
    }

    pub fn total_work(&self) -> u64 {
        self.work.total()
    }
}
