//! The parallel batch-dynamic coloring algorithm.
//!
//! A batch runs in four stages: structural changes and uncoloring of one
//! endpoint per monochromatic inserted edge; recoloring level by level from
//! λ down to 5, marked vertices before unmarked ones; raising upper-marked
//! vertices from λ down; lowering lower-marked vertices from 5 up.

mod coloring;
mod init;
pub mod metrics;
pub(crate) mod moving;
pub mod normalize;

use std::collections::BTreeSet;

use crate::conditions::TokenLedger;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::framework::{Op, Tag, UpdateRequest};
use crate::graph::{ColorId, GraphState, Level, Timestamp, VertexId};
use crate::rng::{Phase, RoundKey};

pub use metrics::{BatchMetrics, DropCounts, LevelStats, LowerRound, RaiseRound, RecordEntry, WorkCounters};
pub use normalize::{normalize, EdgeOp, EdgeUpdate, EdgeView, Normalized};

pub(crate) use init::edge_requests;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UpdaterConfig {
    pub exec: Exec,
    /// Recount Γ after every move round and check all invariants after
    /// every batch. Quadratic-ish; for tests.
    pub audit: bool,
}

/// Points inside a batch at which [`BatchUpdater::apply_batch_probed`]
/// hands the state to an observer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    AfterInit,
    AfterColoring(Level),
    AfterRaise(Level),
    AfterLower(Level),
}

pub struct BatchUpdater {
    g: GraphState,
    ledger: TokenLedger,
    cfg: UpdaterConfig,
}

impl BatchUpdater {
    pub fn new(n: usize, delta: u32, seed: u64, cfg: UpdaterConfig) -> Result<Self> {
        let g = GraphState::new(n, delta, seed)?;
        let ledger = TokenLedger::from_state(&g);
        Ok(BatchUpdater { g, ledger, cfg })
    }

    pub fn graph(&self) -> &GraphState {
        &self.g
    }

    pub fn ledger(&self) -> &TokenLedger {
        &self.ledger
    }

    pub fn config(&self) -> UpdaterConfig {
        self.cfg
    }

    pub fn set_exec(&mut self, exec: Exec) {
        self.cfg.exec = exec;
    }

    pub fn apply_batch(&mut self, raw: &[EdgeUpdate]) -> Result<BatchMetrics> {
        self.apply_batch_probed(raw, &mut |_, _| {})
    }

    pub fn apply_batch_probed(
        &mut self,
        raw: &[EdgeUpdate],
        probe: &mut dyn FnMut(&GraphState, Stage),
    ) -> Result<BatchMetrics> {
        let norm = normalize(&self.g, raw)?;
        self.g.batches += 1;
        let batch = self.g.batches;
        let mut m = BatchMetrics { batch, applied: norm.updates.len(), dropped: norm.dropped, ..Default::default() };
        let lambda = self.g.lambda();
        let levels_down: Vec<Level> = self.g.levels_range().rev().collect();
        let mut cx = Ctx {
            g: &mut self.g,
            ledger: &mut self.ledger,
            m: &mut m,
            exec: self.cfg.exec,
            audit: self.cfg.audit,
            batch,
            chain_starts: BTreeSet::new(),
        };

        init::init_phase(&mut cx, &norm.updates)?;
        probe(cx.g, Stage::AfterInit);

        for &i in &levels_down {
            cx.m.work.overhead += 1;
            coloring::color_marked(&mut cx, i)?;
            coloring::color_unmarked(&mut cx, i)?;
            probe(cx.g, Stage::AfterColoring(i));
        }

        let upper_snapshot = moving::snapshot_upper(cx.g);
        for &i in &levels_down {
            cx.m.work.overhead += 1;
            moving::raise_level(&mut cx, i, &upper_snapshot)?;
            probe(cx.g, Stage::AfterRaise(i));
        }

        for i in cx.g.levels_range() {
            cx.m.work.overhead += 1;
            moving::lower_level(&mut cx, i)?;
            probe(cx.g, Stage::AfterLower(i));
        }
        debug_assert!(lambda == cx.g.lambda());

        if !cx.g.marks().is_empty() {
            return Err(Error::invariant("mark sets not empty at the end of a batch"));
        }
        if cx.audit {
            cx.g.check_invariants()?;
            for u in 0..cx.g.n() as VertexId {
                let Some(c) = cx.g.color(u) else {
                    return Err(Error::invariant(format!("vertex {u} left uncolored")));
                };
                if let Some(v) = cx.g.neighbors(u).find(|&v| cx.g.color(v) == Some(c)) {
                    return Err(Error::invariant(format!("edge {u}-{v} is monochromatic")));
                }
            }
            check_ledger(cx.ledger, cx.g)?;
        }
        m.gamma_sixths = self.ledger.gamma_sixths();
        m.tidy();
        Ok(m)
    }
}

fn check_ledger(ledger: &TokenLedger, g: &GraphState) -> Result<()> {
    ledger
        .check(g)
        .map_err(|(kept, brute)| Error::invariant(format!("ledger holds {kept} sixths, recount gives {brute}")))
}

/// Mutable view of one batch in progress.
pub(crate) struct Ctx<'a> {
    pub g: &'a mut GraphState,
    pub ledger: &'a mut TokenLedger,
    pub m: &'a mut BatchMetrics,
    pub exec: Exec,
    pub audit: bool,
    pub batch: u64,
    /// Vertices uncolored by inserted edges in this batch.
    pub chain_starts: BTreeSet<VertexId>,
}

impl Ctx<'_> {
    pub fn key(&self, phase: Phase, round: u64) -> RoundKey {
        RoundKey { seed: self.g.seed(), batch: self.batch, phase, round }
    }

    pub fn audit_ledger(&self) -> Result<()> {
        if self.audit {
            check_ledger(self.ledger, self.g)?;
        }
        Ok(())
    }
}

/// Requests that give `u` color `c` and timestamp `ts`, and record the color
/// at every neighbor that counts `u` as an up-neighbor.
pub(crate) fn color_requests(g: &GraphState, u: VertexId, c: ColorId, ts: Timestamp) -> Vec<UpdateRequest> {
    let mut out = vec![
        UpdateRequest::vertex(u, Tag::Chi, Op::SetColor(Some(c))),
        UpdateRequest::vertex(u, Tag::Timestamp, Op::SetTimestamp(ts)),
    ];
    for v in g.same_or_lower(u) {
        out.push(UpdateRequest::vertex(v, Tag::Counter(c), Op::Increment));
        out.push(UpdateRequest::vertex(v, Tag::Palette, Op::MoveUp(c)));
    }
    out
}

/// Requests that blank `u` and withdraw its color from the counters of the
/// neighbors that count it.
pub(crate) fn uncolor_requests(g: &GraphState, u: VertexId) -> Vec<UpdateRequest> {
    let mut out = vec![UpdateRequest::vertex(u, Tag::Chi, Op::SetColor(None))];
    if let Some(c) = g.color(u) {
        out.extend(g.same_or_lower(u).map(|v| UpdateRequest::vertex(v, Tag::Counter(c), Op::Decrement)));
    }
    out
}

#[cfg(test)]
mod tests;
