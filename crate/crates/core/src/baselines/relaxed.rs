//! The sequential (Δ+1) algorithm the parallel one relaxes.
//!
//! Updates are processed one edge at a time. A monochromatic insertion
//! uncolors its later endpoint x. If x is clean it samples from its blank
//! and unique colors and, on a unique color, passes the blank on to the one
//! lower neighbor holding it. If x is dirty it takes its first blank color
//! and moves to a level where it fits.
//!
//! The conditions here are the sequential ones: a vertex at level ℓ is
//! overfull above 3^ℓ neighbors at level ℓ or lower, and underfull below
//! 3^(ℓ−5) lower neighbors, the latter only from level 9 up.

use rand::Rng;

use crate::baselines::BaselineMetrics;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::framework::{barrier, RequestBuffer};
use crate::graph::{pow3, GraphState, Level, Timestamp, VertexId, BOTTOM_LEVEL};
use crate::palette::{build_blank_prefix, build_blank_unique_prefix};
use crate::rng::{stream, Phase};
use crate::updater::moving::{move_group_down, move_group_up, LOWER_STEP};
use crate::updater::{color_requests, edge_requests, normalize, uncolor_requests, EdgeOp, EdgeUpdate};

pub fn seq_violates_upper(g: &GraphState, u: VertexId) -> bool {
    let l = g.level(u);
    g.count_le(u, l) as u64 > pow3(l as u32)
}

pub fn seq_violates_lower(g: &GraphState, u: VertexId) -> bool {
    let l = g.level(u);
    l >= BOTTOM_LEVEL + LOWER_STEP && (g.below(u).len() as u64) < pow3((l - BOTTOM_LEVEL) as u32)
}

pub struct RelaxedSequential {
    g: GraphState,
    /// Single-edge updates processed so far.
    steps: u64,
}

impl RelaxedSequential {
    pub fn new(n: usize, delta: u32, seed: u64) -> Result<Self> {
        Ok(RelaxedSequential { g: GraphState::new(n, delta, seed)?, steps: 0 })
    }

    pub fn graph(&self) -> &GraphState {
        &self.g
    }

    /// Applies the batch as a sequence of single-edge updates, deletions
    /// first so no degree passes Δ in between. The batch is normalized first
    /// so drops are counted as for the other algorithms.
    pub fn apply_batch(&mut self, raw: &[EdgeUpdate]) -> Result<BaselineMetrics> {
        let mut norm = normalize(&self.g, raw)?;
        norm.updates.sort_by_key(|e| e.op != EdgeOp::Delete);
        let mut m = BaselineMetrics {
            batch: self.g.batches + 1,
            applied: norm.updates.len(),
            dropped: norm.dropped,
            ..Default::default()
        };
        for e in &norm.updates {
            self.update(e, &mut m)?;
        }
        Ok(m)
    }

    fn update(&mut self, e: &EdgeUpdate, m: &mut BaselineMetrics) -> Result<()> {
        self.steps += 1;
        self.g.batches += 1;
        let g = &self.g;
        let mono = e.op == EdgeOp::Insert && g.color(e.u).is_some() && g.color(e.u) == g.color(e.v);
        let x = crate::graph::later_endpoint(e.u, g.timestamp(e.u), e.v, g.timestamp(e.v));
        let mut buf = RequestBuffer::new();
        buf.push_list(e.u, edge_requests(g, e));
        m.work += barrier(&mut self.g, &mut buf)?.applied;
        if mono {
            m.blank_initial += 1;
            self.recolor(x, 1, m)?;
        }
        Ok(())
    }

    fn recolor(&mut self, u: VertexId, depth: usize, m: &mut BaselineMetrics) -> Result<()> {
        let lambda = self.g.lambda() as usize;
        if depth > lambda {
            return Err(Error::invariant(format!("recoloring chain deeper than λ = {lambda}")));
        }
        m.max_chain = m.max_chain.max(depth);
        m.recolored += 1;
        let mut buf = RequestBuffer::new();
        buf.push_list(u, uncolor_requests(&self.g, u));
        m.work += barrier(&mut self.g, &mut buf)?.applied;

        let level = self.g.level(u);
        let dirty = seq_violates_upper(&self.g, u) || seq_violates_lower(&self.g, u);
        m.work += self.g.below(u).len() as u64;
        if dirty {
            let count = build_blank_prefix(&mut self.g, u)?;
            if count == 0 {
                return Err(Error::invariant(format!("dirty vertex {u} has no blank color")));
            }
            let c = self.g.palette(u).color_at(0);
            buf.push_list(u, color_requests(&self.g, u, c, Timestamp::Det));
            m.work += barrier(&mut self.g, &mut buf)?.applied;
            return self.move_vertex(u, m);
        }

        let count = build_blank_unique_prefix(&mut self.g, u)?;
        if count == 0 {
            return Err(Error::invariant(format!("clean vertex {u} has no blank or unique color")));
        }
        let mut rng = stream(self.g.seed(), u as u64, self.steps, Phase::Relaxed, depth as u64);
        let c = self.g.palette(u).color_at(rng.gen_range(0..count as u32));
        let holder = self.g.below(u).iter().copied().find(|&v| self.g.color(v) == Some(c));
        let ts = Timestamp::At { batch: self.g.batches, level };
        buf.push_list(u, color_requests(&self.g, u, c, ts));
        m.work += barrier(&mut self.g, &mut buf)?.applied;
        if let Some(v) = holder {
            if self.g.level(v) >= level {
                return Err(Error::invariant("recoloring chain did not descend"));
            }
            self.recolor(v, depth + 1, m)?;
        }
        Ok(())
    }

    /// Moves a dirty vertex: up to the highest level k ≤ λ where
    /// 3^(k−1) ≤ |N(5,k−1)| and |N(5,k)| ≤ 3^k hold, stopping at ℓ+1, or
    /// down by four levels.
    fn move_vertex(&mut self, u: VertexId, m: &mut BaselineMetrics) -> Result<()> {
        let g = &self.g;
        let l = g.level(u);
        if seq_violates_upper(g, u) {
            let mut k: Level = g.lambda();
            while k > l + 1 {
                let fits = g.count_le(u, k - 1) as u64 >= pow3(k as u32 - 1) && g.count_le(u, k) as u64 <= pow3(k as u32);
                if fits {
                    break;
                }
                k -= 1;
            }
            if k <= l {
                return Err(Error::invariant(format!("overfull vertex {u} at top level {l}")));
            }
            m.work += move_group_up(&mut self.g, &[u], l, k, Exec::Sequential)?;
            m.moves += 1;
        } else if seq_violates_lower(g, u) {
            m.work += move_group_down(&mut self.g, &[u], l, l - LOWER_STEP, Exec::Sequential)?;
            m.moves += 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deletion_recolors_nothing() {
        let mut r = RelaxedSequential::new(10, 3, 1).unwrap();
        r.apply_batch(&[EdgeUpdate::insert(0, 1)]).unwrap();
        let m = r.apply_batch(&[EdgeUpdate::delete(0, 1)]).unwrap();
        assert_eq!(m.recolored, 0);
    }

    #[test]
    fn monochromatic_insert_is_repaired() {
        let mut r = RelaxedSequential::new(30, 3, 1).unwrap();
        let c = r.graph().color(0);
        let v = (1..30).find(|&v| r.graph().color(v) == c).unwrap();
        let m = r.apply_batch(&[EdgeUpdate::insert(0, v)]).unwrap();
        assert_eq!(m.recolored, 1);
        assert_ne!(r.graph().color(0), r.graph().color(v));
        r.graph().check_invariants().unwrap();
    }

    #[test]
    fn overfull_vertex_moves_up() {
        // With Δ = 300 a level-5 vertex is overfull above 243 neighbors.
        let n = 1200;
        let mut r = RelaxedSequential::new(n, 300, 4).unwrap();
        let hub = n as VertexId - 1;
        let c = r.graph().color(hub);
        let leaves: Vec<EdgeUpdate> =
            (0..hub).filter(|&x| r.graph().color(x) != c).take(250).map(|x| EdgeUpdate::insert(x, hub)).collect();
        r.apply_batch(&leaves).unwrap();
        assert_eq!(r.graph().level(hub), 5);
        let spare = (0..hub).find(|&x| r.graph().color(x) == c && r.graph().degree(x) == 0).unwrap();
        let m = r.apply_batch(&[EdgeUpdate::insert(spare, hub)]).unwrap();
        assert_eq!(m.moves, 1);
        assert_eq!(r.graph().level(hub), 6);
        r.graph().check_invariants().unwrap();
    }

    #[test]
    fn deletions_go_first_within_a_batch() {
        let mut r = RelaxedSequential::new(4, 1, 1).unwrap();
        r.apply_batch(&[EdgeUpdate::insert(2, 3)]).unwrap();
        r.apply_batch(&[EdgeUpdate::insert(0, 2), EdgeUpdate::delete(2, 3)]).unwrap();
        assert!(r.graph().has_edge(0, 2) && !r.graph().has_edge(2, 3));
        r.graph().check_invariants().unwrap();
    }
}
