use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphState, VertexId};
use crate::updater::metrics::DropCounts;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeOp {
    Insert,
    Delete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeUpdate {
    pub op: EdgeOp,
    pub u: VertexId,
    pub v: VertexId,
}

impl EdgeUpdate {
    pub fn insert(u: VertexId, v: VertexId) -> Self {
        EdgeUpdate { op: EdgeOp::Insert, u, v }
    }

    pub fn delete(u: VertexId, v: VertexId) -> Self {
        EdgeUpdate { op: EdgeOp::Delete, u, v }
    }

    /// Same update with u < v.
    pub fn canonical(self) -> Self {
        EdgeUpdate { u: self.u.min(self.v), v: self.u.max(self.v), ..self }
    }
}

/// Read access needed to validate a batch.
pub trait EdgeView {
    fn n(&self) -> usize;
    fn delta(&self) -> u32;
    fn has_edge(&self, u: VertexId, v: VertexId) -> bool;
    fn degree(&self, u: VertexId) -> usize;
}

impl EdgeView for GraphState {
    fn n(&self) -> usize {
        GraphState::n(self)
    }
    fn delta(&self) -> u32 {
        GraphState::delta(self)
    }
    fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        GraphState::has_edge(self, u, v)
    }
    fn degree(&self, u: VertexId) -> usize {
        GraphState::degree(self, u)
    }
}

/// A batch ready to apply: canonical, sorted, no self-loops, no repeats, no
/// edge both inserted and deleted, inserts of absent edges and deletes of
/// present ones only, and no degree above Δ afterwards.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Normalized {
    pub updates: Vec<EdgeUpdate>,
    pub dropped: DropCounts,
}

pub fn normalize<G: EdgeView>(g: &G, raw: &[EdgeUpdate]) -> Result<Normalized> {
    let mut dropped = DropCounts::default();
    let mut seen: BTreeMap<(VertexId, VertexId), (bool, bool)> = BTreeMap::new();
    for upd in raw {
        for x in [upd.u, upd.v] {
            if x as usize >= g.n() {
                return Err(Error::VertexOutOfRange { vertex: x as u64, n: g.n() });
            }
        }
        if upd.u == upd.v {
            dropped.self_loops += 1;
            continue;
        }
        let c = upd.canonical();
        let entry = seen.entry((c.u, c.v)).or_default();
        let flag = match c.op {
            EdgeOp::Insert => &mut entry.0,
            EdgeOp::Delete => &mut entry.1,
        };
        if *flag {
            dropped.duplicates += 1;
        }
        *flag = true;
    }
    let mut updates = Vec::new();
    let mut net: HashMap<VertexId, i64> = HashMap::new();
    for ((u, v), (ins, del)) in seen {
        let op = match (ins, del) {
            (true, true) => {
                dropped.cancelled += 2;
                continue;
            }
            (true, false) => EdgeOp::Insert,
            _ => EdgeOp::Delete,
        };
        let present = g.has_edge(u, v);
        if present == (op == EdgeOp::Insert) {
            dropped.noops += 1;
            continue;
        }
        let d = if op == EdgeOp::Insert { 1 } else { -1 };
        *net.entry(u).or_default() += d;
        *net.entry(v).or_default() += d;
        updates.push(EdgeUpdate { op, u, v });
    }
    let mut over: Vec<(VertexId, usize)> = net
        .into_iter()
        .map(|(x, d)| (x, (g.degree(x) as i64 + d) as usize))
        .filter(|&(_, deg)| deg > g.delta() as usize)
        .collect();
    over.sort_unstable();
    if let Some(&(vertex, degree)) = over.first() {
        return Err(Error::DegreeOverflow { vertex, degree, delta: g.delta() });
    }
    Ok(Normalized { updates, dropped })
}
