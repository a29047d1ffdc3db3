//! Workload text format and random workload generation.
//!
//! ```text
//! # comment
//! 6 3          n Δ
//! + 0 1
//! + 1 2
//! ---          end of batch
//! - 0 1
//! ---
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::rng::{stream, Phase};
use crate::updater::{EdgeOp, EdgeUpdate};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Workload {
    pub n: usize,
    pub delta: u32,
    pub batches: Vec<Vec<EdgeUpdate>>,
}

impl Workload {
    pub fn updates(&self) -> usize {
        self.batches.iter().map(Vec::len).sum()
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_workload(text: &str) -> Result<Workload> {
    let mut header: Option<(usize, u32)> = None;
    let mut batches = Vec::new();
    let mut cur = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((n, _)) = header else {
            let [n, d] = fields[..] else {
                return Err(parse_err(line_no, "expected header `n Δ`"));
            };
            let n = n.parse().map_err(|_| parse_err(line_no, format!("bad vertex count `{n}`")))?;
            let d: u32 = d.parse().map_err(|_| parse_err(line_no, format!("bad degree bound `{d}`")))?;
            if d == 0 {
                return Err(parse_err(line_no, "Δ must be positive"));
            }
            header = Some((n, d));
            continue;
        };
        match fields[..] {
            ["---"] => batches.push(std::mem::take(&mut cur)),
            [op @ ("+" | "-"), a, b] => {
                let mut ends = [0; 2];
                for (slot, s) in ends.iter_mut().zip([a, b]) {
                    let x: u64 = s.parse().map_err(|_| parse_err(line_no, format!("bad vertex `{s}`")))?;
                    if x >= n as u64 {
                        return Err(parse_err(line_no, format!("vertex {x} out of range for n = {n}")));
                    }
                    *slot = x as VertexId;
                }
                let op = if op == "+" { EdgeOp::Insert } else { EdgeOp::Delete };
                cur.push(EdgeUpdate { op, u: ends[0], v: ends[1] });
            }
            [first, ..] if first == "+" || first == "-" => {
                return Err(parse_err(line_no, "expected `+ u v` or `- u v`"));
            }
            [first, ..] => return Err(parse_err(line_no, format!("unknown directive `{first}`"))),
            [] => unreachable!(),
        }
    }
    let Some((n, delta)) = header else {
        return Err(parse_err(0, "missing header"));
    };
    if !cur.is_empty() {
        batches.push(cur);
    }
    Ok(Workload { n, delta, batches })
}

pub fn emit_workload(w: &Workload) -> String {
    let mut out = format!("{} {}\n", w.n, w.delta);
    for batch in &w.batches {
        for e in batch {
            let op = if e.op == EdgeOp::Insert { '+' } else { '-' };
            let _ = writeln!(out, "{op} {} {}", e.u, e.v);
        }
        out.push_str("---\n");
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenConfig {
    pub n: usize,
    pub delta: u32,
    pub batches: usize,
    pub batch_size: usize,
    /// Fraction of operations that are insertions.
    pub mix: f64,
    pub seed: u64,
}

/// Set with O(1) insert, remove and uniform sampling.
#[derive(Default)]
struct Pool<T: Copy + Eq + std::hash::Hash> {
    items: Vec<T>,
    pos: HashMap<T, usize>,
}

impl<T: Copy + Eq + std::hash::Hash> Pool<T> {
    fn insert(&mut self, x: T) {
        if !self.pos.contains_key(&x) {
            self.pos.insert(x, self.items.len());
            self.items.push(x);
        }
    }

    fn remove(&mut self, x: T) {
        if let Some(p) = self.pos.remove(&x) {
            self.items.swap_remove(p);
            if let Some(&moved) = self.items.get(p) {
                self.pos.insert(moved, p);
            }
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Option<T> {
        (!self.items.is_empty()).then(|| self.items[rng.gen_range(0..self.items.len())])
    }
}

struct Sim {
    delta: usize,
    deg: Vec<usize>,
    adj: Vec<HashSet<VertexId>>,
    edges: Pool<(VertexId, VertexId)>,
    open: Pool<VertexId>,
}

impl Sim {
    fn new(n: usize, delta: u32) -> Self {
        let mut open = Pool::default();
        (0..n as VertexId).for_each(|v| open.insert(v));
        Sim { delta: delta as usize, deg: vec![0; n], adj: vec![HashSet::new(); n], edges: Pool::default(), open }
    }

    fn bump(&mut self, x: VertexId, up: bool) {
        let d = &mut self.deg[x as usize];
        if up {
            *d += 1;
        } else {
            *d -= 1;
        }
        if *d < self.delta {
            self.open.insert(x);
        } else {
            self.open.remove(x);
        }
    }

    fn toggle(&mut self, u: VertexId, v: VertexId, insert: bool) {
        let key = (u.min(v), u.max(v));
        if insert {
            self.adj[u as usize].insert(v);
            self.adj[v as usize].insert(u);
            self.edges.insert(key);
        } else {
            self.adj[u as usize].remove(&v);
            self.adj[v as usize].remove(&u);
            self.edges.remove(key);
        }
        self.bump(u, insert);
        self.bump(v, insert);
    }

    /// Uniform over absent pairs of open vertices not yet touched in this
    /// batch: rejection sampling, then an exhaustive scan.
    fn pick_insert<R: Rng>(&self, rng: &mut R, touched: &HashSet<(VertexId, VertexId)>) -> Option<(VertexId, VertexId)> {
        let ok = |u: VertexId, v: VertexId| {
            u != v && !self.adj[u as usize].contains(&v) && !touched.contains(&(u.min(v), u.max(v)))
        };
        for _ in 0..64 {
            let (u, v) = (self.open.sample(rng)?, self.open.sample(rng)?);
            if ok(u, v) {
                return Some((u.min(v), u.max(v)));
            }
        }
        let mut open = self.open.items.clone();
        open.sort_unstable();
        let cands: Vec<(VertexId, VertexId)> = open
            .iter()
            .enumerate()
            .flat_map(|(k, &u)| open[k + 1..].iter().map(move |&v| (u, v)))
            .filter(|&(u, v)| ok(u, v))
            .collect();
        (!cands.is_empty()).then(|| cands[rng.gen_range(0..cands.len())])
    }

    fn pick_delete<R: Rng>(&self, rng: &mut R, touched: &HashSet<(VertexId, VertexId)>) -> Option<(VertexId, VertexId)> {
        for _ in 0..64 {
            let e = self.edges.sample(rng)?;
            if !touched.contains(&e) {
                return Some(e);
            }
        }
        let mut cands: Vec<_> = self.edges.items.iter().copied().filter(|e| !touched.contains(e)).collect();
        cands.sort_unstable();
        (!cands.is_empty()).then(|| cands[rng.gen_range(0..cands.len())])
    }
}

/// Random Δ-respecting workload. Each batch touches an edge at most once, so
/// it passes normalization with nothing dropped.
pub fn generate_workload(cfg: &GenConfig) -> Result<Workload> {
    if cfg.n < 2 || cfg.delta == 0 || !(0.0..=1.0).contains(&cfg.mix) {
        return Err(Error::Infeasible(format!(
            "need n ≥ 2, Δ ≥ 1 and mix in [0, 1], got n = {}, Δ = {}, mix = {}",
            cfg.n, cfg.delta, cfg.mix
        )));
    }
    let mut sim = Sim::new(cfg.n, cfg.delta);
    let mut batches = Vec::with_capacity(cfg.batches);
    for b in 0..cfg.batches {
        let mut rng = stream(cfg.seed, 0, b as u64, Phase::Generator, 0);
        let mut touched = HashSet::new();
        let mut batch = Vec::with_capacity(cfg.batch_size);
        for _ in 0..cfg.batch_size {
            let want_insert = rng.gen_bool(cfg.mix);
            let pick = if want_insert {
                match sim.pick_insert(&mut rng, &touched) {
                    Some(e) => Some((e, true)),
                    None if cfg.mix < 1.0 => sim.pick_delete(&mut rng, &touched).map(|e| (e, false)),
                    None => None,
                }
            } else {
                match sim.pick_delete(&mut rng, &touched) {
                    Some(e) => Some((e, false)),
                    None if cfg.mix > 0.0 => sim.pick_insert(&mut rng, &touched).map(|e| (e, true)),
                    None => None,
                }
            };
            let Some(((u, v), insert)) = pick else {
                return Err(Error::Infeasible(format!("batch {b}: no admissible edge left to update")));
            };
            touched.insert((u, v));
            sim.toggle(u, v, insert);
            batch.push(if insert { EdgeUpdate::insert(u, v) } else { EdgeUpdate::delete(u, v) });
        }
        batches.push(batch);
    }
    Ok(Workload { n: cfg.n, delta: cfg.delta, batches })
}
