use std::collections::{BTreeSet, HashMap};

use rand::Rng;

use crate::baselines::BaselineMetrics;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{ColorId, VertexId};
use crate::partial::{static_list_color, ColoringInstance};
use crate::rng::{stream, Phase, RoundKey};
use crate::updater::{normalize, EdgeOp, EdgeUpdate, EdgeView};

/// A 2Δ coloring kept by recoloring, after each batch, one endpoint of every
/// monochromatic inserted edge.
#[derive(Clone, Debug)]
pub struct FolkloreState {
    delta: u32,
    seed: u64,
    adj: Vec<BTreeSet<VertexId>>,
    colors: Vec<ColorId>,
    /// Batch in which each vertex last got its color.
    stamps: Vec<u64>,
    batches: u64,
    exec: Exec,
}

impl EdgeView for FolkloreState {
    fn n(&self) -> usize {
        self.adj.len()
    }
    fn delta(&self) -> u32 {
        self.delta
    }
    fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj[u as usize].contains(&v)
    }
    fn degree(&self, u: VertexId) -> usize {
        self.adj[u as usize].len()
    }
}

impl FolkloreState {
    pub fn new(n: usize, delta: u32, seed: u64) -> Result<Self> {
        if delta == 0 {
            return Err(Error::Infeasible("Δ must be positive".into()));
        }
        let colors = (0..n as u64).map(|v| stream(seed, v, 0, Phase::Folklore, 0).gen_range(0..2 * delta)).collect();
        Ok(FolkloreState {
            delta,
            seed,
            adj: vec![BTreeSet::new(); n],
            colors,
            stamps: vec![0; n],
            batches: 0,
            exec: Exec::default(),
        })
    }

    pub fn set_exec(&mut self, exec: Exec) {
        self.exec = exec;
    }

    pub fn num_colors(&self) -> u32 {
        2 * self.delta
    }

    pub fn color(&self, u: VertexId) -> ColorId {
        self.colors[u as usize]
    }

    pub fn colors(&self) -> &[ColorId] {
        &self.colors
    }

    pub fn neighbors(&self, u: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[u as usize].iter().copied()
    }

    pub fn apply_batch(&mut self, raw: &[EdgeUpdate]) -> Result<BaselineMetrics> {
        let norm = normalize(&*self, raw)?;
        self.batches += 1;
        let batch = self.batches;
        let mut m = BaselineMetrics { batch, applied: norm.updates.len(), dropped: norm.dropped, ..Default::default() };

        let mut blank = BTreeSet::new();
        for e in &norm.updates {
            let (u, v) = (e.u as usize, e.v as usize);
            match e.op {
                EdgeOp::Insert => {
                    self.adj[u].insert(e.v);
                    self.adj[v].insert(e.u);
                    if self.colors[u] == self.colors[v] {
                        blank.insert(if (self.stamps[u], u) > (self.stamps[v], v) { e.u } else { e.v });
                    }
                }
                EdgeOp::Delete => {
                    self.adj[u].remove(&e.v);
                    self.adj[v].remove(&e.u);
                }
            }
            m.work += 1;
        }
        m.blank_initial = blank.len();
        if blank.is_empty() {
            return Ok(m);
        }

        let members: Vec<VertexId> = blank.iter().copied().collect();
        let index: HashMap<VertexId, usize> = members.iter().enumerate().map(|(k, &u)| (u, k)).collect();
        let mut adj = Vec::with_capacity(members.len());
        let mut palettes = Vec::with_capacity(members.len());
        for &u in &members {
            let mut taken = vec![false; self.num_colors() as usize];
            let mut local = Vec::new();
            for &v in &self.adj[u as usize] {
                match index.get(&v) {
                    Some(&k) => local.push(k),
                    None => taken[self.colors[v as usize] as usize] = true,
                }
            }
            let palette: Vec<ColorId> = (0..self.num_colors()).filter(|&c| !taken[c as usize]).collect();
            if palette.len() < local.len() + self.delta as usize {
                return Err(Error::invariant(format!(
                    "blank vertex {u} has {} colors for blank degree {} and Δ {}",
                    palette.len(),
                    local.len(),
                    self.delta
                )));
            }
            m.work += (self.adj[u as usize].len() + palette.len()) as u64;
            adj.push(local);
            palettes.push(palette);
        }
        let inst = ColoringInstance::new(members.iter().map(|&u| u as u64).collect(), adj, palettes)?;
        let key = RoundKey { seed: self.seed, batch, phase: Phase::Folklore, round: 1 };
        let out = static_list_color(&inst, key, self.exec)?;
        for (&u, &c) in members.iter().zip(&out.colors) {
            self.colors[u as usize] = c;
            self.stamps[u as usize] = batch;
        }
        m.recolored = members.len();
        m.rounds = out.rounds;
        m.work += out.work;
        Ok(m)
    }
}
