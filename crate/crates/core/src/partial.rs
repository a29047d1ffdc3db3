//! One-round randomized partial list coloring, and the static list coloring
//! obtained by repeating it.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::ColorId;
use crate::rng::RoundKey;

/// A graph with a color list per vertex, indexed locally `0..len`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColoringInstance {
    /// External id of each local vertex; selects its random stream.
    pub ids: Vec<u64>,
    pub adj: Vec<Vec<usize>>,
    pub palettes: Vec<Vec<ColorId>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialResult {
    /// (local index, color) of every vertex that kept its sample.
    pub colored: Vec<(usize, ColorId)>,
    /// Local indices of rejected vertices.
    pub rejected: Vec<usize>,
    /// Elementary steps spent (samples plus adjacency scans).
    pub work: u64,
}

impl ColoringInstance {
    pub fn new(ids: Vec<u64>, adj: Vec<Vec<usize>>, palettes: Vec<Vec<ColorId>>) -> Result<Self> {
        if ids.len() != adj.len() || ids.len() != palettes.len() {
            return Err(Error::invariant("instance arrays differ in length"));
        }
        for (u, nbrs) in adj.iter().enumerate() {
            if let Some(&w) = nbrs.iter().find(|&&w| w >= ids.len() || w == u) {
                return Err(Error::invariant(format!("bad neighbor {w} of local vertex {u}")));
            }
        }
        Ok(ColoringInstance { ids, adj, palettes })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Errors unless every palette has at least deg + 1 colors.
    pub fn check_palettes(&self) -> Result<()> {
        for (u, p) in self.palettes.iter().enumerate() {
            if p.len() < self.adj[u].len() + 1 {
                return Err(Error::invariant(format!(
                    "vertex {} has {} colors for degree {}",
                    self.ids[u],
                    p.len(),
                    self.adj[u].len()
                )));
            }
        }
        Ok(())
    }

    /// The instance induced by the rejected vertices of `res`, with each
    /// palette stripped of the colors just taken by neighbors.
    pub fn residual(&self, res: &PartialResult) -> ColoringInstance {
        let mut taken: Vec<Option<ColorId>> = vec![None; self.len()];
        for &(u, c) in &res.colored {
            taken[u] = Some(c);
        }
        let mut local = vec![usize::MAX; self.len()];
        for (k, &u) in res.rejected.iter().enumerate() {
            local[u] = k;
        }
        let mut out = ColoringInstance::default();
        for &u in &res.rejected {
            let mut lost: Vec<ColorId> = self.adj[u].iter().filter_map(|&w| taken[w]).collect();
            lost.sort_unstable();
            out.ids.push(self.ids[u]);
            out.adj.push(self.adj[u].iter().filter(|&&w| local[w] != usize::MAX).map(|&w| local[w]).collect());
            out.palettes
                .push(self.palettes[u].iter().copied().filter(|c| lost.binary_search(c).is_err()).collect());
        }
        out
    }
}

/// Every vertex samples a color from its palette; it keeps the color unless
/// some instance neighbor sampled the same one.
pub fn partial_color(inst: &ColoringInstance, key: RoundKey, exec: Exec) -> Result<PartialResult> {
    if let Some(u) = inst.palettes.iter().position(Vec::is_empty) {
        return Err(Error::invariant(format!("vertex {} has an empty palette", inst.ids[u])));
    }
    let samples: Vec<ColorId> = exec.map_range(inst.len(), |u| {
        let p = &inst.palettes[u];
        p[key.rng(inst.ids[u]).gen_range(0..p.len())]
    });
    let kept: Vec<bool> = exec.map_range(inst.len(), |u| inst.adj[u].iter().all(|&w| samples[w] != samples[u]));
    let mut res = PartialResult {
        work: (inst.len() + 2 * inst.edge_count()) as u64,
        ..Default::default()
    };
    for u in 0..inst.len() {
        if kept[u] {
            res.colored.push((u, samples[u]));
        } else {
            res.rejected.push(u);
        }
    }
    Ok(res)
}

/// 64·⌈log₂(n+2)⌉.
pub fn round_cap(n: usize) -> u64 {
    let bits = u64::BITS - ((n as u64 + 2) - 1).leading_zeros();
    64 * bits as u64
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StaticColoring {
    /// Color of each local vertex.
    pub colors: Vec<ColorId>,
    pub rounds: u64,
    pub work: u64,
}

/// Colors the whole instance by repeating [`partial_color`]; round t uses
/// `key.round + t`.
pub fn static_list_color(inst: &ColoringInstance, key: RoundKey, exec: Exec) -> Result<StaticColoring> {
    let cap = round_cap(inst.len());
    let mut colors: Vec<Option<ColorId>> = vec![None; inst.len()];
    let mut origin: Vec<usize> = (0..inst.len()).collect();
    let mut cur = inst.clone();
    let mut out = StaticColoring::default();
    while !cur.is_empty() {
        if out.rounds >= cap {
            return Err(Error::RoundCap { phase: "static list coloring", cap });
        }
        cur.check_palettes()?;
        let res = partial_color(&cur, key.with_round(key.round + out.rounds), exec)?;
        for &(u, c) in &res.colored {
            colors[origin[u]] = Some(c);
        }
        origin = res.rejected.iter().map(|&u| origin[u]).collect();
        cur = cur.residual(&res);
        out.work += res.work;
        out.rounds += 1;
    }
    out.colors = colors.into_iter().map(|c| c.expect("every vertex colored")).collect();
    Ok(out)
}
