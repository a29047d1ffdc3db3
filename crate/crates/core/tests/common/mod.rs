//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use batchcolor::exec::Exec;
use batchcolor::harness::{generate_workload, GenConfig, Workload};
use batchcolor::{BatchUpdater, EdgeUpdate, GraphState, UpdaterConfig, VertexId};

pub fn updater(n: usize, delta: u32, seed: u64, audit: bool) -> BatchUpdater {
    BatchUpdater::new(n, delta, seed, UpdaterConfig { exec: Exec::Sequential, audit }).unwrap()
}

pub fn workload(n: usize, delta: u32, batches: usize, batch_size: usize, mix: f64, seed: u64) -> Workload {
    generate_workload(&GenConfig { n, delta, batches, batch_size, mix, seed }).unwrap()
}

pub fn is_proper(g: &GraphState) -> bool {
    (0..g.n() as VertexId).all(|u| g.color(u).is_some_and(|c| c <= g.delta()))
        && g.edges().iter().all(|&(u, v)| g.color(u) != g.color(v))
}

/// Hubs with the largest ids, each joined to the same `leaves` low-id
/// vertices and, when `clique`, to each other. Leaves and hubs draw no
/// edges whose endpoints share a color, so building recolors nothing and
/// the hubs stay at level 5 however overfull they are.
pub struct HubScenario {
    pub hubs: Vec<VertexId>,
    pub leaves: Vec<VertexId>,
    /// Edge list that builds the scenario, in one batch.
    pub build: Vec<EdgeUpdate>,
}

pub fn hub_scenario(g: &GraphState, hubs: usize, leaves: usize, clique: bool) -> HubScenario {
    let n = g.n() as VertexId;
    let hub_ids: Vec<VertexId> = (n - hubs as VertexId..n).collect();
    let mut hub_colors: HashSet<u32> = HashSet::new();
    let mut chosen_hubs = Vec::new();
    for &h in &hub_ids {
        let c = g.color(h).unwrap();
        if !clique || hub_colors.insert(c) {
            chosen_hubs.push(h);
        }
    }
    let forbidden: HashSet<u32> = chosen_hubs.iter().map(|&h| g.color(h).unwrap()).collect();
    let leaf_ids: Vec<VertexId> =
        (0..n - hubs as VertexId).filter(|&x| !forbidden.contains(&g.color(x).unwrap())).take(leaves).collect();
    assert_eq!(leaf_ids.len(), leaves, "not enough leaves");
    let mut build = Vec::new();
    for &h in &chosen_hubs {
        build.extend(leaf_ids.iter().map(|&x| EdgeUpdate::insert(x, h)));
    }
    if clique {
        for (k, &a) in chosen_hubs.iter().enumerate() {
            build.extend(chosen_hubs[k + 1..].iter().map(|&b| EdgeUpdate::insert(a, b)));
        }
    }
    HubScenario { hubs: chosen_hubs, leaves: leaf_ids, build }
}

/// For each hub an edge to an isolated vertex with a smaller id and the
/// hub's color; inserting these edges uncolors every hub. Hubs sharing a
/// color share the spare.
pub fn spare_edges(g: &GraphState, hubs: &[VertexId]) -> Vec<EdgeUpdate> {
    let lo = *hubs.iter().min().unwrap();
    let mut by_color: HashMap<u32, VertexId> = HashMap::new();
    for x in (0..lo).filter(|&x| g.degree(x) == 0) {
        by_color.entry(g.color(x).unwrap()).or_insert(x);
    }
    hubs.iter()
        .map(|&h| EdgeUpdate::insert(*by_color.get(&g.color(h).unwrap()).expect("no spare for a hub"), h))
        .collect()
}

/// Counts for the two palette claims, computed from adjacency and colors
/// alone.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClaimStats {
    pub checked_unique: u64,
    pub failed_unique: u64,
    pub checked_blank: u64,
    pub failed_blank: u64,
    /// Vertices whose maintained lower palette differs from the recount.
    pub palette_mismatches: u64,
}

impl ClaimStats {
    pub fn add(&mut self, o: &ClaimStats) {
        self.checked_unique += o.checked_unique;
        self.failed_unique += o.failed_unique;
        self.checked_blank += o.checked_blank;
        self.failed_blank += o.failed_blank;
        self.palette_mismatches += o.palette_mismatches;
    }
}

/// For every vertex in `vertices`: the colors no neighbor at its level or
/// above uses form its lower palette; among those, B are unused below and U
/// used exactly once below. Checks 2|B ∪ U| ≥ 2 + |below| for every vertex,
/// and |B| ≥ (blank neighbors) + 1 for every blank vertex.
pub fn check_claims(g: &GraphState, vertices: impl Iterator<Item = VertexId>) -> ClaimStats {
    let mut s = ClaimStats::default();
    let palette = g.delta() as usize + 1;
    for u in vertices {
        let lu = g.level(u);
        let mut upper = vec![false; palette];
        let mut below_uses = vec![0u32; palette];
        let mut below = 0u64;
        let mut blank_nbrs = 0u64;
        for v in g.neighbors(u) {
            let lv = g.level(v);
            if lv < lu {
                below += 1;
            }
            match g.color(v) {
                None => blank_nbrs += 1,
                Some(c) if lv >= lu => upper[c as usize] = true,
                Some(c) => below_uses[c as usize] += 1,
            }
        }
        let lower: Vec<usize> = (0..palette).filter(|&c| !upper[c]).collect();
        let mut maintained: Vec<usize> = g.palette(u).lower_colors().map(|c| c as usize).collect();
        maintained.sort_unstable();
        if maintained != lower {
            s.palette_mismatches += 1;
        }
        let blank = lower.iter().filter(|&&c| below_uses[c] == 0).count() as u64;
        let unique = lower.iter().filter(|&&c| below_uses[c] == 1).count() as u64;
        s.checked_unique += 1;
        if 2 * (blank + unique) < 2 + below {
            s.failed_unique += 1;
        }
        if g.color(u).is_none() {
            s.checked_blank += 1;
            if blank < blank_nbrs + 1 {
                s.failed_blank += 1;
            }
        }
    }
    s
}

/// Simple random batch that respects Δ at every vertex, drawn from `rng`.
pub fn random_batch<R: rand::Rng>(g: &GraphState, rng: &mut R, size: usize, mix: f64) -> Vec<EdgeUpdate> {
    let n = g.n() as VertexId;
    let delta = g.delta() as usize;
    let mut deg: Vec<usize> = (0..n).map(|x| g.degree(x)).collect();
    let mut touched = HashSet::new();
    let mut batch = Vec::new();
    for _ in 0..size * 4 {
        if batch.len() == size {
            break;
        }
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let key = (u.min(v), u.max(v));
        if u == v || !touched.insert(key) {
            continue;
        }
        if g.has_edge(u, v) {
            if !rng.gen_bool(mix) {
                deg[u as usize] -= 1;
                deg[v as usize] -= 1;
                batch.push(EdgeUpdate::delete(u, v));
            }
        } else if deg[u as usize] < delta && deg[v as usize] < delta {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
            batch.push(EdgeUpdate::insert(u, v));
        }
    }
    batch
}

/// A replayable workload together with the metrics of its first replay.
pub struct Scenario {
    pub workload: Workload,
    pub seed: u64,
    pub metrics: Vec<batchcolor::BatchMetrics>,
    pub ledger_ok: bool,
    pub proper: bool,
    pub hubs: Vec<VertexId>,
    pub final_levels: Vec<u8>,
}

fn replay_step(
    up: &mut BatchUpdater,
    batch: Vec<EdgeUpdate>,
    sc: &mut Scenario,
    probe: &mut dyn FnMut(&GraphState, batchcolor::updater::Stage),
) {
    let m = up.apply_batch_probed(&batch, probe).unwrap();
    sc.ledger_ok &= up.ledger().check(up.graph()).is_ok();
    sc.proper &= is_proper(up.graph());
    sc.metrics.push(m);
    sc.workload.batches.push(batch);
}

fn empty_scenario(n: usize, delta: u32, seed: u64) -> Scenario {
    Scenario {
        workload: Workload { n, delta, batches: Vec::new() },
        seed,
        metrics: Vec::new(),
        ledger_ok: true,
        proper: true,
        hubs: Vec::new(),
        final_levels: Vec::new(),
    }
}

/// Overfull hubs uncolored all at once, so they are raised together.
pub fn raise_scenario(
    delta: u32,
    hubs: usize,
    leaves: usize,
    seed: u64,
    probe: &mut dyn FnMut(&GraphState, batchcolor::updater::Stage),
) -> Scenario {
    let n = 2 * leaves + 8 * delta as usize;
    let mut up = updater(n, delta, seed, false);
    let mut sc = empty_scenario(n, delta, seed);
    let hs = hub_scenario(up.graph(), hubs, leaves, true);
    replay_step(&mut up, hs.build, &mut sc, probe);
    let spares = spare_edges(up.graph(), &hs.hubs);
    replay_step(&mut up, spares, &mut sc, probe);
    sc.final_levels = hs.hubs.iter().map(|&h| up.graph().level(h)).collect();
    sc.hubs = hs.hubs;
    sc
}

/// Hubs raised to the top level, stripped down to `keep` neighbors and
/// uncolored again, so they are lowered together.
pub fn lower_scenario(
    delta: u32,
    hubs: usize,
    leaves: usize,
    keep: usize,
    seed: u64,
    probe: &mut dyn FnMut(&GraphState, batchcolor::updater::Stage),
) -> Scenario {
    let n = 2 * leaves + 8 * delta as usize;
    let mut up = updater(n, delta, seed, false);
    let mut sc = empty_scenario(n, delta, seed);
    let hs = hub_scenario(up.graph(), hubs, leaves, false);
    replay_step(&mut up, hs.build, &mut sc, probe);
    let spares = spare_edges(up.graph(), &hs.hubs);
    replay_step(&mut up, spares, &mut sc, probe);
    let g = up.graph();
    let cut: Vec<EdgeUpdate> = hs
        .hubs
        .iter()
        .flat_map(|&h| g.neighbors(h).skip(keep).map(move |x| EdgeUpdate::delete(x, h)).collect::<Vec<_>>())
        .collect();
    replay_step(&mut up, cut, &mut sc, probe);
    let spares = spare_edges(up.graph(), &hs.hubs);
    replay_step(&mut up, spares, &mut sc, probe);
    sc.final_levels = hs.hubs.iter().map(|&h| up.graph().level(h)).collect();
    sc.hubs = hs.hubs;
    sc
}
