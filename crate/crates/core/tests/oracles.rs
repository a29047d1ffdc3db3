//! Small hand-checked values and brute-force recomputations.

mod common;

use rand::Rng;

use batchcolor::baselines::greedy_static;
use batchcolor::conditions::{base_level, total_tokens_sixths, vertex_tokens_sixths_raw, violates_upper};
use batchcolor::exec::Exec;
use batchcolor::graph::lambda_for;
use batchcolor::partial::{partial_color, round_cap, ColoringInstance};
use batchcolor::rng::{stream, Phase, RoundKey};
use batchcolor::{EdgeUpdate, GraphState, VertexId};

use common::{hub_scenario, updater};

/// Smallest k with 3^k ≥ Δ, at least 6.
fn lambda_oracle(delta: u32) -> u8 {
    let mut k = 0;
    while 3u64.pow(k) < delta as u64 {
        k += 1;
    }
    k.max(6) as u8
}

#[test]
fn top_level_table() {
    let table = [(1, 6), (9, 6), (81, 6), (729, 6), (730, 7), (2187, 7), (2188, 8), (2400, 8), (6561, 8), (7000, 9)];
    for (delta, lambda) in table {
        assert_eq!(lambda_for(delta), lambda, "Δ = {delta}");
        assert_eq!(lambda_oracle(delta), lambda);
    }
    for delta in 1..20_000 {
        assert_eq!(lambda_for(delta), lambda_oracle(delta));
    }
}

#[test]
fn round_cap_values() {
    assert_eq!(round_cap(0), 64);
    assert_eq!(round_cap(2), 128);
    assert_eq!(round_cap(1000), 640);
}

#[test]
fn token_examples() {
    // A single edge between two level-5 vertices under λ = 6 holds one token.
    let mut up = updater(4, 3, 1, true);
    assert_eq!(up.ledger().gamma_sixths(), 0);
    up.apply_batch(&[EdgeUpdate::insert(0, 1)]).unwrap();
    assert_eq!(up.ledger().gamma_sixths(), 6);
    assert_eq!(vertex_tokens_sixths_raw(5, 0), 0);
    assert_eq!(vertex_tokens_sixths_raw(6, 0), 243);
    assert_eq!(vertex_tokens_sixths_raw(7, 100), 629);
    assert_eq!(vertex_tokens_sixths_raw(7, 800), 0);
}

/// Γ recounted from the edge list and the level vector alone.
fn gamma_oracle(g: &GraphState) -> u64 {
    let lambda = g.lambda() as u64;
    let levels = g.levels();
    let edges: u64 = g.edges().iter().map(|&(u, v)| 6 * (lambda - levels[u as usize].max(levels[v as usize]) as u64)).sum();
    let vertices: u64 = (0..g.n())
        .map(|u| {
            let l = levels[u];
            let below = g.neighbors(u as VertexId).filter(|&v| levels[v as usize] < l).count() as u64;
            if l > 5 {
                3u64.pow(l as u32 - 1).saturating_sub(below)
            } else {
                0
            }
        })
        .sum();
    edges + vertices
}

#[test]
fn ledger_matches_recount_through_a_raise() {
    let mut gammas = Vec::new();
    let mut probe = |g: &GraphState, _| gammas.push((total_tokens_sixths(g), gamma_oracle(g)));
    let sc = common::raise_scenario(2400, 3, 2200, 11, &mut probe);
    assert!(sc.final_levels.iter().all(|&l| l > 5));
    assert!(gammas.iter().all(|(a, b)| a == b));
}

#[test]
fn star_base_levels_at_the_boundary() {
    for (leaves, base, violates) in [(2200, 7, true), (2187, 7, false), (2186, 6, false)] {
        let mut up = updater(2 * leaves + 8 * 2400, 2400, 2, false);
        let hs = hub_scenario(up.graph(), 1, leaves, false);
        up.apply_batch(&hs.build).unwrap();
        let g = up.graph();
        assert_eq!(base_level(g, hs.hubs[0]), base, "{leaves} leaves");
        assert_eq!(violates_upper(g, hs.hubs[0]), violates, "{leaves} leaves");
    }
}

#[test]
fn partial_coloring_matches_an_independent_replay() {
    let mut rng = stream(5, 0, 0, Phase::Generator, 0);
    for trial in 0..50u64 {
        let n = 60;
        let mut adj = vec![Vec::new(); n];
        for _ in 0..150 {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if u != v && !adj[u].contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let palettes: Vec<Vec<u32>> = adj.iter().map(|a| (0..=a.len() as u32).rev().collect()).collect();
        let ids: Vec<u64> = (0..n as u64).map(|u| 1000 + 7 * u).collect();
        let inst = ColoringInstance::new(ids.clone(), adj.clone(), palettes.clone()).unwrap();
        let key = RoundKey { seed: trial, batch: 3, phase: Phase::StaticList, round: 9 };
        let res = partial_color(&inst, key, Exec::Parallel).unwrap();

        let sample: Vec<u32> = (0..n)
            .map(|u| palettes[u][stream(trial, ids[u], 3, Phase::StaticList, 9).gen_range(0..palettes[u].len())])
            .collect();
        let expect: Vec<(usize, u32)> =
            (0..n).filter(|&u| adj[u].iter().all(|&w| sample[w] != sample[u])).map(|u| (u, sample[u])).collect();
        assert_eq!(res.colored, expect);
        assert_eq!(res.colored.len() + res.rejected.len(), n);
    }
}

/// First fit in id order, recomputed by brute force.
#[test]
fn greedy_matches_first_fit() {
    let mut rng = stream(8, 0, 0, Phase::Generator, 1);
    for _ in 0..20 {
        let (n, delta) = (40usize, 5u32);
        let mut adj = vec![Vec::<usize>::new(); n];
        let mut edges = Vec::new();
        for _ in 0..200 {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if u != v && !adj[u].contains(&v) && adj[u].len() < delta as usize && adj[v].len() < delta as usize {
                adj[u].push(v);
                adj[v].push(u);
                edges.push((u as VertexId, v as VertexId));
            }
        }
        let got = greedy_static(n, delta, &edges).unwrap();
        let mut want = vec![u32::MAX; n];
        for u in 0..n {
            want[u] = (0..).find(|c| adj[u].iter().all(|&w| w > u || want[w] != *c)).unwrap();
        }
        assert_eq!(got, want);
    }
}
