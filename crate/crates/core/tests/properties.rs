mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use batchcolor::conditions::total_tokens_sixths;
use batchcolor::exec::Exec;
use batchcolor::graph::{floor_log3, pow3};
use batchcolor::harness::{emit_workload, generate_workload, parse_workload, GenConfig};
use batchcolor::partial::{partial_color, static_list_color, ColoringInstance};
use batchcolor::rng::{Phase, RoundKey};
use batchcolor::updater::{normalize, Stage};
use batchcolor::{EdgeOp, EdgeUpdate, GraphState, VertexId};

use common::{check_claims, is_proper, updater};

fn ops(n: u32, len: usize) -> impl Strategy<Value = Vec<EdgeUpdate>> {
    prop::collection::vec((any::<bool>(), 0..n, 0..n), 0..len).prop_map(|v| {
        v.into_iter().map(|(ins, u, v)| if ins { EdgeUpdate::insert(u, v) } else { EdgeUpdate::delete(u, v) }).collect()
    })
}

/// Keeps the first op on each pair, drops self-loops and no-ops, and drops
/// insertions that would push a degree past Δ, so the batch is admissible.
fn admissible(g: &GraphState, raw: &[EdgeUpdate]) -> Vec<EdgeUpdate> {
    let mut seen = std::collections::HashSet::new();
    let firsts: Vec<EdgeUpdate> = raw
        .iter()
        .copied()
        .filter(|e| e.u != e.v && seen.insert((e.u.min(e.v), e.u.max(e.v))))
        .filter(|e| g.has_edge(e.u, e.v) == (e.op == EdgeOp::Delete))
        .collect();
    let mut deg: Vec<usize> = (0..g.n() as VertexId).map(|x| g.degree(x)).collect();
    for e in firsts.iter().filter(|e| e.op == EdgeOp::Delete) {
        deg[e.u as usize] -= 1;
        deg[e.v as usize] -= 1;
    }
    let mut out: Vec<EdgeUpdate> = firsts.iter().copied().filter(|e| e.op == EdgeOp::Delete).collect();
    for e in firsts.iter().filter(|e| e.op == EdgeOp::Insert) {
        if deg[e.u as usize] < g.delta() as usize && deg[e.v as usize] < g.delta() as usize {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
            out.push(*e);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn batches_keep_invariants_propriety_and_ledger(
        seed in any::<u64>(),
        delta in 1u32..7,
        batches in prop::collection::vec(ops(24, 40), 1..12),
    ) {
        let mut up = updater(24, delta, seed, true);
        for raw in &batches {
            let batch = admissible(up.graph(), raw);
            let mut failures = 0;
            let m = up.apply_batch_probed(&batch, &mut |g, _| {
                let s = check_claims(g, 0..g.n() as VertexId);
                failures += s.failed_unique + s.failed_blank + s.palette_mismatches;
            }).unwrap();
            prop_assert_eq!(failures, 0);
            prop_assert!(is_proper(up.graph()));
            prop_assert_eq!(up.ledger().gamma_sixths(), total_tokens_sixths(up.graph()) as i64);
            prop_assert!(m.injected_sixths <= 6 * up.graph().lambda() as i64 * m.applied as i64);
        }
    }

    #[test]
    fn batch_order_does_not_matter(seed in any::<u64>(), shuffle in any::<u64>(), raw in prop::collection::vec(ops(30, 50), 1..6)) {
        let mut a = updater(30, 4, seed, false);
        let mut b = updater(30, 4, seed, false);
        for raw in &raw {
            let batch = admissible(a.graph(), raw);
            let mut perm = batch.clone();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
            let ma = a.apply_batch(&batch).unwrap();
            let mb = b.apply_batch(&perm).unwrap();
            prop_assert_eq!(ma, mb);
            prop_assert_eq!(a.graph().colors(), b.graph().colors());
            prop_assert_eq!(a.graph().levels(), b.graph().levels());
        }
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>(), pre in ops(12, 20), raw in ops(12, 40)) {
        let mut up = updater(12, 11, seed, false);
        let pre = admissible(up.graph(), &pre);
        up.apply_batch(&pre).unwrap();
        let g = up.graph();
        let raw = admissible(g, &raw);
        let once = normalize(g, &raw).unwrap();
        let twice = normalize(g, &once.updates).unwrap();
        prop_assert_eq!(&twice.updates, &once.updates);
        prop_assert_eq!(twice.dropped.total(), 0);
        prop_assert!(once.updates.len() as u64 + once.dropped.total() <= raw.len() as u64);
    }

    #[test]
    fn generated_workloads_round_trip_and_normalize_cleanly(
        n in 2usize..40, delta in 1u32..6, batches in 0usize..8, batch_size in 0usize..6, mix in 0.3f64..0.9, seed in any::<u64>(),
    ) {
        let cfg = GenConfig { n, delta, batches, batch_size, mix, seed };
        let Ok(w) = generate_workload(&cfg) else { return Ok(()) };
        prop_assert_eq!(&parse_workload(&emit_workload(&w)).unwrap(), &w);
        let mut up = updater(n, delta, seed, false);
        for batch in &w.batches {
            let m = up.apply_batch(batch).unwrap();
            prop_assert_eq!(m.dropped.total(), 0);
            prop_assert_eq!(m.applied, batch.len());
        }
    }

    #[test]
    fn partial_coloring_partitions_and_respects_lists(
        edges in prop::collection::vec((0usize..40, 0usize..40), 0..120),
        extra in 0usize..3,
        seed in any::<u64>(),
    ) {
        let mut adj = vec![Vec::new(); 40];
        for (u, v) in edges {
            if u != v && !adj[u].contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let palettes = adj.iter().enumerate().map(|(u, a)| (0..(a.len() + 1 + extra) as u32).map(|c| c * 3 + u as u32 % 3).collect()).collect();
        let inst = ColoringInstance::new((0..40).collect(), adj, palettes).unwrap();
        let key = RoundKey { seed, batch: 0, phase: Phase::StaticList, round: 0 };
        let res = partial_color(&inst, key, Exec::Sequential).unwrap();
        let mut seen: Vec<usize> = res.colored.iter().map(|&(u, _)| u).chain(res.rejected.iter().copied()).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..40).collect::<Vec<_>>());
        for &(u, c) in &res.colored {
            prop_assert!(inst.palettes[u].contains(&c));
            prop_assert!(res.colored.iter().all(|&(w, d)| !(inst.adj[u].contains(&w) && d == c)));
        }
        let st = static_list_color(&inst, key, Exec::Sequential).unwrap();
        for u in 0..40 {
            prop_assert!(inst.palettes[u].contains(&st.colors[u]));
            prop_assert!(inst.adj[u].iter().all(|&w| st.colors[w] != st.colors[u]));
        }
    }

    /// Too many neighbors at or below ℓ puts the base level two above ℓ, and
    /// a base level two above ℓ needs at least 3^(ℓ+2) of them.
    #[test]
    fn base_level_brackets_the_upper_condition(level in 5u32..12, count in 1u64..2_000_000) {
        let base = floor_log3(count).max(level);
        if count > pow3(level + 2) {
            prop_assert!(base >= level + 2);
        }
        if base >= level + 2 {
            prop_assert!(count >= pow3(level + 2));
        }
    }
}

/// Levels recorded at each probe of a hub scenario: the raise pass never
/// lowers anyone and the lower pass never raises anyone, moving by exactly
/// four levels when it moves.
#[test]
fn passes_move_levels_in_one_direction() {
    for (seed, lower) in [(1, false), (2, false), (3, true)] {
        let mut snaps: Vec<(Stage, Vec<u8>)> = Vec::new();
        let mut probe = |g: &GraphState, s: Stage| snaps.push((s, g.levels()));
        let sc = if lower {
            common::lower_scenario(7000, 3, 6600, 79, seed, &mut probe)
        } else {
            common::raise_scenario(2400, 4, 2200, seed, &mut probe)
        };
        assert!(sc.proper && sc.ledger_ok);
        let mut moved_up = 0;
        let mut moved_down = 0;
        for pair in snaps.windows(2) {
            let ((_, a), (stage, b)) = (&pair[0], &pair[1]);
            for (x, y) in a.iter().zip(b) {
                match stage {
                    Stage::AfterRaise(_) => {
                        assert!(y >= x);
                        moved_up += (y > x) as usize;
                    }
                    Stage::AfterLower(_) => {
                        assert!(y == x || *y + 4 == *x);
                        moved_down += (y < x) as usize;
                    }
                    _ => assert_eq!(x, y, "levels change only in the raise and lower passes"),
                }
            }
        }
        assert!(moved_up > 0);
        assert_eq!(moved_down > 0, lower);
    }
}
