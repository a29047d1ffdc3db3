use super::*;
use crate::conditions::{total_tokens_sixths, violates_upper};
use crate::framework::{barrier, RequestBuffer};
use crate::graph::{pow3, MarkKind};
use crate::rng::{stream, Phase as RngPhase};
use rand::Rng;

fn audited(n: usize, delta: u32, seed: u64) -> BatchUpdater {
    BatchUpdater::new(n, delta, seed, UpdaterConfig { exec: Exec::Sequential, audit: true }).unwrap()
}

/// Recolors `u` to `c` with timestamp `ts` through the request framework.
fn force_color(g: &mut GraphState, u: VertexId, c: ColorId, ts: Timestamp) {
    let mut buf = RequestBuffer::new();
    buf.push_list(u, uncolor_requests(g, u));
    barrier(g, &mut buf).unwrap();
    buf.push_list(u, color_requests(g, u, c, ts));
    barrier(g, &mut buf).unwrap();
    g.check_invariants().unwrap();
}

fn proper(g: &GraphState) -> bool {
    g.edges().iter().all(|&(u, v)| g.color(u).is_some() && g.color(u) != g.color(v))
}

#[test]
fn empty_batch_is_overhead_only() {
    let mut up = audited(10, 3, 4);
    let before = up.graph().colors().to_vec();
    let m = up.apply_batch(&[]).unwrap();
    assert_eq!(up.graph().colors(), &before[..]);
    let w = m.work;
    assert_eq!(w.total() - w.overhead, 0);
    assert!(m.records.is_empty());
}

#[test]
fn deletion_only_batch_recolors_nothing() {
    let mut up = audited(6, 3, 9);
    up.apply_batch(&[EdgeUpdate::insert(0, 1), EdgeUpdate::insert(1, 2), EdgeUpdate::insert(3, 4)]).unwrap();
    let colors = up.graph().colors().to_vec();
    let m = up.apply_batch(&[EdgeUpdate::delete(0, 1), EdgeUpdate::delete(3, 4)]).unwrap();
    assert_eq!(m.blank_initial, 0);
    assert_eq!(m.recolored, 0);
    assert_eq!(up.graph().colors(), &colors[..]);
    assert!(up.graph().marks().is_empty());
}

#[test]
fn differently_colored_insert_recolors_nothing() {
    let mut up = audited(2, 1, 0);
    force_color(&mut up.g, 0, 0, Timestamp::At { batch: 0, level: 5 });
    force_color(&mut up.g, 1, 1, Timestamp::At { batch: 0, level: 5 });
    let m = up.apply_batch(&[EdgeUpdate::insert(0, 1)]).unwrap();
    assert_eq!(m.recolored, 0);
    assert_eq!(up.graph().mu(0, 1), 1);
    assert!(up.graph().palette(0).is_upper(1));
}

#[test]
fn later_endpoint_of_monochromatic_insert_goes_blank() {
    let mut up = audited(2, 1, 0);
    up.g.batches = 3;
    force_color(&mut up.g, 0, 1, Timestamp::At { batch: 3, level: 5 });
    force_color(&mut up.g, 1, 1, Timestamp::At { batch: 1, level: 5 });
    let mut seen = Vec::new();
    up.apply_batch_probed(&[EdgeUpdate::insert(0, 1)], &mut |g, stage| {
        if stage == Stage::AfterInit {
            seen.push((g.color(0), g.marks().get(MarkKind::Unmarked, 5).iter().copied().collect::<Vec<_>>()));
        }
    })
    .unwrap();
    assert_eq!(seen, vec![(None, vec![0])]);
    assert_eq!(up.graph().color(0), Some(0));
    assert_eq!(up.graph().color(1), Some(1));
}

#[test]
fn det_endpoint_loses_the_tie_break() {
    let mut up = audited(2, 1, 0);
    force_color(&mut up.g, 0, 1, Timestamp::Det);
    force_color(&mut up.g, 1, 1, Timestamp::At { batch: 7, level: 5 });
    let m = up.apply_batch(&[EdgeUpdate::insert(0, 1)]).unwrap();
    assert_eq!(m.records.len(), 1);
    assert_eq!(m.records[0].vertex, 0);
}

#[test]
fn random_batches_stay_proper_under_audit() {
    for seed in 0..6 {
        let (n, delta) = (60usize, 4u32);
        let mut up = audited(n, delta, seed);
        for b in 0..40u64 {
            let mut rng = stream(seed, 0, b, RngPhase::Generator, 0);
            let mut batch = Vec::new();
            let mut deg: Vec<usize> = (0..n as VertexId).map(|x| up.graph().degree(x)).collect();
            for _ in 0..12 {
                let u = rng.gen_range(0..n as VertexId);
                let v = rng.gen_range(0..n as VertexId);
                if up.graph().has_edge(u, v) {
                    batch.push(EdgeUpdate::delete(u, v));
                } else if u != v && deg[u as usize] < delta as usize && deg[v as usize] < delta as usize {
                    deg[u as usize] += 1;
                    deg[v as usize] += 1;
                    batch.push(EdgeUpdate::insert(u, v));
                }
            }
            let m = up.apply_batch(&batch).unwrap();
            assert!(m.injected_sixths <= 6 * up.graph().lambda() as i64 * m.applied as i64);
            assert!(proper(up.graph()));
        }
    }
}

/// A hub with the largest id joined to `leaves` vertices of other colors, so
/// nothing is recolored yet, and an isolated spare sharing the hub's color.
fn star_with_spare(delta: u32, leaves: usize, seed: u64) -> (BatchUpdater, VertexId, VertexId) {
    let n = 2 * leaves + 8 * delta as usize;
    let mut up = BatchUpdater::new(n, delta, seed, UpdaterConfig { exec: Exec::Sequential, audit: false }).unwrap();
    let hub = n as VertexId - 1;
    let c = up.graph().color(hub);
    let batch: Vec<EdgeUpdate> =
        (0..hub).filter(|&x| up.graph().color(x) != c).take(leaves).map(|x| EdgeUpdate::insert(x, hub)).collect();
    let m = up.apply_batch(&batch).unwrap();
    assert_eq!(m.recolored, 0);
    let spare = spare_for(&up, hub);
    (up, hub, spare)
}

fn spare_for(up: &BatchUpdater, hub: VertexId) -> VertexId {
    let g = up.graph();
    (0..hub).find(|&x| g.color(x) == g.color(hub) && g.degree(x) == 0).unwrap()
}

#[test]
fn overfull_hub_is_raised() {
    let (mut up, hub, spare) = star_with_spare(2400, 2200, 5);
    assert_eq!(up.graph().lambda(), 8);
    assert!(violates_upper(up.graph(), hub));
    let m = up.apply_batch(&[EdgeUpdate::insert(spare, hub)]).unwrap();
    assert_eq!(up.graph().level(hub), 8);
    assert!(!m.raise_rounds.is_empty());
    for r in m.raise_rounds.iter().filter(|r| r.moved > 0) {
        assert!(r.drop_sixths >= 6 * pow3(r.target as u32 - 2) as i64 * r.moved as i64);
    }
    assert_eq!(up.ledger().gamma_sixths(), total_tokens_sixths(up.graph()) as i64);
    up.graph().check_invariants().unwrap();
    assert!(proper(up.graph()));
}

#[test]
fn sparse_hub_at_level_nine_is_lowered() {
    let (mut up, hub, spare) = star_with_spare(7000, 6600, 3);
    assert_eq!(up.graph().lambda(), 9);
    up.apply_batch(&[EdgeUpdate::insert(spare, hub)]).unwrap();
    assert_eq!(up.graph().level(hub), 9);
    let cut: Vec<EdgeUpdate> = up.graph().neighbors(hub).skip(79).map(|x| EdgeUpdate::delete(x, hub)).collect();
    up.apply_batch(&cut).unwrap();
    assert_eq!(up.graph().below(hub).len(), 79);
    let spare = spare_for(&up, hub);
    let m = up.apply_batch(&[EdgeUpdate::insert(spare, hub)]).unwrap();
    assert_eq!(up.graph().level(hub), 5);
    let moved: Vec<_> = m.lower_rounds.iter().filter(|r| r.moved > 0).collect();
    assert_eq!(moved.len(), 1);
    assert!(moved[0].drop_sixths >= 7 * pow3(9 - 4) as i64);
    assert_eq!(up.ledger().gamma_sixths(), total_tokens_sixths(up.graph()) as i64);
    up.graph().check_invariants().unwrap();
    assert!(proper(up.graph()));
}

#[test]
fn blank_and_unique_prefixes_at_level_six() {
    // Below-neighbors colored {0, 0, 1} with Δ = 8: seven colors are blank,
    // and color 1 is unique on top of those.
    let mut up = audited(4, 8, 0);
    for (x, c) in [(0, 0), (1, 0), (2, 1), (3, 5)] {
        force_color(&mut up.g, x, c, Timestamp::At { batch: 0, level: 5 });
    }
    up.apply_batch(&[EdgeUpdate::insert(0, 3), EdgeUpdate::insert(1, 3), EdgeUpdate::insert(2, 3)]).unwrap();
    moving::move_group_up(&mut up.g, &[3], 5, 6, Exec::Sequential).unwrap();
    assert_eq!(up.g.below(3).len(), 3);
    assert_eq!(crate::palette::build_blank_prefix(&mut up.g, 3).unwrap(), 7);
    let mut blank = up.g.palette(3).lower_prefix(7);
    blank.sort_unstable();
    assert_eq!(blank, vec![2, 3, 4, 5, 6, 7, 8]);
    assert_eq!(crate::palette::build_blank_unique_prefix(&mut up.g, 3).unwrap(), 8);
    assert!(!up.g.palette(3).lower_prefix(8).contains(&0));
}
