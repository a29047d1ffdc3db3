//! Moving vertices between levels: the raising and lowering loops and the
//! structural updates of a group move.

use std::collections::HashSet;

use rand::Rng;

use crate::conditions::{base_level, local_tokens_sixths, violates_lower, violates_upper};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::framework::{barrier, Op, RequestBuffer, Tag, UpdateRequest};
use crate::graph::{pow3, GraphState, Level, MarkKind, VertexId, BOTTOM_LEVEL};
use crate::partial::round_cap;
use crate::rng::{pack_round, Phase};
use crate::updater::metrics::{LowerRound, RaiseRound};
use crate::updater::Ctx;

/// Raise sampling probability is 1/RAISE_SAMPLE.
pub const RAISE_SAMPLE: u32 = 24;
/// Lower sampling probability is 1/LOWER_SAMPLE = 1/(2·3⁶).
pub const LOWER_SAMPLE: u32 = 2 * 729;
/// Levels a lowered vertex drops.
pub const LOWER_STEP: Level = 4;

/// Upper-marked vertices per level with their base levels, taken before the
/// raising pass.
pub(crate) type UpperSnapshot = Vec<(Level, Vec<(VertexId, Level)>)>;

pub(crate) fn snapshot_upper(g: &GraphState) -> UpperSnapshot {
    g.levels_range()
        .map(|i| {
            let set = g.marks().get(MarkKind::Upper, i);
            (i, set.iter().map(|&u| (u, base_level(g, u))).collect())
        })
        .collect()
}

/// Vertices and edges whose tokens a move of `group` up to level `reach`
/// can change: the group, its neighbors at level `reach` or lower, and the
/// edges between them.
fn move_footprint(g: &GraphState, group: &[VertexId], reach: Level) -> (Vec<VertexId>, Vec<(VertexId, VertexId)>) {
    let members: HashSet<VertexId> = group.iter().copied().collect();
    let mut vertices: Vec<VertexId> = group.to_vec();
    let mut edges = Vec::new();
    for &u in group {
        let from = g.level(u);
        let nbrs = g.below(u).iter().chain((from..=reach).flat_map(|j| g.nbrs_at(u, j).iter()));
        for &x in nbrs {
            vertices.push(x);
            if !members.contains(&x) || u < x {
                edges.push((u, x));
            }
        }
    }
    vertices.sort_unstable();
    vertices.dedup();
    (vertices, edges)
}

/// Moves every vertex of `group`, all at level `from`, up to level `to`.
pub(crate) fn move_group_up(g: &mut GraphState, group: &[VertexId], from: Level, to: Level, exec: Exec) -> Result<u64> {
    debug_assert!(to > from);
    let members: HashSet<VertexId> = group.iter().copied().collect();
    let gr = &*g;
    let lists = exec.map(group, |&u| {
        let mut out = Vec::new();
        let c = gr.color(u);
        for v in gr.same_or_lower(u) {
            out.push(UpdateRequest::vertex(v, Tag::Nbr(from), Op::Delete(u)));
            out.push(UpdateRequest::vertex(v, Tag::Nbr(to), Op::Insert(u)));
        }
        for j in from + 1..=to {
            for &v in gr.nbrs_at(u, j) {
                out.push(UpdateRequest::vertex(v, Tag::Below, Op::Delete(u)));
                out.push(UpdateRequest::vertex(v, Tag::Nbr(to), Op::Insert(u)));
                if let Some(c) = c {
                    out.push(UpdateRequest::vertex(v, Tag::Counter(c), Op::Increment));
                    out.push(UpdateRequest::vertex(v, Tag::Palette, Op::MoveUp(c)));
                }
            }
        }
        out.push(UpdateRequest::vertex(u, Tag::Level, Op::SetLevel(to)));
        for j in from..to {
            for &v in gr.nbrs_at(u, j) {
                if let (false, Some(cv)) = (members.contains(&v), gr.color(v)) {
                    out.push(UpdateRequest::vertex(u, Tag::Counter(cv), Op::Decrement));
                }
            }
        }
        out
    });
    let mut buf = RequestBuffer::new();
    for (&u, list) in group.iter().zip(lists) {
        buf.push_list(u, list);
    }
    let mut work = barrier(g, &mut buf)?.applied;

    // Neighbors left between the old and new level now sit below the mover.
    for &u in group {
        for j in from..to {
            for &v in g.nbrs_at(u, j) {
                buf.record(u, UpdateRequest::vertex(u, Tag::Nbr(j), Op::Delete(v)));
                buf.record(u, UpdateRequest::vertex(u, Tag::Below, Op::Insert(v)));
            }
        }
    }
    work += barrier(g, &mut buf)?.applied;
    Ok(work)
}

/// Moves every vertex of `group`, all at level `from`, down to level `to`.
pub(crate) fn move_group_down(g: &mut GraphState, group: &[VertexId], from: Level, to: Level, exec: Exec) -> Result<u64> {
    debug_assert!(to < from && to >= BOTTOM_LEVEL);
    let members: HashSet<VertexId> = group.iter().copied().collect();
    let gr = &*g;
    let lists = exec.map(group, |&u| {
        let mut out = Vec::new();
        let c = gr.color(u);
        for v in gr.same_or_lower(u) {
            let lv = gr.level(v);
            out.push(UpdateRequest::vertex(v, Tag::Nbr(from), Op::Delete(u)));
            if members.contains(&v) || lv <= to {
                out.push(UpdateRequest::vertex(v, Tag::Nbr(to), Op::Insert(u)));
            } else {
                out.push(UpdateRequest::vertex(v, Tag::Below, Op::Insert(u)));
                if let Some(c) = c {
                    out.push(UpdateRequest::vertex(v, Tag::Counter(c), Op::Decrement));
                }
            }
        }
        out.push(UpdateRequest::vertex(u, Tag::Level, Op::SetLevel(to)));
        for &v in gr.below(u) {
            if let (true, Some(cv)) = (gr.level(v) >= to, gr.color(v)) {
                out.push(UpdateRequest::vertex(u, Tag::Counter(cv), Op::Increment));
                out.push(UpdateRequest::vertex(u, Tag::Palette, Op::MoveUp(cv)));
            }
        }
        out
    });
    let mut buf = RequestBuffer::new();
    for (&u, list) in group.iter().zip(lists) {
        buf.push_list(u, list);
    }
    let mut work = barrier(g, &mut buf)?.applied;

    // Former lower neighbors at levels to..from-1 are now level with or above the mover.
    for &u in group {
        for &v in g.below(u) {
            let lv = g.level(v);
            if lv >= to {
                buf.record(u, UpdateRequest::vertex(u, Tag::Below, Op::Delete(v)));
                buf.record(u, UpdateRequest::vertex(u, Tag::Nbr(lv), Op::Insert(v)));
            }
        }
    }
    work += barrier(g, &mut buf)?.applied;
    Ok(work)
}

/// Raises the upper-marked vertices of level `i`.
pub(crate) fn raise_level(cx: &mut Ctx, i: Level, snapshot: &UpperSnapshot) -> Result<()> {
    let members: Vec<VertexId> = cx.g.marks().get(MarkKind::Upper, i).iter().copied().collect();
    if members.is_empty() {
        return Ok(());
    }
    let lambda = cx.g.lambda();
    let expected = snapshot.iter().find(|(l, _)| *l == i).map_or(&[][..], |(_, s)| s.as_slice());
    let stable = expected.len() == members.len()
        && expected
            .iter()
            .zip(&members)
            .all(|(&(u, b), &w)| u == w && cx.g.level(u) == i && violates_upper(cx.g, u) && base_level(cx.g, u) == b);
    if !stable {
        cx.m.mark_stability_violations += 1;
    }

    // prefix[u][k - i - 1] = |N_u(5, k-1)| at the start, for k in i+1..=λ.
    let g = &*cx.g;
    let prefix: Vec<(Vec<u64>, usize)> = members
        .iter()
        .map(|&u| {
            let mut acc = g.below(u).len() as u64;
            let mut row = Vec::with_capacity((lambda - i) as usize);
            for j in i..lambda {
                acc += g.nbrs_at(u, j).len() as u64;
                row.push(acc);
            }
            (row, g.nbrs_at(u, i).len())
        })
        .collect();
    let slot: std::collections::HashMap<VertexId, usize> = members.iter().enumerate().map(|(k, &u)| (u, k)).collect();
    cx.m.work.raise += members.len() as u64 * (lambda - i) as u64;

    let cap = round_cap(cx.g.n());
    let mut plus = members.clone();
    let mut rounds = 0;
    for k in (i + 1..=lambda).rev() {
        let mut minus = Vec::new();
        let mut t = 0;
        loop {
            let g = &*cx.g;
            let holds = |u: VertexId| {
                let (row, n_i) = &prefix[slot[&u]];
                let left = (*n_i - g.nbrs_at(u, i).len()) as u64;
                let below_k = row[(k - i - 1) as usize] - left;
                let upto_k = below_k + g.nbrs_at(u, k).len() as u64;
                below_k >= pow3(k as u32 - 1) && upto_k <= pow3(k as u32)
            };
            let (active, failed): (Vec<VertexId>, Vec<VertexId>) = plus.iter().partition(|&&u| holds(u));
            minus.extend(failed);
            cx.m.work.raise += plus.len() as u64;
            if active.is_empty() {
                break;
            }
            if t >= cap {
                return Err(Error::RoundCap { phase: "raising", cap });
            }
            let key = cx.key(Phase::RaiseSample, pack_round(i, k, t));
            let sampled: Vec<VertexId> =
                active.iter().copied().filter(|&u| key.rng(u as u64).gen_range(0..RAISE_SAMPLE) == 0).collect();
            let in_sample: HashSet<VertexId> = sampled.iter().copied().collect();
            let alpha4 = pow3(k as u32 - 1);
            let moved: Vec<VertexId> = sampled
                .iter()
                .copied()
                .filter(|&u| 4 * g.nbrs_at(u, i).iter().filter(|v| in_sample.contains(v)).count() as u64 <= alpha4)
                .collect();
            cx.m.work.raise += active.len() as u64 + sampled.iter().map(|&u| g.nbrs_at(u, i).len() as u64).sum::<u64>();

            let mut drop = 0;
            if !moved.is_empty() {
                let (vs, es) = move_footprint(cx.g, &moved, k);
                let before = local_tokens_sixths(cx.g, &vs, &es);
                cx.m.work.raise += move_group_up(cx.g, &moved, i, k, cx.exec)? + (vs.len() + es.len()) as u64;
                let after = local_tokens_sixths(cx.g, &vs, &es);
                cx.ledger.apply(after - before);
                drop = before - after;
                cx.m.released_sixths += drop;
                cx.audit_ledger()?;
            }
            cx.m.raise_rounds.push(RaiseRound { level: i, target: k, active: active.len(), moved: moved.len(), drop_sixths: drop });
            let moved_set: HashSet<VertexId> = moved.into_iter().collect();
            plus = active.into_iter().filter(|u| !moved_set.contains(u)).collect();
            t += 1;
            rounds += 1;
        }
        plus = minus;
    }

    let bound = pow3(i as u32);
    for &u in &members {
        if cx.g.level(u) == i && cx.g.count_le(u, i) as u64 > bound {
            cx.m.raise_residual_violations += 1;
        }
    }
    cx.g.marks_mut().get_mut(MarkKind::Upper, i).clear();
    cx.m.level_mut(i).rounds_raise = rounds;
    Ok(())
}

/// Cap on lowering rounds: the coloring cap scaled by the inverse sampling
/// probability, since a lone vertex needs about 1458 rounds on average.
pub fn lower_round_cap(n: usize) -> u64 {
    round_cap(n) * LOWER_SAMPLE as u64
}

/// Lowers the lower-marked vertices of level `i` by four levels.
pub(crate) fn lower_level(cx: &mut Ctx, i: Level) -> Result<()> {
    let mut set: Vec<VertexId> = cx.g.marks().get(MarkKind::Lower, i).iter().copied().collect();
    if set.is_empty() {
        return Ok(());
    }
    if set.iter().any(|&u| cx.g.level(u) != i || !violates_lower(cx.g, u) || violates_upper(cx.g, u)) {
        cx.m.mark_stability_violations += 1;
    }
    let cap = lower_round_cap(cx.g.n());
    let to = i - LOWER_STEP;
    let filter_bound = pow3((i - BOTTOM_LEVEL) as u32);
    let mut t = 0;
    loop {
        let g = &*cx.g;
        let before_len = set.len();
        set.retain(|&u| g.level(u) == i && violates_lower(g, u));
        cx.m.lower_refiltered += before_len - set.len();
        cx.m.work.lower += before_len as u64;
        if set.is_empty() {
            break;
        }
        if t >= cap {
            return Err(Error::RoundCap { phase: "lowering", cap });
        }
        let key = cx.key(Phase::LowerSample, pack_round(i, 0, t));
        let sampled: Vec<VertexId> =
            set.iter().copied().filter(|&u| key.rng(u as u64).gen_range(0..LOWER_SAMPLE) == 0).collect();
        let in_sample: HashSet<VertexId> = sampled.iter().copied().collect();
        let moved: Vec<VertexId> = sampled
            .iter()
            .copied()
            .filter(|&u| g.nbrs_at(u, i).iter().filter(|v| in_sample.contains(v)).count() as u64 <= filter_bound)
            .collect();
        cx.m.work.lower += sampled.iter().map(|&u| g.nbrs_at(u, i).len() as u64).sum::<u64>();

        let mut drop = 0;
        if !moved.is_empty() {
            let (vs, es) = move_footprint(cx.g, &moved, i);
            let before = local_tokens_sixths(cx.g, &vs, &es);
            cx.m.work.lower += move_group_down(cx.g, &moved, i, to, cx.exec)? + (vs.len() + es.len()) as u64;
            let after = local_tokens_sixths(cx.g, &vs, &es);
            cx.ledger.apply(after - before);
            drop = before - after;
            cx.m.released_sixths += drop;
            cx.audit_ledger()?;
        }
        cx.m.lower_rounds.push(LowerRound { level: i, active: set.len(), moved: moved.len(), drop_sixths: drop });
        let moved_set: HashSet<VertexId> = moved.into_iter().collect();
        set.retain(|u| !moved_set.contains(u));
        t += 1;
    }
    cx.g.marks_mut().get_mut(MarkKind::Lower, i).clear();
    cx.m.level_mut(i).rounds_lower = t;
    cx.m.level_mut(i).marked_lower = cx.m.level_mut(i).marked_lower.max(0);
    Ok(())
}
