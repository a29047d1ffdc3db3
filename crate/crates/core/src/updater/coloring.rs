use std::collections::HashMap;

use crate::conditions::{base_level, classify};
use crate::error::{Error, Result};
use crate::framework::{barrier, Op, RequestBuffer, Tag, UpdateRequest};
use crate::graph::{pow3, ColorId, GraphState, Level, MarkKind, Timestamp, VertexId, BOTTOM_LEVEL};
use crate::palette::{build_blank_prefix, build_blank_unique_prefix};
use crate::partial::{partial_color, round_cap, ColoringInstance};
use crate::rng::{pack_round, Phase};
use crate::updater::init::mark_kind;
use crate::updater::metrics::RecordEntry;
use crate::updater::{color_requests, uncolor_requests, Ctx};

/// Adjacency of the subgraph induced by `members`, all sitting at `level`.
fn induced_adjacency(g: &GraphState, members: &[VertexId], level: Level) -> Vec<Vec<usize>> {
    let index: HashMap<VertexId, usize> = members.iter().enumerate().map(|(k, &u)| (u, k)).collect();
    members
        .iter()
        .map(|&u| g.nbrs_at(u, level).iter().filter_map(|v| index.get(v).copied()).collect())
        .collect()
}

/// Lower bound on the palette of an unmarked vertex at level i beyond deg + 1.
fn unmarked_floor(i: Level) -> usize {
    if i > BOTTOM_LEVEL {
        pow3((i - BOTTOM_LEVEL) as u32).div_ceil(2) as usize + 1
    } else {
        1
    }
}

fn record(cx: &mut Ctx, u: VertexId, level: Level, dirty: bool, chain_end: bool) {
    let entry = RecordEntry {
        vertex: u,
        batch: cx.batch,
        level,
        dirty,
        base_level: base_level(cx.g, u),
        chain_start: cx.chain_starts.contains(&u),
        chain_end,
    };
    cx.m.records.push(entry);
    cx.m.recolored += 1;
}

/// Colors every upper- and lower-marked vertex at level `i` with blank
/// colors. Their timestamps become `Det`.
pub(crate) fn color_marked(cx: &mut Ctx, i: Level) -> Result<()> {
    let marks = cx.g.marks();
    let upper = marks.get(MarkKind::Upper, i).len();
    let lower = marks.get(MarkKind::Lower, i).len();
    let mut members: Vec<VertexId> =
        marks.get(MarkKind::Upper, i).iter().chain(marks.get(MarkKind::Lower, i)).copied().collect();
    if members.is_empty() {
        return Ok(());
    }
    members.sort_unstable();
    let adj = induced_adjacency(cx.g, &members, i);
    let mut palettes = Vec::with_capacity(members.len());
    for (k, &u) in members.iter().enumerate() {
        let count = build_blank_prefix(cx.g, u)?;
        let need = adj[k].len() + 1;
        if count < need {
            return Err(Error::invariant(format!("marked vertex {u} has {count} blank colors, needs {need}")));
        }
        palettes.push(cx.g.palette(u).lower_prefix(need));
        cx.m.work.color_marked += (cx.g.below(u).len() + need + adj[k].len()) as u64;
    }
    let mut inst = ColoringInstance::new(members.iter().map(|&u| u as u64).collect(), adj, palettes)?;
    let cap = round_cap(cx.g.n());
    let mut t = 0;
    while !inst.is_empty() {
        if t >= cap {
            return Err(Error::RoundCap { phase: "coloring marked vertices", cap });
        }
        inst.check_palettes()?;
        let res = partial_color(&inst, cx.key(Phase::ColorMarked, pack_round(i, 0, t)), cx.exec)?;
        let colored: Vec<(VertexId, ColorId)> = res.colored.iter().map(|&(k, c)| (inst.ids[k] as VertexId, c)).collect();
        let g = &*cx.g;
        let lists = cx.exec.map(&colored, |&(u, c)| color_requests(g, u, c, Timestamp::Det));
        let mut buf = RequestBuffer::new();
        for (&(u, _), list) in colored.iter().zip(lists) {
            buf.push_list(u, list);
        }
        let out = barrier(cx.g, &mut buf)?;
        cx.m.work.color_marked += res.work + out.applied;
        for &(u, _) in &colored {
            record(cx, u, i, true, true);
        }
        inst = inst.residual(&res);
        t += 1;
    }
    let stats = cx.m.level_mut(i);
    stats.marked_upper = upper;
    stats.marked_lower = lower;
    stats.rounds_marked = t;
    Ok(())
}

/// Colors the unmarked vertices at level `i` from their blank and unique
/// colors. Taking a unique color uncolors the one lower neighbor holding it.
pub(crate) fn color_unmarked(cx: &mut Ctx, i: Level) -> Result<()> {
    let mut remaining: Vec<VertexId> = cx.g.marks().get(MarkKind::Unmarked, i).iter().copied().collect();
    if remaining.is_empty() {
        return Ok(());
    }
    cx.m.level_mut(i).unmarked = remaining.len();
    let cap = round_cap(cx.g.n());
    let floor = unmarked_floor(i);
    let mut t = 0;
    while !remaining.is_empty() {
        if t >= cap {
            return Err(Error::RoundCap { phase: "coloring unmarked vertices", cap });
        }
        let adj = induced_adjacency(cx.g, &remaining, i);
        let mut palettes = Vec::with_capacity(remaining.len());
        for (k, &u) in remaining.iter().enumerate() {
            let count = build_blank_unique_prefix(cx.g, u)?;
            let need = adj[k].len() + 1;
            if count < need {
                return Err(Error::invariant(format!(
                    "unmarked vertex {u} has {count} blank or unique colors, needs {need}"
                )));
            }
            let size = need.max(floor).min(count);
            palettes.push(cx.g.palette(u).lower_prefix(size));
            cx.m.work.color_unmarked += (cx.g.below(u).len() + size + adj[k].len()) as u64;
        }
        let inst = ColoringInstance::new(remaining.iter().map(|&u| u as u64).collect(), adj, palettes)?;
        let res = partial_color(&inst, cx.key(Phase::ColorUnmarked, pack_round(i, 0, t)), cx.exec)?;
        let colored: Vec<(VertexId, ColorId)> = res.colored.iter().map(|&(k, c)| (inst.ids[k] as VertexId, c)).collect();

        let g = &*cx.g;
        let ts = Timestamp::At { batch: cx.batch, level: i };
        let lists = cx.exec.map(&colored, |&(u, c)| {
            let mut list = color_requests(g, u, c, ts);
            let mut holders = g.below(u).iter().filter(|&&v| g.color(v) == Some(c));
            if let (Some(&v), None) = (holders.next(), holders.next()) {
                list.push(UpdateRequest::global(Tag::UniqueTable, Op::Insert(v)));
            }
            (list, g.below(u).len() as u64)
        });
        let mut buf = RequestBuffer::new();
        let mut unique_of = Vec::with_capacity(colored.len());
        for (&(u, _), (list, scanned)) in colored.iter().zip(lists) {
            unique_of.push(list.last().is_some_and(|r| r.tag == Tag::UniqueTable));
            cx.m.work.color_unmarked += scanned;
            buf.push_list(u, list);
        }
        let out = barrier(cx.g, &mut buf)?;
        cx.m.work.color_unmarked += res.work + out.applied;

        // Uncolor the unique holders and file them at their own level.
        let g = &*cx.g;
        let lists = cx.exec.map(&out.table, |&v| {
            let mut list = uncolor_requests(g, v);
            let kind = mark_kind(classify(g, v));
            list.push(UpdateRequest::global(Tag::Mark(g.level(v), kind), Op::Insert(v)));
            list
        });
        for (&v, list) in out.table.iter().zip(lists) {
            buf.push_list(v, list);
        }
        let second = barrier(cx.g, &mut buf)?;
        cx.m.work.color_unmarked += second.applied;
        cx.m.uncolored_unique += out.table.len();

        for (&(u, _), unique) in colored.iter().zip(unique_of) {
            record(cx, u, i, false, !unique);
        }
        remaining = res.rejected.iter().map(|&k| inst.ids[k] as VertexId).collect();
        t += 1;
    }
    cx.g.marks_mut().get_mut(MarkKind::Unmarked, i).clear();
    cx.m.level_mut(i).rounds_unmarked = t;
    Ok(())
}
