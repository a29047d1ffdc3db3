//! Deferred updates to shared structures.
//!
//! During a phase each vertex only appends requests to its own list. At a
//! barrier all lists are concatenated, sorted by (target, tag, op, argument)
//! and every (target, tag) group is applied as one batch, ops in the order
//! deletions, insertions, decrements, increments, moves down, moves up, sets.
//! Sorting makes the outcome independent of the order requests were made in.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Bucket, ColorId, GraphState, Level, MarkKind, Timestamp, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Vertex(VertexId),
    Global,
}

/// Which structure of the target a request addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Nbr(Level),
    Below,
    Counter(ColorId),
    Palette,
    Chi,
    Level,
    Timestamp,
    Mark(Level, MarkKind),
    /// Vertices to be uncolored because a neighbor took their unique color.
    UniqueTable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Delete(VertexId),
    Insert(VertexId),
    Decrement,
    Increment,
    MoveDown(ColorId),
    MoveUp(ColorId),
    SetColor(Option<ColorId>),
    SetLevel(Level),
    SetTimestamp(Timestamp),
}

impl Op {
    fn rank(&self) -> u8 {
        match self {
            Op::Delete(_) => 0,
            Op::Insert(_) => 1,
            Op::Decrement => 2,
            Op::Increment => 3,
            Op::MoveDown(_) => 4,
            Op::MoveUp(_) => 5,
            Op::SetColor(_) | Op::SetLevel(_) | Op::SetTimestamp(_) => 6,
        }
    }

    fn arg(&self) -> u64 {
        match *self {
            Op::Delete(v) | Op::Insert(v) => v as u64,
            Op::MoveDown(c) | Op::MoveUp(c) => c as u64,
            Op::SetColor(c) => c.map_or(u64::MAX, u64::from),
            Op::SetLevel(l) => l as u64,
            Op::SetTimestamp(Timestamp::Det) => u64::MAX,
            Op::SetTimestamp(Timestamp::At { batch, level }) => (batch << 8) | level as u64,
            Op::Decrement | Op::Increment => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UpdateRequest {
    pub target: Target,
    pub tag: Tag,
    pub op: Op,
}

impl UpdateRequest {
    pub fn vertex(target: VertexId, tag: Tag, op: Op) -> Self {
        UpdateRequest { target: Target::Vertex(target), tag, op }
    }

    pub fn global(tag: Tag, op: Op) -> Self {
        UpdateRequest { target: Target::Global, tag, op }
    }

    fn key(&self) -> (Target, Tag, u8, u64) {
        (self.target, self.tag, self.op.rank(), self.op.arg())
    }
}

/// Per-vertex request lists of one phase.
#[derive(Clone, Debug, Default)]
pub struct RequestBuffer {
    lists: Vec<(VertexId, Vec<UpdateRequest>)>,
}

impl RequestBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends one request to the list of vertex `u`.
    pub fn record(&mut self, u: VertexId, req: UpdateRequest) {
        match self.lists.last_mut() {
            Some((owner, list)) if *owner == u => list.push(req),
            _ => self.lists.push((u, vec![req])),
        }
    }

    /// Adds the whole list built by vertex `u`.
    pub fn push_list(&mut self, u: VertexId, list: Vec<UpdateRequest>) {
        if !list.is_empty() {
            self.lists.push((u, list));
        }
    }

    pub fn len(&self) -> usize {
        self.lists.iter().map(|(_, l)| l.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.iter().all(|(_, l)| l.is_empty())
    }

    pub fn lists(&self) -> &[(VertexId, Vec<UpdateRequest>)] {
        &self.lists
    }

    pub fn lists_mut(&mut self) -> &mut Vec<(VertexId, Vec<UpdateRequest>)> {
        &mut self.lists
    }
}

/// What a barrier did besides mutating the graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BarrierOutcome {
    pub applied: u64,
    /// Counters that received a decrement and ended at zero.
    pub zeroed: Vec<(VertexId, ColorId)>,
    /// Contents of the unique-neighbor table, sorted and deduplicated.
    pub table: Vec<VertexId>,
}

/// Applies every request in `buf` and clears it.
pub fn apply_all(g: &mut GraphState, buf: &mut RequestBuffer) -> Result<BarrierOutcome> {
    let mut all: Vec<UpdateRequest> = buf.lists.drain(..).flat_map(|(_, l)| l).collect();
    all.sort_unstable_by_key(UpdateRequest::key);
    let mut out = BarrierOutcome { applied: all.len() as u64, ..Default::default() };
    let mut table = BTreeSet::new();
    for group in all.chunk_by(|a, b| a.target == b.target && a.tag == b.tag) {
        apply_group(g, group, &mut out, &mut table)?;
    }
    out.table = table.into_iter().collect();
    Ok(out)
}

/// [`apply_all`] followed by a second barrier that moves every color whose
/// counter was decremented to zero back into the lower palette.
pub fn barrier(g: &mut GraphState, buf: &mut RequestBuffer) -> Result<BarrierOutcome> {
    let mut out = apply_all(g, buf)?;
    let mut moves = RequestBuffer::new();
    for &(v, c) in &out.zeroed {
        if g.mu(v, c) == 0 && g.palette(v).is_upper(c) {
            moves.record(v, UpdateRequest::vertex(v, Tag::Palette, Op::MoveDown(c)));
        }
    }
    if !moves.is_empty() {
        let second = apply_all(g, &mut moves)?;
        out.applied += second.applied;
    }
    Ok(out)
}

fn fault(group: &[UpdateRequest]) -> Error {
    Error::invariant(format!("malformed request group {:?}", group[0]))
}

fn apply_group(
    g: &mut GraphState,
    group: &[UpdateRequest],
    out: &mut BarrierOutcome,
    table: &mut BTreeSet<VertexId>,
) -> Result<()> {
    let head = group[0];
    match head.target {
        Target::Vertex(u) => {
            if u as usize >= g.n() {
                return Err(Error::invariant(format!("request for missing vertex {u}")));
            }
            match head.tag {
                Tag::Nbr(_) | Tag::Below => {
                    let bucket = match head.tag {
                        Tag::Nbr(l) => Bucket::At(l),
                        _ => Bucket::Below,
                    };
                    for r in group {
                        match r.op {
                            Op::Delete(v) => {
                                g.bucket_remove(u, bucket, v);
                            }
                            Op::Insert(v) => {
                                g.bucket_insert(u, bucket, v);
                            }
                            _ => return Err(fault(group)),
                        }
                    }
                }
                Tag::Counter(c) => {
                    let mut dec = 0;
                    let mut inc = 0;
                    for r in group {
                        match r.op {
                            Op::Decrement => dec += 1,
                            Op::Increment => inc += 1,
                            _ => return Err(fault(group)),
                        }
                    }
                    if g.counter_update(u, c, dec, inc)? == 0 && dec > 0 {
                        out.zeroed.push((u, c));
                    }
                }
                Tag::Palette => {
                    let mut down = Vec::new();
                    let mut up = Vec::new();
                    for r in group {
                        match r.op {
                            Op::MoveDown(c) => down.push(c),
                            Op::MoveUp(c) => up.push(c),
                            _ => return Err(fault(group)),
                        }
                    }
                    let pal = g.palette_mut(u);
                    pal.move_down(&down)?;
                    pal.move_up(&up)?;
                }
                Tag::Chi => match single_set(group)? {
                    Op::SetColor(c) => g.set_color(u, c)?,
                    _ => return Err(fault(group)),
                },
                Tag::Level => match single_set(group)? {
                    Op::SetLevel(l) => g.set_level(u, l)?,
                    _ => return Err(fault(group)),
                },
                Tag::Timestamp => match single_set(group)? {
                    Op::SetTimestamp(ts) => g.set_timestamp(u, ts),
                    _ => return Err(fault(group)),
                },
                Tag::Mark(..) | Tag::UniqueTable => return Err(fault(group)),
            }
        }
        Target::Global => match head.tag {
            Tag::Mark(level, kind) => {
                let set = g.marks_mut().get_mut(kind, level);
                for r in group {
                    match r.op {
                        Op::Delete(v) => {
                            set.remove(&v);
                        }
                        Op::Insert(v) => {
                            set.insert(v);
                        }
                        _ => return Err(fault(group)),
                    }
                }
            }
            Tag::UniqueTable => {
                for r in group {
                    match r.op {
                        Op::Insert(v) => {
                            table.insert(v);
                        }
                        _ => return Err(fault(group)),
                    }
                }
            }
            _ => return Err(fault(group)),
        },
    }
    Ok(())
}

/// Scalar sets must agree; identical duplicates are fine.
fn single_set(group: &[UpdateRequest]) -> Result<Op> {
    let first = group[0].op;
    if group.iter().any(|r| r.op != first) {
        return Err(Error::invariant(format!("conflicting sets on {:?}", group[0])));
    }
    Ok(first)
}
