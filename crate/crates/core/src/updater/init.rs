use std::collections::BTreeSet;

use crate::conditions::{classify, edge_tokens, vertex_tokens_sixths, Classification};
use crate::error::Result;
use crate::framework::{barrier, Op, RequestBuffer, Tag, UpdateRequest};
use crate::graph::{later_endpoint, GraphState, MarkKind, VertexId};
use crate::updater::{uncolor_requests, Ctx, EdgeOp, EdgeUpdate};

/// Where `owner` files its neighbor `other`.
fn nbr_tag(g: &GraphState, owner: VertexId, other: VertexId) -> Tag {
    let lo = g.level(other);
    if lo >= g.level(owner) {
        Tag::Nbr(lo)
    } else {
        Tag::Below
    }
}

/// Structural requests for one edge update, plus the counter and palette
/// changes at an endpoint that gains or loses a colored up-neighbor.
pub(crate) fn edge_requests(g: &GraphState, upd: &EdgeUpdate) -> Vec<UpdateRequest> {
    let mut out = Vec::with_capacity(6);
    for (a, b) in [(upd.u, upd.v), (upd.v, upd.u)] {
        let tag = nbr_tag(g, a, b);
        let counts = g.level(b) >= g.level(a);
        match upd.op {
            EdgeOp::Insert => {
                out.push(UpdateRequest::vertex(a, tag, Op::Insert(b)));
                if let (true, Some(c)) = (counts, g.color(b)) {
                    out.push(UpdateRequest::vertex(a, Tag::Counter(c), Op::Increment));
                    out.push(UpdateRequest::vertex(a, Tag::Palette, Op::MoveUp(c)));
                }
            }
            EdgeOp::Delete => {
                out.push(UpdateRequest::vertex(a, tag, Op::Delete(b)));
                if let (true, Some(c)) = (counts, g.color(b)) {
                    out.push(UpdateRequest::vertex(a, Tag::Counter(c), Op::Decrement));
                }
            }
        }
    }
    out
}

pub(crate) fn mark_kind(class: Classification) -> MarkKind {
    match class {
        Classification::UpperMarked => MarkKind::Upper,
        Classification::LowerMarked => MarkKind::Lower,
        Classification::Clean => MarkKind::Unmarked,
    }
}

pub(crate) fn init_phase(cx: &mut Ctx, updates: &[EdgeUpdate]) -> Result<()> {
    let g = &*cx.g;
    let lambda = g.lambda();
    let mut endpoints: Vec<VertexId> = updates.iter().flat_map(|e| [e.u, e.v]).collect();
    endpoints.sort_unstable();
    endpoints.dedup();
    let before: i64 = endpoints.iter().map(|&x| vertex_tokens_sixths(g, x) as i64).sum();
    let edge_delta: i64 = updates
        .iter()
        .map(|e| {
            let t = 6 * edge_tokens(lambda, g.level(e.u), g.level(e.v)) as i64;
            if e.op == EdgeOp::Insert {
                t
            } else {
                -t
            }
        })
        .sum();

    // Which endpoints lose their color is decided on the colors before any
    // uncoloring, so it does not matter in what order the edges are seen.
    let blank: BTreeSet<VertexId> = updates
        .iter()
        .filter(|e| e.op == EdgeOp::Insert && g.color(e.u).is_some() && g.color(e.u) == g.color(e.v))
        .map(|e| later_endpoint(e.u, g.timestamp(e.u), e.v, g.timestamp(e.v)))
        .collect();

    let lists = cx.exec.map(updates, |e| edge_requests(g, e));
    let mut buf = RequestBuffer::new();
    for (e, list) in updates.iter().zip(lists) {
        buf.push_list(e.u, list);
    }
    let out = barrier(cx.g, &mut buf)?;
    cx.m.work.init += out.applied + updates.len() as u64;

    let after: i64 = endpoints.iter().map(|&x| vertex_tokens_sixths(cx.g, x) as i64).sum();
    let injected = after - before + edge_delta;
    cx.ledger.apply(injected);
    cx.m.injected_sixths = injected;

    let g = &*cx.g;
    let blank_list: Vec<VertexId> = blank.iter().copied().collect();
    let lists = cx.exec.map(&blank_list, |&x| {
        let mut list = uncolor_requests(g, x);
        let kind = mark_kind(classify(g, x));
        list.push(UpdateRequest::global(Tag::Mark(g.level(x), kind), Op::Insert(x)));
        list
    });
    for (&x, list) in blank_list.iter().zip(lists) {
        buf.push_list(x, list);
    }
    let out = barrier(cx.g, &mut buf)?;
    cx.m.work.init += out.applied;
    cx.m.blank_initial = blank.len();
    cx.chain_starts = blank;
    cx.audit_ledger()
}
