//! Level conditions, vertex classification and the token ledger.
//!
//! Tokens are kept in sixths so every quantity is an integer. An edge holds
//! λ − max(ℓu, ℓv) tokens; a vertex above level 5 holds
//! max(0, 3^(ℓ−1) − |below|) sixths.

use serde::Serialize;

use crate::graph::{floor_log3, pow3, GraphState, Level, VertexId, BOTTOM_LEVEL};

/// Lowest level from which a vertex can be lowered (to level i − 4 ≥ 5).
pub const LOWER_MARK_MIN_LEVEL: Level = BOTTOM_LEVEL + 4;

/// |N_u(5, ℓ)| > 3^(ℓ+2).
pub fn violates_upper(g: &GraphState, u: VertexId) -> bool {
    let l = g.level(u);
    g.count_le(u, l) as u64 > pow3(l as u32 + 2)
}

/// ℓ > 5 and |N_u(5, ℓ−1)| < 3^(ℓ−5).
pub fn violates_lower(g: &GraphState, u: VertexId) -> bool {
    let l = g.level(u);
    l > BOTTOM_LEVEL && (g.below(u).len() as u64) < pow3((l - BOTTOM_LEVEL) as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    UpperMarked,
    LowerMarked,
    Clean,
}

/// Upper violations take precedence. Lower violations only count from
/// level 9 up, since lower levels have no room to move down.
pub fn classify(g: &GraphState, u: VertexId) -> Classification {
    if violates_upper(g, u) {
        Classification::UpperMarked
    } else if g.level(u) >= LOWER_MARK_MIN_LEVEL && violates_lower(g, u) {
        Classification::LowerMarked
    } else {
        Classification::Clean
    }
}

/// max(⌊log₃|N_u(5, ℓ)|⌋, ℓ), or ℓ when that set is empty.
pub fn base_level(g: &GraphState, u: VertexId) -> Level {
    let l = g.level(u);
    match g.count_le(u, l) {
        0 => l,
        c => (floor_log3(c as u64) as Level).max(l),
    }
}

pub fn edge_tokens(lambda: Level, lu: Level, lv: Level) -> u64 {
    (lambda - lu.max(lv)) as u64
}

pub fn vertex_tokens_sixths_raw(level: Level, below: usize) -> u64 {
    if level > BOTTOM_LEVEL {
        pow3(level as u32 - 1).saturating_sub(below as u64)
    } else {
        0
    }
}

pub fn vertex_tokens_sixths(g: &GraphState, u: VertexId) -> u64 {
    vertex_tokens_sixths_raw(g.level(u), g.below(u).len())
}

/// Γ in sixths, recomputed from scratch by scanning every adjacency list and
/// comparing levels directly.
pub fn total_tokens_sixths(g: &GraphState) -> u64 {
    let lambda = g.lambda();
    let mut total = 0;
    for u in 0..g.n() as VertexId {
        let lu = g.level(u);
        let mut lower = 0;
        for v in g.neighbors(u) {
            let lv = g.level(v);
            if lv < lu {
                lower += 1;
            }
            if u < v {
                total += 6 * edge_tokens(lambda, lu, lv);
            }
        }
        total += vertex_tokens_sixths_raw(lu, lower);
    }
    total
}

/// Tokens held by the given vertices and edges, in sixths. Edges must be
/// listed once each.
pub fn local_tokens_sixths(g: &GraphState, vertices: &[VertexId], edges: &[(VertexId, VertexId)]) -> i64 {
    let lambda = g.lambda();
    let v: u64 = vertices.iter().map(|&x| vertex_tokens_sixths(g, x)).sum();
    let e: u64 = edges.iter().map(|&(a, b)| 6 * edge_tokens(lambda, g.level(a), g.level(b))).sum();
    (v + e) as i64
}

/// Γ maintained by local deltas, to be compared against
/// [`total_tokens_sixths`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TokenLedger {
    gamma_sixths: i64,
}

impl TokenLedger {
    pub fn from_state(g: &GraphState) -> Self {
        TokenLedger { gamma_sixths: total_tokens_sixths(g) as i64 }
    }

    pub fn gamma_sixths(&self) -> i64 {
        self.gamma_sixths
    }

    pub fn apply(&mut self, delta_sixths: i64) {
        self.gamma_sixths += delta_sixths;
    }

    /// Ok when the ledger matches a brute-force recount.
    pub fn check(&self, g: &GraphState) -> Result<(), (i64, u64)> {
        let brute = total_tokens_sixths(g);
        if brute as i64 == self.gamma_sixths {
            Ok(())
        } else {
            Err((self.gamma_sixths, brute))
        }
    }
}
