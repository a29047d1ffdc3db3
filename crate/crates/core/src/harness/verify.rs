//! Brute-force propriety oracle.

use serde::Serialize;

use crate::baselines::{FolkloreState, RelaxedSequential};
use crate::graph::{ColorId, GraphState, VertexId};

/// Read access the oracle needs.
pub trait ColoringView {
    fn n(&self) -> usize;
    /// Colors must lie in `0..num_colors`.
    fn num_colors(&self) -> u32;
    fn color_of(&self, u: VertexId) -> Option<ColorId>;
    fn edge_list(&self) -> Vec<(VertexId, VertexId)>;
}

impl ColoringView for GraphState {
    fn n(&self) -> usize {
        GraphState::n(self)
    }
    fn num_colors(&self) -> u32 {
        self.delta() + 1
    }
    fn color_of(&self, u: VertexId) -> Option<ColorId> {
        self.color(u)
    }
    fn edge_list(&self) -> Vec<(VertexId, VertexId)> {
        self.edges()
    }
}

impl ColoringView for RelaxedSequential {
    fn n(&self) -> usize {
        self.graph().n()
    }
    fn num_colors(&self) -> u32 {
        self.graph().delta() + 1
    }
    fn color_of(&self, u: VertexId) -> Option<ColorId> {
        self.graph().color(u)
    }
    fn edge_list(&self) -> Vec<(VertexId, VertexId)> {
        self.graph().edges()
    }
}

impl ColoringView for FolkloreState {
    fn n(&self) -> usize {
        self.colors().len()
    }
    fn num_colors(&self) -> u32 {
        FolkloreState::num_colors(self)
    }
    fn color_of(&self, u: VertexId) -> Option<ColorId> {
        Some(self.color(u))
    }
    fn edge_list(&self) -> Vec<(VertexId, VertexId)> {
        (0..self.colors().len() as VertexId)
            .flat_map(|u| self.neighbors(u).filter(move |&v| u < v).map(move |v| (u, v)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    Blank { vertex: VertexId },
    OutOfRange { vertex: VertexId, color: ColorId },
    Monochromatic { u: VertexId, v: VertexId, color: ColorId },
}

/// Every blank vertex, every color outside the palette and every edge whose
/// endpoints share a color.
pub fn verify_proper<C: ColoringView + ?Sized>(g: &C) -> Vec<Violation> {
    let mut out = Vec::new();
    for u in 0..g.n() as VertexId {
        match g.color_of(u) {
            None => out.push(Violation::Blank { vertex: u }),
            Some(c) if c >= g.num_colors() => out.push(Violation::OutOfRange { vertex: u, color: c }),
            Some(_) => {}
        }
    }
    for (u, v) in g.edge_list() {
        if let (Some(a), Some(b)) = (g.color_of(u), g.color_of(v)) {
            if a == b {
                out.push(Violation::Monochromatic { u, v, color: a });
            }
        }
    }
    out
}
