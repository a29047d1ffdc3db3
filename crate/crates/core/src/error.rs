use thiserror::Error;

use crate::graph::{ColorId, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: u64, n: usize },

    #[error("color {color} outside the palette 0..={max}")]
    ColorOutOfRange { color: ColorId, max: u32 },

    #[error("batch would give vertex {vertex} degree {degree} > Δ = {delta}")]
    DegreeOverflow { vertex: VertexId, degree: usize, delta: u32 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{phase} exceeded its cap of {cap} rounds")]
    RoundCap { phase: &'static str, cap: u64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// True for errors caused by bad input rather than by a broken invariant.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::VertexOutOfRange { .. }
                | Error::DegreeOverflow { .. }
                | Error::Parse { .. }
                | Error::Infeasible(_)
                | Error::Io(_)
        )
    }
}
