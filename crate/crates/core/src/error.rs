use thiserror::Error;

use crate::hypergraph::{EdgeId, VertexId, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("edge {edge} has no pins")]
    EmptyEdge { edge: EdgeId },
    #[error("edge {edge} has weight 0, weights must be at least 1")]
    ZeroWeight { edge: EdgeId },
    #[error("edge {edge} references vertex {vertex}, but n = {n}")]
    VertexOutOfRange { edge: EdgeId, vertex: VertexId, n: usize },
    #[error("vertex {vertex} has capacity 0")]
    ZeroCapacity { vertex: VertexId },
    #[error("invalid weight range [{lo}, {hi}]")]
    BadWeightRange { lo: Weight, hi: Weight },
    #[error("expected {expected} {what}, found {found}")]
    LengthMismatch { what: &'static str, expected: usize, found: usize },
    #[error("unknown edge id {edge}")]
    UnknownEdge { edge: EdgeId },
    #[error("edge {edge} is already matched")]
    DuplicateEdge { edge: EdgeId },
    #[error("adding edge {edge} exceeds the capacity of vertex {vertex}")]
    CapacityExceeded { edge: EdgeId, vertex: VertexId },
    #[error("matching does not belong to this hypergraph")]
    ShapeMismatch,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}
