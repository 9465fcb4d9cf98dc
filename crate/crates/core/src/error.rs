use std::io;

use thiserror::Error;

use crate::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arc {source_id} -> {target}: weight {weight} is outside [0, 1]")]
    WeightOutOfRange {
        source_id: u64,
        target: u64,
        weight: f64,
    },

    #[error("node {node}: incoming weights sum to {sum}, exceeding 1 (linear threshold requires <= 1)")]
    ThresholdConstraint { node: NodeId, sum: f64 },

    #[error("node id {node} is out of range for a graph with {node_count} nodes")]
    InvalidNode { node: u64, node_count: usize },

    #[error("duplicate seed node {0}")]
    DuplicateSeed(NodeId),

    #[error("model mismatch: expected {expected}, got {actual}")]
    ModelMismatch {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("budget k = {k} is invalid for a graph with {node_count} nodes")]
    Budget { k: usize, node_count: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown node label {0:?}")]
    UnknownLabel(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by invalid data or parameters rather than I/O.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
