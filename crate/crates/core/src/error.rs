use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An operation was called on input that violates its contract.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("instance has {nodes} nodes, brute force is limited to {limit}")]
    SizeLimit { nodes: usize, limit: usize },

    #[error("input is not a tree: {0}")]
    NotATree(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
