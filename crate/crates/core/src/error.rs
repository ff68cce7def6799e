use std::io;

use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("graph too large: {0}")]
    GraphTooLarge(String),

    #[error("invalid binary graph cache: {0}")]
    CacheFormat(String),

    #[error("node {0} is out of range")]
    NodeOutOfRange(u64),

    #[error("node {0} is isolated")]
    IsolatedNode(NodeId),

    #[error("s and t must be distinct")]
    SameEndpoints,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph is bipartite (mixing factor is 1)")]
    Bipartite,

    #[error("node count {n} exceeds the dense cap {cap}; use push or probewalk instead")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("probe index {index} outside the active set")]
    InactiveIndex { index: u64 },

    #[error("predicted walk steps {predicted} exceed the budget {budget}")]
    BudgetExceeded { predicted: u128, budget: u128 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Errors caused by caller input rather than the environment.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::EmptyGraph
                | Error::NodeOutOfRange(_)
                | Error::IsolatedNode(_)
                | Error::SameEndpoints
                | Error::InvalidParameter(_)
                | Error::Disconnected
                | Error::Bipartite
                | Error::DenseCapExceeded { .. }
                | Error::InactiveIndex { .. }
                | Error::BudgetExceeded { .. }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io(_) => "io",
            Error::Parse { .. } => "parse",
            Error::EmptyGraph => "empty_graph",
            Error::GraphTooLarge(_) => "graph_too_large",
            Error::CacheFormat(_) => "cache_format",
            Error::NodeOutOfRange(_) => "node_out_of_range",
            Error::IsolatedNode(_) => "isolated_node",
            Error::SameEndpoints => "same_endpoints",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Disconnected => "disconnected",
            Error::Bipartite => "bipartite",
            Error::DenseCapExceeded { .. } => "dense_cap_exceeded",
            Error::InactiveIndex { .. } => "inactive_index",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::Numerical(_) => "numerical",
        }
    }
}
