use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for graph with {node_count} nodes")]
    IndexOutOfRange { index: usize, node_count: usize },

    #[error("graph contains a directed cycle through edge {from} -> {to}")]
    Cycle { from: NodeId, to: NodeId },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{count} node(s) have no date, e.g. node {first}")]
    MissingDates { count: usize, first: NodeId, nodes: Vec<NodeId> },

    #[error("duplicate-edge repair failed after {attempts} swaps; graph is pathological for this null model")]
    RepairFailed { attempts: usize },

    #[error("calibration cannot reach M = {target}; achievable mean M spans [{lo:.1}, {hi:.1}]")]
    Infeasible { target: f64, lo: f64, hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
