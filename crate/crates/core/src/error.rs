use crate::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("no connected deployment found after {attempts} attempts")]
    ConnectivityFailure { attempts: usize },

    #[error("topology is disconnected: {covered} of {total} sensors reachable from the base station")]
    Disconnected { covered: usize, total: usize },

    #[error("node {node} has {residual} J but needs {required} J")]
    InsufficientEnergy {
        node: NodeId,
        residual: f64,
        required: f64,
    },

    #[error("exhaustive search supports at most {max} sensors, got {n}")]
    TooLarge { n: usize, max: usize },

    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
