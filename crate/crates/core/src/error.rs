use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("drone speed must be positive, got {0}")]
    InvalidSpeed(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("asset id {0} does not exist in the instance")]
    UnknownAsset(usize),

    #[error("asset {asset} references unknown asset type {type_id}")]
    UnknownAssetType { asset: usize, type_id: u32 },

    #[error("instance has no assets")]
    EmptyInstance,

    #[error("{m} drones but only {n} assets: the model needs m <= n (every drone flies a non-empty route)")]
    TooManyDrones { m: usize, n: usize },

    #[error("instance is infeasible: {0}")]
    Infeasible(String),

    #[error("no capacity-feasible clustering into {k} clusters; increase the cluster count or the drone capacity")]
    NoFeasibleClustering { k: usize },

    #[error("empty cluster")]
    EmptyCluster,

    #[error("assignment does not match the program's variables: {0}")]
    DomainMismatch(String),

    #[error("assignment violates constraint {0}")]
    InfeasibleAssignment(String),

    #[error("brute force refuses n = {n} (limit {max_n})")]
    TooLarge { n: usize, max_n: usize },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("empty sample set")]
    EmptySamples,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
