use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraspError {
    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("invalid object: {0}")]
    InvalidObject(String),

    #[error("configuration residuals exceed tolerance ({0})")]
    InconsistentConfig(String),

    #[error("degenerate contact location: {0}")]
    DegenerateContact(String),

    #[error("point lies outside the reachable set")]
    OutsideReachable,

    #[error("no grid point is reachable")]
    EmptyReachableSet,

    #[error("invalid configuration value: {0}")]
    InvalidConfig(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}
