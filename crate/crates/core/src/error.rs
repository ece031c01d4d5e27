use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: wrong matrix size, duplicate ids, non-finite values.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The request exceeds what an exhaustive routine is allowed to attempt.
    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("graph is disconnected: no path between {from} and {to}")]
    Disconnected { from: String, to: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("point outside model domain: {0}")]
    Domain(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("yaml error: {0}")]
    Yaml(#[from] serde_yaml::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
