use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("site count {requested} exceeds the limit {limit}")]
    Size { requested: usize, limit: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("singular diamagnetic coefficient: {0}")]
    Singular(String),
    #[error("invalid config field `{field}`: {msg}")]
    Config { field: String, msg: String },
    #[error("stage `{stage}` requires `{missing}`")]
    Stage { stage: String, missing: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
