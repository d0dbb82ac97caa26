use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample coordinates have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("sample needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("sample contains a non-finite value at index {0}")]
    NonFinite(usize),

    #[error("degenerate variance: {0} coordinate is constant")]
    DegenerateVariance(&'static str),

    #[error("neighbour count k={k} out of range for n={n} (need 1 <= k < n)")]
    KOutOfRange { k: usize, n: usize },

    #[error("unknown statistic id `{0}`")]
    UnknownStatistic(String),

    #[error("invalid parameter `{name}` for statistic `{id}`: {reason}")]
    InvalidParameter { id: String, name: String, reason: String },

    #[error("unknown function id `{0}`")]
    UnknownFunction(String),

    #[error("relationship is degenerate: f has zero variance over the design")]
    DegenerateRelationship,

    #[error("could not bracket target R² {target}: R² at sigma=0 is {at_zero}")]
    BracketNotFound { target: f64, at_zero: f64 },

    #[error("calibration did not converge after {iterations} iterations (target {target}, last {achieved})")]
    NoConvergence {
        target: f64,
        achieved: f64,
        iterations: usize,
    },

    #[error("quantile of empty score vector")]
    EmptyScores,

    #[error("score grid has no independence level (target R² = 0)")]
    MissingIndependenceLevel,

    #[error("invalid score grid: {0}")]
    InvalidGrid(String),

    #[error("cell ({function}, level {level}) failed {failed} of {total} replicates: {first_error}")]
    CellFailed {
        function: String,
        level: usize,
        failed: usize,
        total: usize,
        first_error: String,
    },

    #[error("config error in field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("could not parse config {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error("missing archive {0}; run the upstream stage first")]
    MissingArchive(PathBuf),

    #[error("archive {path} has unsupported version {found} (expected {expected})")]
    ArchiveVersion { path: PathBuf, found: u32, expected: u32 },

    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
