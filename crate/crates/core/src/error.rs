use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("non-finite {0}")]
    NonFinite(&'static str),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("map error at line {line}: {msg}")]
    Map { line: usize, msg: String },

    #[error("object `{name}` placed on blocked cell ({row}, {col})")]
    BlockedPlacement { name: String, row: usize, col: usize },

    #[error("target `{0}` must appear exactly once, found {1}")]
    TargetCount(String, usize),

    #[error("q-table file: {msg} (at byte {offset})")]
    QTableFormat { offset: usize, msg: String },

    #[error("q-table file version {found}, expected {expected}")]
    QTableVersion { found: u16, expected: u16 },

    #[error("no free cell at {requested_m} m from the target; nearest achievable is {nearest_m} m")]
    EmptyBand { requested_m: f64, nearest_m: f64 },

    #[error("{0} requires a guidance policy")]
    MissingPolicy(String),

    #[error("trace: {0}")]
    Trace(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
