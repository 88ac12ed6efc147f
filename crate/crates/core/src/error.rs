use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop ({0}, {0}) is not permitted")]
    SelfLoop(usize),

    #[error("triad census needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("all event rates are zero at time {time}; the state is absorbing")]
    Absorbing { time: f64 },

    #[error("inconsistent dyad census ({mutual}, {asym}, {null}) for {n} vertices")]
    InconsistentCensus {
        mutual: u64,
        asym: u64,
        null: u64,
        n: usize,
    },

    #[error("impossible sufficient statistics: t_e = {t_e} < 2 t_m = {}", 2 * .t_m)]
    ImpossibleStatistics { t_e: u64, t_m: u64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown figure `{0}` (expected meandeg, recip or triad)")]
    UnknownFigure(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
