use std::path::PathBuf;

use thiserror::Error;

use crate::coeffopt::QpSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: non-finite coordinate value")]
    NonFinite { line: usize },

    #[error("point cloud contains no points")]
    Empty,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range 1..={max}")]
    OutOfRange { index: usize, max: usize },

    #[error("dense tensor would hold {entries} entries, above the cap of {cap}")]
    CapExceeded { entries: u128, cap: u128 },

    #[error("basis is not orthonormal (max |VᵀV - I| = {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("lambda_max is zero; total variation is undefined")]
    ZeroLambdaMax,

    #[error("every candidate max-index is infeasible under the adjacency constraint")]
    AllCandidatesInfeasible { best: Box<QpSolution> },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
