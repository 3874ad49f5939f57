use std::path::PathBuf;

use thiserror::Error;

use crate::multipoly::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph TH_{d}({n}) would have {vertices} vertices, above the cap of {cap}")]
    VertexCap {
        d: usize,
        n: usize,
        vertices: u128,
        cap: usize,
    },

    #[error("graph has {vertices} vertices; the matching oracle accepts at most {cap}")]
    OracleSize { vertices: usize, cap: usize },

    #[error("matching oracle memo table reached {cap} entries")]
    MemoCap { cap: usize },

    #[error("enumerating {subsets} connector subsets for d={d} exceeds the cap d<={max_d} (raise it with --census-max-d)")]
    CensusCap { d: usize, subsets: u128, max_d: usize },

    #[error("stage {n} is predicted to need {predicted} decimal digits, above the cap of {cap}")]
    DigitCap { n: usize, predicted: u64, cap: u64 },

    #[error("{0}")]
    Domain(String),

    #[error("integrity violation: {0}")]
    Integrity(String),

    #[error("cache file {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Caps and budgets are resource limits, everything else is a failure of
    /// the computation or of its inputs.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::VertexCap { .. } | Error::OracleSize { .. } | Error::MemoCap { .. } | Error::CensusCap { .. } | Error::DigitCap { .. }
        )
    }
}
