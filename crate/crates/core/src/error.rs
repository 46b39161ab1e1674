use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("non-finite evaluation at x = {x}")]
    NonFinite { x: f64 },

    #[error("bracket [{lo}, {hi}] does not straddle target {target} (g(lo) = {g_lo}, g(hi) = {g_hi})")]
    NoStraddle {
        lo: f64,
        hi: f64,
        target: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("stack chain has no contributor with nonzero influence")]
    EmptyChain,

    #[error("contributor '{name}': {reason}")]
    InvalidContributor { name: String, reason: String },

    #[error("{path}: line {line}: field '{field}': {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        field: String,
        message: String,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("nothing to write")]
    EmptyResults,

    #[error("{path}: {source}")]
    ReadFile {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by user input (files, arguments) as opposed to
    /// a numerical failure inside a solver.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::InvalidBracket { .. } | Error::NonFinite { .. } | Error::NoStraddle { .. }
        )
    }
}
