use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Power iteration ran out of iterations.
    #[error("power iteration did not converge after {iterations} iterations (last Rayleigh quotient {rayleigh})")]
    NoConvergence { iterations: usize, rayleigh: f64 },

    /// Exhaustive search was asked to enumerate an instance past its size guard.
    #[error("exhaustive search refused: n = {n} exceeds the bound of {bound} points")]
    TooLarge { n: usize, bound: usize },

    #[error("{path}: row {row}, column {column}: {message}")]
    Parse { path: String, row: usize, column: usize, message: String },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Two multiplication routes disagreed; timings from such a run are meaningless.
    #[error("cross-check failed for d = {d}, t = {t}: relative difference {relative_error:e} exceeds {tolerance:e}")]
    CrossCheck { d: usize, t: usize, relative_error: f64, tolerance: f64 },

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::TooLarge { .. } | Error::NoConvergence { .. } => 2,
            Error::Parse { .. } | Error::Format { .. } | Error::Io { .. } | Error::Serialize(_) => 3,
            Error::CrossCheck { .. } => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}
