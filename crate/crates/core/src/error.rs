use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("config parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("non-physical state in {context}: rho={rho:e}, p={p:e}")]
    NonPhysical { context: String, rho: f64, p: f64 },

    #[error("zero pivot in tridiagonal solve on line {line} (row {row})")]
    ZeroPivot { line: usize, row: usize },

    #[error("line of {len} cells is too short (need at least {min})")]
    LineTooShort { len: usize, min: usize },

    #[error("NaN produced in Runge-Kutta stage {stage} at t={time}")]
    StageNaN { stage: usize, time: f64 },

    #[error("vacuum is generated by the Riemann data (pressure positivity condition violated)")]
    Vacuum,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unknown case '{0}'")]
    UnknownCase(String),

    #[error("cannot compute order from a zero error")]
    ZeroError,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

impl Error {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) | Error::Parse { .. } | Error::UnknownCase(_) | Error::GridMismatch(_) => "config",
            Error::Io { .. } | Error::Snapshot { .. } => "io",
            _ => "numerical",
        }
    }

    /// Process exit code: 2 configuration, 3 I/O, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "config" => 2,
            "io" => 3,
            _ => 4,
        }
    }
}
