use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The instance is too large for an enumeration-based oracle.
    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    /// Evidence has zero probability under the fitted tree.
    #[error("evidence has zero probability under the model")]
    ImpossibleEvidence,

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable short name used in machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::InvalidNetwork(_) => "invalid_network",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Domain(_) => "domain",
            Error::GuardExceeded(_) => "guard_exceeded",
            Error::ImpossibleEvidence => "impossible_evidence",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
