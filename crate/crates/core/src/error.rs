use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not strongly connected (no path from label {from} to label {to})")]
    NotStronglyConnected { from: usize, to: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A size or iteration budget was exhausted.
    #[error("{what} exceeds cap ({needed} > {cap})")]
    CapExceeded { what: &'static str, needed: String, cap: u64 },

    #[error("{what} did not converge within {iterations} iterations")]
    NotConverged { what: &'static str, iterations: u64 },

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    /// An exact quantity that must be an integer came out fractional.
    #[error("non-integral value in {0}")]
    NonIntegral(&'static str),

    #[error("failed to parse graph document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn cap(what: &'static str, needed: impl ToString, cap: u64) -> Self {
        Error::CapExceeded { what, needed: needed.to_string(), cap }
    }
}
