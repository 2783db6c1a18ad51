use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of a model function.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// Offloading problem has no interior solution for these parameters.
    #[error("infeasible parameters: {}", .0.join("; "))]
    Infeasible(Vec<String>),

    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("Monte Carlo run needs at least {min} trials, got {got}")]
    TooFewTrials { min: u64, got: u64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("I/O error on {}: {source}", path.display())]
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
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }
}
