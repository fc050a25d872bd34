use std::path::PathBuf;

use thiserror::Error;

use crate::experiment::config::ConfigError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("expected a protocol-model specification, got {0}")]
    NotProtocolModel(String),

    #[error("operation requires {requirement}")]
    UnsupportedScenario { requirement: &'static str },

    #[error("link is noise-limited; PRM false alarm cannot be zeroed (zeta = {zeta:e})")]
    NoiseLimited { zeta: f64 },

    #[error("quadrature did not converge (last change {achieved:e}, tolerance {tolerance:e})")]
    Quadrature { achieved: f64, tolerance: f64 },

    #[error("probability {value} outside [0, 1] beyond rounding slack in {context}")]
    ProbabilityRange { value: f64, context: &'static str },

    #[error("confusion counts are empty")]
    EmptyCounts,

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("plot rendering failed: {0}")]
    Plot(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
