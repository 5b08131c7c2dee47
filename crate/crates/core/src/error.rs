use std::path::PathBuf;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid market:\n{0}")]
    InvalidMarket(ValidationReport),

    #[error("unknown mechanism `{0}` (expected one of: iam, ttcm)")]
    UnknownMechanism(String),

    #[error("unknown regime `{0}` (expected q or r)")]
    UnknownRegime(String),

    #[error("{what} has {size} candidates, above the enumeration bound {bound}")]
    TooLarge {
        what: &'static str,
        size: u128,
        bound: u128,
    },

    #[error("invalid random market spec: {0}")]
    Spec(String),

    #[error("matching is infeasible: {0}")]
    Infeasible(crate::model::Infeasibility),

    #[error("matching is not {0}-stable")]
    NotStable(crate::model::Regime),

    #[error("matching covers {got} students, market has {expected}")]
    MatchingShape { expected: usize, got: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
