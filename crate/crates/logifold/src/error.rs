use std::path::PathBuf;

use logifold_core::graph::GraphError;
use logifold_core::theory::TheoryError;
use logifold_core::{AffineError, EnsembleError, MlpError, PredictionError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Schema { path: PathBuf, line: usize, message: String },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Prediction(#[from] PredictionError),
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error(transparent)]
    Mlp(#[from] MlpError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("{0}")]
    Usage(String),
}

fn variant(debug: String) -> String {
    debug.split(|c: char| !c.is_alphanumeric() && c != '_').next().unwrap_or_default().to_string()
}

impl Error {
    /// `Module::Variant` of the error that caused the failure, e.g.
    /// `PredictionError::RowSum`.
    pub fn name(&self) -> String {
        match self {
            Error::Io { .. } => "IoError".into(),
            Error::Schema { .. } => "SchemaError".into(),
            Error::Json { .. } => "SchemaError::Json".into(),
            Error::Prediction(e) => format!("PredictionError::{}", variant(format!("{e:?}"))),
            Error::Affine(e) => format!("AffineError::{}", variant(format!("{e:?}"))),
            Error::Mlp(e) => format!("MlpError::{}", variant(format!("{e:?}"))),
            Error::Graph(e) => format!("GraphError::{}", variant(format!("{e:?}"))),
            Error::Ensemble(e) => format!("EnsembleError::{}", variant(format!("{e:?}"))),
            Error::Theory(e) => format!("TheoryError::{}", variant(format!("{e:?}"))),
            Error::Usage(_) => "UsageError".into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
