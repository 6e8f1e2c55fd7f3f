use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series has {len} values; at least {min} are required")]
    SeriesTooShort { len: usize, min: usize },

    #[error("series value at position {index} is not finite")]
    NonFiniteValue { index: usize },

    #[error("bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),

    #[error("no predictor has positive kernel weight at z = {z}")]
    NoLocalData { z: f64 },

    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    #[error("evaluation grid is empty")]
    EmptyGrid,

    #[error("evaluation grid must be finite and strictly increasing")]
    UnorderedGrid,

    #[error("grids of observed curve and bands do not match")]
    GridMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("unknown dataset `{name}`; available: {available}")]
    UnknownDataset { name: String, available: String },

    #[error("dataset `{name}` is not vendored; save its values to {path} (source: {source_url})")]
    DatasetUnavailable {
        name: String,
        path: PathBuf,
        source_url: String,
    },

    #[error("unknown study preset `{name}`; available: {available}")]
    UnknownPreset { name: String, available: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the numerical content of the data rather
    /// than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoLocalData { .. } | Error::DegenerateDesign(_))
    }
}
