use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite integrand value {value} at node {node:?}")]
    NonFinite { node: Vec<f64>, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("kernel too singular for quadrature: s = {s} < s_min = {s_min}")]
    SingularKernel { s: f64, s_min: f64 },

    #[error("point pair lies in the local region: |x - y| = {distance} <= admissible radius {radius}")]
    LocalRegion { distance: f64, radius: f64 },

    #[error("spectral evaluation needs a Hermite expansion of the function")]
    MissingExpansion,

    #[error("Luxemburg bracket expansion failed at lambda = {lambda} (modular = {modular})")]
    BracketFailure { lambda: f64, modular: f64 },

    #[error("exponent p_inf is not set")]
    MissingPInf,

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
