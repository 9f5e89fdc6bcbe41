use thiserror::Error;

use crate::lattice::MultiIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("divergence constraint violated at mode {mode}: |k·B| = {residual:e}")]
    Divergence { mode: MultiIndex, residual: f64 },

    #[error("coefficient table incomplete: no entry for mode {0}")]
    TableIncomplete(MultiIndex),

    #[error("non-finite coefficient produced at mode {0}")]
    NonFinite(MultiIndex),

    #[error("mode {mode} needs {terms} exponential terms, over the limit of {limit}")]
    TermLimit {
        mode: MultiIndex,
        terms: usize,
        limit: usize,
    },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("grid size mismatch: expected {expected} samples, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("oracle step rejected at t = {t}: {reason}")]
    StepRejected { t: f64, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
