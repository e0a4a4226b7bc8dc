use std::path::PathBuf;

use thiserror::Error;

use crate::caloric_poly::MultiPoly;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// An exponent `t*s + sqrt(s) x.xi` exceeded the overflow threshold.
    #[error("exponent {exponent:.6e} exceeds the overflow threshold {threshold}")]
    Range { exponent: f64, threshold: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("nonpositive solution value {0:e}")]
    NonPositive(f64),

    #[error("grid/step incompatibility: {0}")]
    Grid(String),

    #[error("insufficient stencil: {0}")]
    InsufficientStencil(String),

    /// Two inversion resolutions disagree by more than the allowed margin.
    #[error("inverse Laplace transform failed at t={t}: resolutions disagree by {estimate:.3e}")]
    InversionFailure { t: f64, estimate: f64 },

    #[error("Laplace integral tail does not converge at t={t}: {reason}")]
    NonconvergentTail { t: f64, reason: String },

    #[error("polynomial is not caloric; heat residual {residual}")]
    NotCaloric { residual: MultiPoly },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
