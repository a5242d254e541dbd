use thiserror::Error;

use crate::model::ModelError;
use crate::numerics::NumericsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("geometric factor I = {value} lies outside (0, 1), so the injection series diverges")]
    GeometricFactor { value: f64 },
    #[error("{what}: {left} vs {right}")]
    Inconsistent {
        what: &'static str,
        left: f64,
        right: f64,
    },
}

impl Error {
    /// True when the error stems from bad user input rather than a numerical
    /// failure.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Model(ModelError::Numerics(_)) => false,
            Error::Model(_) | Error::InvalidQuery(_) | Error::GeometricFactor { .. } => true,
            Error::Numerics(_) | Error::Inconsistent { .. } => false,
        }
    }
}
