use pcopo_model::ModelError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("E = {e} is not below threshold (threshold factor {margin:e})")]
    AboveThreshold { e: f64, margin: f64 },

    #[error("no threshold root for E in [0, {e_max}]")]
    NoThresholdRoot { e_max: f64 },

    #[error("quadrature did not converge: error estimate {estimate:e} after {intervals} intervals")]
    Quadrature { estimate: f64, intervals: usize },

    #[error("Duan weight must be finite and nonzero, got {0}")]
    InvalidWeight(f64),

    #[error("degenerate conditioning variance {0:e}")]
    DegenerateVariance(f64),

    #[error("shot noise {0:e} is not positive")]
    DegenerateShotNoise(f64),

    #[error("invalid angle grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, CorrelationError>;
