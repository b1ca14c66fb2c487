use pcopo_correlations::CorrelationError;
use pcopo_model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LangevinError {
    #[error(transparent)]
    Model(#[from] ModelError),

    #[error(transparent)]
    Correlation(#[from] CorrelationError),

    #[error("invalid simulation config `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("{what} = {k} is not commensurate with the k-grid (spacing {dk}); box_length must be a multiple of 2 pi / kc")]
    Incommensurate { what: &'static str, k: f64, dk: f64 },

    #[error("stability guard violated: dt * max|linear rate| = {value} >= 0.5")]
    Stability { value: f64 },

    #[error("trajectory {trajectory} diverged at t = {t}")]
    Divergence { trajectory: u64, t: f64 },

    #[error("pump amplitude |alpha0| = {amplitude} exceeds the range of the phase-sensitive noise (2) in trajectory {trajectory} at t = {t}")]
    NoiseRange { amplitude: f64, trajectory: u64, t: f64 },

    #[error("snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LangevinError>;
