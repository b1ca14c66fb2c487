use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("critical wavenumber undefined for delta1 = {delta1} (requires delta1 < 0)")]
    UndefinedCriticalWavenumber { delta1: f64 },

    #[error("closed forms require kp = 2 kc, got kp = {kp}, 2 kc = {two_kc}")]
    NonResonantPeriod { kp: f64, two_kc: f64 },

    #[error("|k| = {k} exceeds the truncation |k| <= kp = {kp}")]
    OutsideTruncation { k: f64, kp: f64 },

    #[error("near-singular response: |D(omega)| = {det:e} below floor {floor:e} (at or above threshold)")]
    NearSingular { det: f64, floor: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("matrix ill-conditioned: condition estimate {estimate:e} exceeds bound {bound:e}")]
    IllConditioned { estimate: f64, bound: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

pub type Result<T> = std::result::Result<T, ModelError>;
