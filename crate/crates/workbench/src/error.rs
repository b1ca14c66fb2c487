use pcopo_correlations::CorrelationError;
use pcopo_langevin::LangevinError;
use pcopo_model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("{path}: line {line}: {message}")]
    Parse { path: String, line: usize, message: String },

    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("unknown parameter `{0}` (expected one of E, delta0, delta1, M0, M1, kp)")]
    UnknownParameter(String),

    #[error("observable `{observable}` is not available from the {engine} engine")]
    EngineMismatch { observable: String, engine: String },

    #[error("unknown figure `{0}` (expected fig1, fig3a, fig3b, fig3c, fig4, fig5, fig6 or fig7)")]
    UnknownFigure(String),

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error(transparent)]
    Correlation(#[from] CorrelationError),

    #[error(transparent)]
    Langevin(#[from] LangevinError),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, WorkbenchError>;

/// Process exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Usage = 2,
    Validation = 3,
    Numerical = 4,
}

fn model_class(e: &ModelError) -> ExitClass {
    match e {
        ModelError::NearSingular { .. }
        | ModelError::Singular
        | ModelError::IllConditioned { .. }
        | ModelError::NonFinite { .. } => ExitClass::Numerical,
        _ => ExitClass::Validation,
    }
}

fn correlation_class(e: &CorrelationError) -> ExitClass {
    match e {
        CorrelationError::Model(m) => model_class(m),
        CorrelationError::AboveThreshold { .. }
        | CorrelationError::InvalidWeight(_)
        | CorrelationError::InvalidGrid(_) => ExitClass::Validation,
        _ => ExitClass::Numerical,
    }
}

impl WorkbenchError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        WorkbenchError::Io { path: path.into(), source }
    }

    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        WorkbenchError::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn class(&self) -> ExitClass {
        match self {
            WorkbenchError::Io { .. } | WorkbenchError::UnknownFigure(_) => ExitClass::Usage,
            WorkbenchError::Parse { .. }
            | WorkbenchError::Validation { .. }
            | WorkbenchError::UnknownParameter(_)
            | WorkbenchError::EngineMismatch { .. }
            | WorkbenchError::Json(_) => ExitClass::Validation,
            WorkbenchError::Model(e) => model_class(e),
            WorkbenchError::Correlation(e) => correlation_class(e),
            WorkbenchError::Langevin(e) => langevin_class(e),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.class() as u8
    }
}

fn langevin_class(e: &LangevinError) -> ExitClass {
    match e {
        LangevinError::Model(m) => model_class(m),
        LangevinError::Correlation(c) => correlation_class(c),
        LangevinError::InvalidConfig { .. } | LangevinError::Incommensurate { .. } | LangevinError::Stability { .. } => {
            ExitClass::Validation
        }
        LangevinError::Io(_) | LangevinError::Snapshot(_) => ExitClass::Usage,
        LangevinError::Divergence { .. } | LangevinError::NoiseRange { .. } => ExitClass::Numerical,
    }
}

/// Exit class of any error raised by the engines or the workbench; anything
/// else counts as a usage error.
pub fn exit_class_of(e: &(dyn std::error::Error + 'static)) -> ExitClass {
    if let Some(w) = e.downcast_ref::<WorkbenchError>() {
        w.class()
    } else if let Some(c) = e.downcast_ref::<CorrelationError>() {
        correlation_class(c)
    } else if let Some(m) = e.downcast_ref::<ModelError>() {
        model_class(m)
    } else if let Some(l) = e.downcast_ref::<LangevinError>() {
        langevin_class(l)
    } else {
        ExitClass::Usage
    }
}
