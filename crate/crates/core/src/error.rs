use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input document. `location` carries line/column or field path.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid network: {0}")]
    Validation(String),

    #[error("graph is disconnected: lambda_2 = {lambda2:.3e} is not above tolerance {tol:.3e}")]
    DisconnectedGraph { lambda2: f64, tol: f64 },

    #[error("parameter `{name}` must be positive and finite, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("resolvent (jwI - A) is singular at omega = {omega}")]
    SingularResolvent { omega: f64 },

    #[error("transform is not orthogonal (max |V^T V - I| = {deviation:.3e})")]
    NotOrthogonal { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("marginally stable mode {mode} is observable; the H2 norm is unbounded")]
    ObservableMarginalMode { mode: usize },

    #[error("horizon too short: {0}")]
    HorizonTooShort(String),

    #[error("sampling step too coarse: dt * |s_max| = {product:.3e} (must be < 0.1)")]
    StepTooCoarse { product: f64 },

    #[error("interval contains {points} grid points, need at least {required}")]
    IntervalTooSparse { points: usize, required: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "ParseError",
            Error::Validation(_) => "ValidationError",
            Error::DisconnectedGraph { .. } => "DisconnectedGraph",
            Error::NonPositiveParameter { .. } => "NonPositiveParameter",
            Error::SingularResolvent { .. } => "SingularResolvent",
            Error::NotOrthogonal { .. } => "NotOrthogonal",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ObservableMarginalMode { .. } => "ObservableMarginalMode",
            Error::HorizonTooShort(_) => "HorizonTooShort",
            Error::StepTooCoarse { .. } => "StepTooCoarse",
            Error::IntervalTooSparse { .. } => "IntervalTooSparse",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io(_) => "IoError",
        }
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositiveParameter { name, value })
    }
}
