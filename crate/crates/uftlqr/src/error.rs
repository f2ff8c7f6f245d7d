use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("dispersion is not well posed: Re w({k}) = {value} < 0")]
    IllPosed { k: f64, value: f64 },

    #[error("point {re}+{im}i lies on a branch cut of omega")]
    BranchCutViolation { re: f64, im: f64 },

    #[error("inadmissible contour: {0}")]
    InadmissibleContour(String),

    #[error("quadrature failed to reach tolerance {tol:e} within {evals} evaluations (estimate {estimate:e})")]
    QuadratureFailure { tol: f64, evals: usize, estimate: f64 },

    #[error("exponent Re(kappa)*t = {0} would overflow; use the premultiplied transforms")]
    OverflowGuard(f64),

    #[error("step size underflow: {0}")]
    StepSizeUnderflow(String),

    #[error("Newton iteration stalled at residual {0:e}")]
    NewtonDivergence(f64),

    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),

    #[error("state row too coarse: {0}")]
    InsufficientStateResolution(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable tag, used in the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config { .. } => "ConfigError",
            Error::IllPosed { .. } => "IllPosed",
            Error::BranchCutViolation { .. } => "BranchCutViolation",
            Error::InadmissibleContour(_) => "InadmissibleContour",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::OverflowGuard(_) => "OverflowGuard",
            Error::StepSizeUnderflow(_) => "StepSizeUnderflow",
            Error::NewtonDivergence(_) => "NewtonDivergence",
            Error::LinearSolveFailure(_) => "LinearSolveFailure",
            Error::InsufficientStateResolution(_) => "InsufficientStateResolution",
            Error::GridMismatch(_) => "GridMismatch",
            Error::Unsupported(_) => "Unsupported",
            Error::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
