use thiserror::Error;

/// Errors raised by geometry construction, field operators and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    Curve(String),

    #[error("arc-length reparameterization failed to converge (residual {residual:e})")]
    Reparameterization { residual: f64 },

    #[error("{what} = {value} outside [{lo}, {hi}]")]
    Range {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("point lies outside the collar (signed depth {depth})")]
    OutOfCollar { depth: f64 },

    #[error("closest-point iteration did not converge; iterates {trace:?}")]
    ClosestPoint { trace: Vec<f64> },

    #[error("configuration: {0}")]
    Config(String),

    #[error("grid too coarse: {0}")]
    Resolution(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("solver stalled after {iterations} iterations (relative residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("compatibility defect {defect:e} exceeds cap {cap:e}")]
    Compatibility { defect: f64, cap: f64 },

    #[error("kernel evaluated at coincident points")]
    Singular,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
