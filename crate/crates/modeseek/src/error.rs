//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Profile arguments are squared half-radii and must be non-negative.
    #[error("profile argument must be a non-negative squared half-radius, got {0}")]
    NegativeRadius(f64),

    #[error("input coordinates must be finite")]
    NonFiniteInput,

    #[error("unknown kernel `{name}`; available kernels: {available}")]
    UnknownKernel { name: String, available: String },

    #[error("kernel `{kernel}` is not integrable over a {dim}-dimensional domain")]
    NotIntegrable { kernel: String, dim: usize },

    #[error("kernel `{0}` has no second profile derivative")]
    NoSecondDerivative(String),

    /// A squared half-radius landed within the knot tolerance, so the
    /// Hessian is not defined at this query point.
    #[error("Hessian not defined here: offset of data point {index} lies on a profile knot")]
    HessianUndefined { index: usize },

    #[error("Jacobian undefined: the step denominator vanishes at the query point")]
    JacobianUndefined,

    #[error("point is not critical: gradient norm {grad_norm:.3e} exceeds {limit:.1e}")]
    NotCritical { grad_norm: f64, limit: f64 },

    #[error("derivative order {order} is unsupported on the finite-difference path (max {max})")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("operation requires one-dimensional data, got d = {0}")]
    NotOneDimensional(usize),

    #[error("derivative order must be even and positive, got {0}")]
    OddDerivativeOrder(usize),

    #[error("invalid dataset: {0}")]
    InvalidData(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("exponent must lie in [0, 1), got {0}")]
    ExponentOutOfRange(f64),

    #[error("solver did not converge after {iterations} iterations; last residuals {residuals:?}")]
    SolverDiverged {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("trajectory too short: {usable} usable states, need at least {needed}")]
    InsufficientData { usable: usize, needed: usize },

    #[error("numerical failure (non-finite iterate) at iteration {iteration}")]
    NumericalFailure { iteration: usize },

    #[error("run seeded at data point {seed} failed: {source}")]
    SeededRunFailed {
        seed: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("CSV error at line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
