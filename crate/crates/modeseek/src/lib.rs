//! Mode seeking on kernel density estimates.
//!
//! The iteration at the core of this crate repeatedly moves a point to a
//! weighted mean of the data, with weights drawn from the kernel's
//! subgradient profile. Each update maximizes a quadratic minorizer of the
//! density estimate, so the density value never decreases, and the sequence
//! climbs to a mode. The crate provides:
//!
//! * a catalog of radially symmetric kernels with the structural metadata
//!   (profile convexity, gradient smoothness, piecewise-polynomial degree)
//!   that decides which convergence guarantees apply ([`kernels`]);
//! * density, gradient, Hessian, minorizer, and one-dimensional
//!   higher-derivative evaluation ([`density`]);
//! * the iteration itself with step-norm stopping, over-relaxation, and
//!   mode-based clustering ([`meanshift`]);
//! * convergence-rate diagnostics: Jacobian eigenvalues of the iteration
//!   map, contraction factors, flatness-exponent rate classes and bounds,
//!   empirical slope fitting, and per-step run audits ([`diagnostics`]);
//! * construction of symmetric datasets whose estimate is flat at the mode
//!   to a prescribed order, the worked examples for the polynomial rate
//!   regime ([`degenerate`]);
//! * CSV/JSON interchange and the command layer behind the `modeseek`
//!   binary ([`io`], [`cli`]).
//!
//! ```
//! use modeseek::{DataSet, DensityModel, KernelSpec, MSConfig};
//!
//! let data = DataSet::from_1d(&[-0.95, 0.95])?;
//! let model = DensityModel::normalized(data, KernelSpec::gaussian(), 1.0)?;
//! let run = modeseek::ms_run(&model, &[0.1], &MSConfig::default())?;
//! assert!(run.final_position()[0].abs() < 1e-10);
//! # Ok::<(), modeseek::Error>(())
//! ```

pub mod cli;
pub mod degenerate;
pub mod density;
pub mod diagnostics;
pub mod error;
mod hermite;
pub mod io;
pub mod kernels;
pub mod meanshift;
mod quadrature;

pub use degenerate::{even_derivative_residuals, solve_degenerate_config, DegenerateConfig};
pub use density::{DataSet, DensityModel, Gradient};
pub use diagnostics::{
    audit_trajectory, classify_rate, fit_empirical_rates, jacobian_at, jacobian_via_hessian,
    linear_rate, lojasiewicz_exponent_bound, rate_report, AuditReport, EmpiricalRates, LocalRate,
    RateClass, RateFit, RatePrediction, RateReport,
};
pub use error::{Error, Result};
pub use kernels::{KernelProperties, KernelSpec};
pub use meanshift::{
    cluster, default_merge_tolerance, ms_run, ms_step, Clustering, MSConfig, StopReason,
    Trajectory,
};
