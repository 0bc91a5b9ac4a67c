//! Convergence-rate diagnostics: Jacobian of the iteration map at a fixed
//! point, contraction-factor prediction, flatness-exponent rate classes and
//! bounds, empirical rate fitting, and per-step run audits.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::density::DensityModel;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::meanshift::{StopReason, Trajectory};

/// Gradient norm below which a point is accepted as critical.
pub const CRITICAL_GRAD_TOLERANCE: f64 = 1e-8;

/// `|lambda| <= DEGENERACY_FACTOR * step_denominator` flags a degenerate
/// (vanishing-curvature) fixed point.
pub const DEGENERACY_FACTOR: f64 = 1e-9;

/// Minimum usable states for an empirical rate fit.
pub const MIN_FIT_STATES: usize = 20;

/// Distance floor under which an iterate is considered to have reached the
/// limit for fitting purposes.
pub const FIT_DISTANCE_FLOOR: f64 = 1e-12;

/// Jacobian of the iteration map `x -> x + m(x)` at a critical point,
/// assembled from second profile derivatives (outer-product form).
///
/// Positive semidefinite whenever the kernel profile is convex.
pub fn jacobian_at(model: &DensityModel, y: &[f64]) -> Result<DMatrix<f64>> {
    let data = model.dataset();
    let d = data.d();
    assert_eq!(y.len(), d, "query dimension mismatch");
    let kernel = model.kernel();
    if !kernel.has_second_derivative() {
        return Err(Error::NoSecondDerivative(kernel.name().to_owned()));
    }
    let denominator = model.step_denominator(y);
    if denominator == 0.0 {
        return Err(Error::JacobianUndefined);
    }
    let mut num = DMatrix::zeros(d, d);
    for i in 0..data.n() {
        let point = data.point(i);
        let h = data.bandwidths().map_or(model.bandwidth(), |hs| hs[i]);
        let dist2: f64 = y.iter().zip(point).map(|(a, b)| (a - b) * (a - b)).sum();
        let u = 0.5 * dist2 / (h * h);
        if kernel.near_knot(u) {
            return Err(Error::HessianUndefined { index: i });
        }
        let c = data.weight(i) * kernel.second_derivative_value(u)? / h.powi(d as i32 + 4);
        for r in 0..d {
            for cidx in 0..d {
                num[(r, cidx)] += c * (point[r] - y[r]) * (point[cidx] - y[cidx]);
            }
        }
    }
    // bring the numerator onto the same scale/n footing as the denominator
    num.scale_mut(model.normalization_factor() / (data.n() as f64 * denominator));
    Ok(num)
}

/// Jacobian of the iteration map via the Hessian route:
/// identity plus the Hessian divided by the step denominator.
pub fn jacobian_via_hessian(model: &DensityModel, y: &[f64]) -> Result<DMatrix<f64>> {
    let denominator = model.step_denominator(y);
    if denominator == 0.0 {
        return Err(Error::JacobianUndefined);
    }
    let mut j = model.kde_hessian(y)?;
    j.unscale_mut(denominator);
    for r in 0..model.d() {
        j[(r, r)] += 1.0;
    }
    Ok(j)
}

/// Largest eigenvalue of a symmetric matrix.
pub fn largest_eigenvalue(matrix: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(matrix.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Outcome of the local contraction analysis at a fixed point.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocalRate {
    /// Non-degenerate local maximum; the iteration contracts linearly with
    /// factor `q` in [0, 1).
    Linear { q: f64, lambda: f64 },
    /// The Hessian has a vanishing (or positive) top eigenvalue; the map's
    /// Jacobian has unit spectral radius and no linear rate exists.
    Degenerate { lambda: f64 },
}

/// Local linear contraction factor `q = 1 + lambda / D` at a critical point
/// `y`, where `lambda` is the largest Hessian eigenvalue and `D` the step
/// denominator. Reports a degenerate marker instead when the Hessian is not
/// negative definite at scale.
pub fn linear_rate(model: &DensityModel, y: &[f64]) -> Result<LocalRate> {
    let grad_norm = model.kde_gradient(y).norm();
    if grad_norm > CRITICAL_GRAD_TOLERANCE {
        return Err(Error::NotCritical {
            grad_norm,
            limit: CRITICAL_GRAD_TOLERANCE,
        });
    }
    let denominator = model.step_denominator(y);
    if denominator == 0.0 {
        return Err(Error::JacobianUndefined);
    }
    let hessian = model.kde_hessian(y)?;
    let lambda = largest_eigenvalue(&hessian);
    if lambda > -DEGENERACY_FACTOR * denominator {
        return Ok(LocalRate::Degenerate { lambda });
    }
    Ok(LocalRate::Linear {
        q: 1.0 + lambda / denominator,
        lambda,
    })
}

/// Rate classes induced by the flatness exponent of the density at its
/// critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateClass {
    /// Exponent below 1/2: convergence in finitely many iterations.
    Finite,
    /// Exponent exactly 1/2: geometric convergence.
    Linear,
    /// Exponent above 1/2: algebraic decay in the iteration count.
    Polynomial,
}

/// Predicted asymptotics for a flatness exponent `theta`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatePrediction {
    pub rate_class: RateClass,
    /// Decay exponent of the distance to the limit, `(1-theta)/(2 theta-1)`
    /// (polynomial class only).
    pub position_decay: Option<f64>,
    /// Decay exponent of the density gap, `1/(2 theta-1)` (polynomial class
    /// only).
    pub value_decay: Option<f64>,
}

/// Classify a flatness exponent `theta` in [0, 1) into its rate class with
/// the predicted decay exponents.
pub fn classify_rate(theta: f64) -> Result<RatePrediction> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::ExponentOutOfRange(theta));
    }
    Ok(if theta < 0.5 {
        RatePrediction {
            rate_class: RateClass::Finite,
            position_decay: None,
            value_decay: None,
        }
    } else if theta == 0.5 {
        RatePrediction {
            rate_class: RateClass::Linear,
            position_decay: None,
            value_decay: None,
        }
    } else {
        RatePrediction {
            rate_class: RateClass::Polynomial,
            position_decay: Some((1.0 - theta) / (2.0 * theta - 1.0)),
            value_decay: Some(1.0 / (2.0 * theta - 1.0)),
        }
    })
}

/// Upper bound for the flatness exponent of a density built from a C^1
/// piecewise-polynomial kernel of maximum degree `k >= 2` in dimension `d`:
/// `1 - 1/max{k (3k-4)^{d-1}, 2k (3k-3)^{d-2}}`.
///
/// `None` when the kernel is not piecewise polynomial, has degree below 2,
/// or is not continuously differentiable.
pub fn lojasiewicz_exponent_bound(kernel: &KernelSpec, d: usize) -> Option<f64> {
    assert!(d >= 1);
    let k = kernel.max_poly_degree()? as f64;
    if k < 2.0 || !kernel.properties().c1_smooth {
        return None;
    }
    let first = k * (3.0 * k - 4.0).powi(d as i32 - 1);
    let second = 2.0 * k * (3.0 * k - 3.0).powi(d as i32 - 2);
    Some(1.0 - 1.0 / first.max(second))
}

/// Local-maximum variant of the exponent bound, `1 - 1/((k-1)^d + 1)`.
///
/// Tighter than [`lojasiewicz_exponent_bound`] but valid only when the
/// critical point is a local maximum interior to one polynomial piece; it is
/// reported as supplementary output and never applied automatically.
pub fn lojasiewicz_exponent_bound_local_max(kernel: &KernelSpec, d: usize) -> Option<f64> {
    assert!(d >= 1);
    let k = kernel.max_poly_degree()? as f64;
    if k < 2.0 || !kernel.properties().c1_smooth {
        return None;
    }
    Some(1.0 - 1.0 / ((k - 1.0).powi(d as i32) + 1.0))
}

/// Empirical rates extracted from a recorded trajectory.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmpiricalRates {
    /// The run hit an exact fixed point; there is no tail to fit.
    FiniteConvergence { iterations: usize },
    Fitted(RateFit),
}

/// Least-squares log-log slopes over the tail window, plus a geometric
/// contraction estimate.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    /// Slope of `log distance-to-limit` against `log t`.
    pub position_slope: f64,
    /// Slope of `log density-gap` against `log t`; absent when the gap is
    /// lost to rounding over the whole window.
    pub value_slope: Option<f64>,
    /// Median of successive distance ratios over the window.
    pub q_hat: f64,
    /// Fitted iteration range (1-based, inclusive).
    pub fit_window: [usize; 2],
    pub usable_states: usize,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN ratios"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Fit empirical convergence rates of a recorded run against the limit
/// `y_bar`: log-log slopes of distance and density gap against the
/// iteration index over the tail half of usable states, plus the median
/// successive-ratio estimate of the geometric factor.
pub fn fit_empirical_rates(
    model: &DensityModel,
    trajectory: &Trajectory,
    y_bar: &[f64],
) -> Result<EmpiricalRates> {
    if trajectory.stop_reason() == StopReason::ExactFixedPoint {
        return Ok(EmpiricalRates::FiniteConvergence {
            iterations: trajectory.total_iterations(),
        });
    }
    let dist = |i: usize| -> f64 {
        trajectory
            .position(i)
            .iter()
            .zip(y_bar)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let usable: Vec<usize> = (0..trajectory.len())
        .filter(|&i| dist(i) > FIT_DISTANCE_FLOOR)
        .collect();
    if usable.len() < MIN_FIT_STATES {
        return Err(Error::InsufficientData {
            usable: usable.len(),
            needed: MIN_FIT_STATES,
        });
    }
    let window = &usable[usable.len() / 2..];

    let log_t: Vec<f64> = window.iter().map(|&i| ((i + 1) as f64).ln()).collect();
    let log_dist: Vec<f64> = window.iter().map(|&i| dist(i).ln()).collect();
    let position_slope = slope(&log_t, &log_dist);

    let f_limit = model.kde_value(y_bar);
    let mut gap_t = Vec::new();
    let mut gap_v = Vec::new();
    for &i in window {
        let gap = f_limit - trajectory.density(i);
        if gap > 0.0 {
            gap_t.push(((i + 1) as f64).ln());
            gap_v.push(gap.ln());
        }
    }
    let value_slope = (gap_t.len() >= 2).then(|| slope(&gap_t, &gap_v));

    let mut ratios = Vec::new();
    for pair in window.windows(2) {
        if pair[1] == pair[0] + 1 {
            ratios.push(dist(pair[1]) / dist(pair[0]));
        }
    }
    if ratios.is_empty() {
        return Err(Error::InsufficientData {
            usable: usable.len(),
            needed: MIN_FIT_STATES,
        });
    }
    Ok(EmpiricalRates::Fitted(RateFit {
        position_slope,
        value_slope,
        q_hat: median(ratios),
        fit_window: [window[0] + 1, window[window.len() - 1] + 1],
        usable_states: usable.len(),
    }))
}

/// Per-step audit of a recorded run against the structural guarantees of
/// the iteration. Violations are report content, not errors.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    /// Number of consecutive state pairs audited.
    pub steps: usize,
    /// Worst violation of monotone density ascent (0 when clean).
    pub max_ascent_violation: f64,
    pub worst_ascent_step: Option<usize>,
    /// Worst violation of the per-step sufficient-increase inequality
    /// (0 when clean).
    pub max_sufficient_increase_violation: f64,
    pub worst_sufficient_increase_step: Option<usize>,
    /// Worst relative error of the step/gradient identity
    /// `step * D(y) = zeta * ||grad||` over steps long enough for the
    /// comparison to be meaningful in f64.
    pub max_step_identity_rel_error: f64,
    pub worst_step_identity_step: Option<usize>,
    /// Steps too short for the relative identity check (covered by the
    /// consistency check instead).
    pub identity_steps_below_floor: usize,
    /// Worst distance between the stored step and the recomputed
    /// displacement, normalized by the position scale.
    pub max_step_consistency_error: f64,
    pub worst_step_consistency_step: Option<usize>,
}

impl AuditReport {
    /// True when every audited inequality holds to the given tolerance.
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_ascent_violation <= tolerance
            && self.max_sufficient_increase_violation <= tolerance
            && self.max_step_identity_rel_error <= tolerance
            && self.max_step_consistency_error <= tolerance
    }
}

/// Recompute, from the stored positions of a recorded run:
///
/// (a) density ascent per step;
/// (b) the sufficient-increase inequality
///     `f(y_{t+1}) - f(y_t) >= ((2-zeta)/zeta) * (D(y_t)/2) * step^2`;
/// (c) the step/gradient identity `step * D(y_t) = zeta * ||grad f(y_t)||`,
///     where `D` is the step denominator (`f_check / h^2` under a uniform
///     bandwidth) and `zeta` the recorded over-relaxation;
/// (d) consistency of the stored step with the recomputed displacement,
///     `||(y_{t+1} - y_t) - zeta * m(y_t)||`, normalized by position scale.
///
/// The relative check (c) compares two independently accumulated sums whose
/// agreement is limited by cancellation once the step shrinks below roughly
/// `1e-5` of the data scale; shorter steps are excluded from (c), counted
/// in `identity_steps_below_floor`, and still covered by (d), which pins
/// the trajectory to the update rule at machine precision.
pub fn audit_trajectory(model: &DensityModel, trajectory: &Trajectory) -> AuditReport {
    let zeta = trajectory.over_relaxation();
    let data_extent = {
        let (lo, hi) = model.dataset().bounding_box();
        lo.iter()
            .chain(hi.iter())
            .fold(0.0_f64, |a, v| a.max(v.abs()))
    };
    let mut report = AuditReport {
        steps: trajectory.len().saturating_sub(1),
        max_ascent_violation: 0.0,
        worst_ascent_step: None,
        max_sufficient_increase_violation: 0.0,
        worst_sufficient_increase_step: None,
        max_step_identity_rel_error: 0.0,
        worst_step_identity_step: None,
        identity_steps_below_floor: 0,
        max_step_consistency_error: 0.0,
        worst_step_consistency_step: None,
    };
    for i in 0..trajectory.len().saturating_sub(1) {
        let y = trajectory.position(i);
        let y_next = trajectory.position(i + 1);
        let f = model.kde_value(y);
        let f_next = model.kde_value(y_next);
        let denominator = model.step_denominator(y);
        let step: f64 = y
            .iter()
            .zip(y_next)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = 1.0 + y_norm + data_extent;

        let ascent = f - f_next;
        if ascent > report.max_ascent_violation {
            report.max_ascent_violation = ascent;
            report.worst_ascent_step = Some(i + 1);
        }

        let required = (2.0 - zeta) / zeta * 0.5 * denominator * step * step;
        let shortfall = required - (f_next - f);
        if shortfall > report.max_sufficient_increase_violation {
            report.max_sufficient_increase_violation = shortfall;
            report.worst_sufficient_increase_step = Some(i + 1);
        }

        if step >= 1e-5 * scale {
            let grad_norm = model.kde_gradient(y).norm();
            let lhs = step * denominator;
            let rhs = zeta * grad_norm;
            let rel = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
            if rel > report.max_step_identity_rel_error {
                report.max_step_identity_rel_error = rel;
                report.worst_step_identity_step = Some(i + 1);
            }
        } else if step > 0.0 {
            report.identity_steps_below_floor += 1;
        }

        let displacement = crate::meanshift::ms_displacement(model, y);
        let mismatch: f64 = y
            .iter()
            .zip(y_next)
            .zip(&displacement)
            .map(|((a, b), m)| {
                let err = (b - a) - zeta * m;
                err * err
            })
            .sum::<f64>()
            .sqrt();
        let consistency = mismatch / scale;
        if consistency > report.max_step_consistency_error {
            report.max_step_consistency_error = consistency;
            report.worst_step_consistency_step = Some(i + 1);
        }
    }
    report
}

/// Predicted against fitted convergence behavior at a run's limit point.
#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub limit_point: Vec<f64>,
    pub largest_hessian_eigenvalue: f64,
    /// `1 + lambda / D` at the limit; lies in [0, 1] at a local maximum.
    pub predicted_q: f64,
    /// Flatness exponent, when known from construction or supplied.
    pub loja_exponent: Option<f64>,
    pub rate_class: RateClass,
    /// Predicted decay exponents (positive numbers; polynomial class only).
    pub predicted_position_slope: Option<f64>,
    pub predicted_value_slope: Option<f64>,
    /// Fitted log-log slopes (negative for decaying tails).
    pub fitted_position_slope: Option<f64>,
    pub fitted_value_slope: Option<f64>,
    pub fitted_q: Option<f64>,
    pub fit_window: Option<[usize; 2]>,
    pub finite_convergence: bool,
}

/// Assemble a [`RateReport`] for a recorded run.
///
/// The limit defaults to the final iterate; symmetric constructions may pass
/// the known limit explicitly. `theta` is the flatness exponent when known
/// (it is never computed from the data).
pub fn rate_report(
    model: &DensityModel,
    trajectory: &Trajectory,
    y_bar: Option<&[f64]>,
    theta: Option<f64>,
) -> Result<RateReport> {
    let limit: Vec<f64> = y_bar.unwrap_or(trajectory.final_position()).to_vec();
    let denominator = model.step_denominator(&limit);
    if denominator == 0.0 {
        return Err(Error::JacobianUndefined);
    }
    let hessian = model.kde_hessian(&limit)?;
    let lambda = largest_eigenvalue(&hessian);
    let predicted_q = 1.0 + lambda / denominator;
    debug_assert!(
        (-1e-9..=1.0 + 1e-9).contains(&predicted_q),
        "contraction factor {predicted_q} outside [0, 1] at a local maximum"
    );

    let prediction = match theta {
        Some(t) => classify_rate(t)?,
        None => {
            if lambda > -DEGENERACY_FACTOR * denominator {
                RatePrediction {
                    rate_class: RateClass::Polynomial,
                    position_decay: None,
                    value_decay: None,
                }
            } else {
                RatePrediction {
                    rate_class: RateClass::Linear,
                    position_decay: None,
                    value_decay: None,
                }
            }
        }
    };

    let mut report = RateReport {
        limit_point: limit.clone(),
        largest_hessian_eigenvalue: lambda,
        predicted_q,
        loja_exponent: theta,
        rate_class: prediction.rate_class,
        predicted_position_slope: prediction.position_decay,
        predicted_value_slope: prediction.value_decay,
        fitted_position_slope: None,
        fitted_value_slope: None,
        fitted_q: None,
        fit_window: None,
        finite_convergence: false,
    };
    match fit_empirical_rates(model, trajectory, &limit) {
        Ok(EmpiricalRates::Fitted(fit)) => {
            report.fitted_position_slope = Some(fit.position_slope);
            report.fitted_value_slope = fit.value_slope;
            report.fitted_q = Some(fit.q_hat);
            report.fit_window = Some(fit.fit_window);
        }
        Ok(EmpiricalRates::FiniteConvergence { .. }) => {
            report.finite_convergence = true;
        }
        Err(Error::InsufficientData { .. }) => {}
        Err(e) => return Err(e),
    }
    Ok(report)
}
