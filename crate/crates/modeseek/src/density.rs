//! Kernel density estimates: values, gradients, Hessians, the weight
//! function driving the mean-shift step, quadratic minorizers, and
//! one-dimensional higher-order derivatives.
//!
//! All evaluation is pure over immutable models, with summation in data
//! index order so results are bit-reproducible.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hermite;
use crate::kernels::KernelSpec;

/// `n` points in `R^d` with optional positive weights and optional
/// per-point bandwidths.
#[derive(Debug, Clone)]
pub struct DataSet {
    points: Vec<f64>, // row-major n x d
    n: usize,
    d: usize,
    weights: Option<Vec<f64>>,
    bandwidths: Option<Vec<f64>>,
}

impl DataSet {
    /// Build from a flat row-major buffer of `n * d` coordinates.
    pub fn new(points: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidData("dimension must be at least 1".into()));
        }
        if points.is_empty() || !points.len().is_multiple_of(d) {
            return Err(Error::InvalidData(format!(
                "coordinate buffer length {} is not a positive multiple of d = {d}",
                points.len()
            )));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("coordinates must be finite".into()));
        }
        let n = points.len() / d;
        Ok(Self {
            points,
            n,
            d,
            weights: None,
            bandwidths: None,
        })
    }

    /// Build from per-point coordinate rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidData("ragged coordinate rows".into()));
        }
        Self::new(rows.concat(), d)
    }

    /// One-dimensional convenience constructor.
    pub fn from_1d(xs: &[f64]) -> Result<Self> {
        Self::new(xs.to_vec(), 1)
    }

    /// Attach positive per-point weights.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.n {
            return Err(Error::InvalidData(format!(
                "{} weights for {} points",
                weights.len(),
                self.n
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidData("weights must be positive".into()));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    /// Attach positive per-point bandwidths, overriding the model bandwidth.
    pub fn with_bandwidths(mut self, bandwidths: Vec<f64>) -> Result<Self> {
        if bandwidths.len() != self.n {
            return Err(Error::InvalidData(format!(
                "{} bandwidths for {} points",
                bandwidths.len(),
                self.n
            )));
        }
        if bandwidths.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::InvalidData("bandwidths must be positive".into()));
        }
        self.bandwidths = Some(bandwidths);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn bandwidths(&self) -> Option<&[f64]> {
        self.bandwidths.as_deref()
    }

    /// Largest pairwise distance; 0 for a single point.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0_f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let dist2: f64 = self
                    .point(i)
                    .iter()
                    .zip(self.point(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                best = best.max(dist2);
            }
        }
        best.sqrt()
    }

    /// Axis-aligned bounding box, as (lower, upper) corners.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = self.point(0).to_vec();
        let mut hi = lo.clone();
        for i in 1..self.n {
            for (k, &v) in self.point(i).iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        (lo, hi)
    }
}

/// Gradient of the estimate plus a non-smoothness marker.
#[derive(Debug, Clone)]
pub struct Gradient {
    pub vector: Vec<f64>,
    /// Some data offset landed on a profile knot; the reported vector is the
    /// one-sided value induced by the subgradient profile.
    pub at_nonsmooth_point: bool,
}

impl Gradient {
    pub fn norm(&self) -> f64 {
        self.vector.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// A kernel density estimate: dataset, kernel, bandwidth, and an optional
/// normalization so reported values integrate to one.
#[derive(Debug, Clone)]
pub struct DensityModel {
    dataset: DataSet,
    kernel: KernelSpec,
    bandwidth: f64,
    normalized: bool,
    scale: f64,
}

/// Per-point evaluation context shared by all estimate formulas.
struct Term<'a> {
    index: usize,
    point: &'a [f64],
    weight: f64,
    h: f64,
    /// squared half-radius of the scaled offset, `||x - x_i||^2 / (2 h_i^2)`
    u: f64,
}

impl DensityModel {
    /// Model reporting unnormalized values (the iteration itself never needs
    /// the normalization).
    pub fn new(dataset: DataSet, kernel: KernelSpec, bandwidth: f64) -> Result<Self> {
        Self::build(dataset, kernel, bandwidth, false)
    }

    /// Model whose reported values use the kernel normalized to integrate
    /// to one over `R^d`.
    pub fn normalized(dataset: DataSet, kernel: KernelSpec, bandwidth: f64) -> Result<Self> {
        Self::build(dataset, kernel, bandwidth, true)
    }

    fn build(dataset: DataSet, kernel: KernelSpec, bandwidth: f64, normalized: bool) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        let scale = if normalized {
            kernel.normalization_constant(dataset.d())?
        } else {
            1.0
        };
        Ok(Self {
            dataset,
            kernel,
            bandwidth,
            normalized,
            scale,
        })
    }

    pub fn dataset(&self) -> &DataSet {
        &self.dataset
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Multiplier applied to every reported value: the kernel normalization
    /// constant for normalized models, 1 otherwise.
    pub(crate) fn normalization_factor(&self) -> f64 {
        self.scale
    }

    pub fn d(&self) -> usize {
        self.dataset.d()
    }

    fn check_query(&self, x: &[f64]) {
        assert_eq!(x.len(), self.d(), "query dimension mismatch");
        debug_assert!(x.iter().all(|v| v.is_finite()));
    }

    fn term<'a>(&'a self, i: usize, x: &[f64]) -> Term<'a> {
        let point = self.dataset.point(i);
        let h = self
            .dataset
            .bandwidths()
            .map_or(self.bandwidth, |hs| hs[i]);
        let dist2: f64 = x.iter().zip(point).map(|(a, b)| (a - b) * (a - b)).sum();
        Term {
            index: i,
            point,
            weight: self.dataset.weight(i),
            h,
            u: 0.5 * dist2 / (h * h),
        }
    }

    fn terms<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = Term<'a>> {
        (0..self.dataset.n()).map(move |i| self.term(i, x))
    }

    /// Density estimate at `x` (non-negative).
    pub fn kde_value(&self, x: &[f64]) -> f64 {
        self.check_query(x);
        let d = self.d() as i32;
        let sum: f64 = self
            .terms(x)
            .map(|t| t.weight * self.kernel.profile_raw(t.u) / t.h.powi(d))
            .sum();
        self.scale * sum / self.dataset.n() as f64
    }

    /// Weight-function analog of the estimate: same sum with the profile
    /// replaced by its subgradient profile. Non-negative; it is the
    /// curvature scale of the minorizer and the step denominator of the
    /// mean-shift update.
    pub fn f_check(&self, x: &[f64]) -> f64 {
        self.check_query(x);
        let d = self.d() as i32;
        let sum: f64 = self
            .terms(x)
            .map(|t| t.weight * self.kernel.subgradient_raw(t.u) / t.h.powi(d))
            .sum();
        self.scale * sum / self.dataset.n() as f64
    }

    /// Denominator of the mean-shift displacement: with a uniform bandwidth
    /// this equals `f_check(x) / h^2`; with per-point bandwidths each term
    /// carries its own `h_i`.
    pub fn step_denominator(&self, x: &[f64]) -> f64 {
        self.check_query(x);
        let e = self.d() as i32 + 2;
        let sum: f64 = self
            .terms(x)
            .map(|t| t.weight * self.kernel.subgradient_raw(t.u) / t.h.powi(e))
            .sum();
        self.scale * sum / self.dataset.n() as f64
    }

    /// Gradient of the estimate where it is differentiable; at non-smooth
    /// points the subgradient-profile value is reported and flagged.
    pub fn kde_gradient(&self, x: &[f64]) -> Gradient {
        self.check_query(x);
        let e = self.d() as i32 + 2;
        let mut vector = vec![0.0; self.d()];
        let mut at_nonsmooth_point = false;
        for t in self.terms(x) {
            let c = t.weight * self.kernel.subgradient_raw(t.u) / t.h.powi(e);
            at_nonsmooth_point |= self.kernel.near_knot(t.u);
            for (g, (&xi, &xq)) in vector.iter_mut().zip(t.point.iter().zip(x)) {
                *g += c * (xi - xq);
            }
        }
        let f = self.scale / self.dataset.n() as f64;
        for g in &mut vector {
            *g *= f;
        }
        Gradient {
            vector,
            at_nonsmooth_point,
        }
    }

    /// Hessian of the estimate, where second profile derivatives exist and
    /// no data offset sits on a knot.
    pub fn kde_hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_query(x);
        if !self.kernel.has_second_derivative() {
            return Err(Error::NoSecondDerivative(self.kernel.name().to_owned()));
        }
        let d = self.d();
        let e = d as i32 + 2;
        let mut hess = DMatrix::zeros(d, d);
        for t in self.terms(x) {
            if self.kernel.near_knot(t.u) {
                return Err(Error::HessianUndefined { index: t.index });
            }
            let c2 = t.weight * self.kernel.second_derivative_value(t.u)? / t.h.powi(e + 2);
            let c1 = t.weight * self.kernel.subgradient_raw(t.u) / t.h.powi(e);
            for r in 0..d {
                for c in 0..d {
                    let outer = (x[r] - t.point[r]) * (x[c] - t.point[c]);
                    hess[(r, c)] += c2 * outer - if r == c { c1 } else { 0.0 };
                }
            }
        }
        hess.scale_mut(self.scale / self.dataset.n() as f64);
        Ok(hess)
    }

    /// Quadratic minorizer of the estimate anchored at `anchor`: touches the
    /// estimate there and lies below it everywhere else.
    pub fn minorizer_value(&self, x: &[f64], anchor: &[f64]) -> f64 {
        self.check_query(x);
        self.check_query(anchor);
        let d = self.d() as i32;
        let mut sum = 0.0;
        for i in 0..self.dataset.n() {
            let ta = self.term(i, anchor);
            let tx = self.term(i, x);
            let tangent =
                self.kernel.profile_raw(ta.u) + self.kernel.subgradient_raw(ta.u) * (ta.u - tx.u);
            sum += ta.weight * tangent / ta.h.powi(d);
        }
        self.scale * sum / self.dataset.n() as f64
    }

    /// `m`-th derivative of a one-dimensional estimate.
    ///
    /// Kernels with an exponential profile use the exact Hermite-polynomial
    /// identity; all others fall back to finite differences (orders above 8
    /// are rejected, and accuracy degrades beyond order 4).
    pub fn kde_derivative_1d(&self, order: usize, x: f64) -> Result<f64> {
        if self.d() != 1 {
            return Err(Error::NotOneDimensional(self.d()));
        }
        if order == 0 {
            return Ok(self.kde_value(&[x]));
        }
        if self.kernel.is_gaussian_profile() {
            let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
            let sum: f64 = self
                .terms(&[x])
                .map(|t| {
                    let s = (x - t.point[0]) / t.h;
                    t.weight * sign * hermite::he(order, s) * self.kernel.profile_raw(0.5 * s * s)
                        / t.h.powi(1 + order as i32)
                })
                .sum();
            Ok(self.scale * sum / self.dataset.n() as f64)
        } else {
            self.kde_derivative_1d_fd(order, x)
        }
    }

    /// Finite-difference `m`-th derivative of a one-dimensional estimate
    /// (central binomial stencil, Richardson-extrapolated once for m >= 3).
    pub fn kde_derivative_1d_fd(&self, order: usize, x: f64) -> Result<f64> {
        if self.d() != 1 {
            return Err(Error::NotOneDimensional(self.d()));
        }
        if order == 0 {
            return Ok(self.kde_value(&[x]));
        }
        if order > 8 {
            return Err(Error::UnsupportedOrder { order, max: 8 });
        }
        // Step sizes balance truncation against rounding per order; the
        // naive 1e-5 step drowns orders >= 2 in cancellation noise.
        const BASE_STEP: [f64; 8] = [1e-5, 1e-4, 1e-2, 2e-2, 8e-2, 8e-2, 0.15, 0.15];
        let h = BASE_STEP[order - 1] * x.abs().max(1.0);
        let stencil = |h: f64| -> f64 {
            let mut sum = 0.0;
            let mut binom = 1.0_f64;
            for k in 0..=order {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let offset = (0.5 * order as f64 - k as f64) * h;
                sum += sign * binom * self.kde_value(&[x + offset]);
                binom = binom * (order - k) as f64 / (k + 1) as f64;
            }
            sum / h.powi(order as i32)
        };
        if order >= 3 {
            Ok((4.0 * stencil(0.5 * h) - stencil(h)) / 3.0)
        } else {
            Ok(stencil(h))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PHI_0: f64 = 0.3989422804014327; // standard normal density at 0
    const PHI_095: f64 = 0.254059056469189; // at 0.95
    const PHI_1: f64 = 0.2419707245191433; // at 1

    fn gaussian_model(points: &[f64]) -> DensityModel {
        DensityModel::normalized(
            DataSet::from_1d(points).unwrap(),
            KernelSpec::gaussian(),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn dataset_validation() {
        assert!(DataSet::new(vec![], 1).is_err());
        assert!(DataSet::new(vec![1.0, 2.0, 3.0], 2).is_err());
        assert!(DataSet::new(vec![f64::NAN], 1).is_err());
        assert!(DataSet::from_1d(&[0.0])
            .unwrap()
            .with_weights(vec![0.0])
            .is_err());
        assert!(DataSet::from_1d(&[0.0])
            .unwrap()
            .with_bandwidths(vec![-1.0])
            .is_err());
        let ds = DataSet::from_rows(&[vec![0.0, 1.0], vec![3.0, 5.0]]).unwrap();
        assert_eq!((ds.n(), ds.d()), (2, 2));
        assert_relative_eq!(ds.diameter(), 25.0_f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn kde_value_examples() {
        let single = gaussian_model(&[0.0]);
        assert_relative_eq!(single.kde_value(&[0.0]), PHI_0, max_relative = 1e-8);

        let pair = gaussian_model(&[-0.95, 0.95]);
        assert_relative_eq!(pair.kde_value(&[0.0]), PHI_095, max_relative = 1e-8);

        let compact = DensityModel::new(
            DataSet::from_1d(&[0.0, 0.5]).unwrap(),
            KernelSpec::biweight(),
            1.0,
        )
        .unwrap();
        assert_eq!(compact.kde_value(&[50.0]), 0.0);
    }

    #[test]
    fn f_check_examples() {
        let single = DensityModel::new(
            DataSet::from_1d(&[0.0]).unwrap(),
            KernelSpec::gaussian(),
            1.0,
        )
        .unwrap();
        assert_eq!(single.f_check(&[0.0]), 1.0);

        let pair = gaussian_model(&[-0.95, 0.95]);
        // subgradient profile equals the profile for the exponential kernel
        assert_relative_eq!(pair.f_check(&[0.0]), PHI_095, max_relative = 1e-8);

        let compact = DensityModel::new(
            DataSet::from_1d(&[0.0]).unwrap(),
            KernelSpec::epanechnikov(),
            1.0,
        )
        .unwrap();
        assert_eq!(compact.f_check(&[9.0]), 0.0);
    }

    #[test]
    fn gradient_examples() {
        let pair = gaussian_model(&[-0.7, 0.7]);
        assert_eq!(pair.kde_gradient(&[0.0]).vector[0], 0.0);

        let single = gaussian_model(&[2.0]);
        assert!(single.kde_gradient(&[0.0]).vector[0] > 0.0);
    }

    #[test]
    fn gradient_flags_knot_hits() {
        // datum at squared half-radius exactly 1 from the query
        let model = DensityModel::new(
            DataSet::from_1d(&[2.0_f64.sqrt()]).unwrap(),
            KernelSpec::epanechnikov(),
            1.0,
        )
        .unwrap();
        assert!(model.kde_gradient(&[0.0]).at_nonsmooth_point);
        assert!(!model.kde_gradient(&[0.5]).at_nonsmooth_point);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let model = gaussian_model(&[-1.0, 1.0]);
        let x = 0.5;
        let h = 1e-5;
        let fd = (model.kde_value(&[x + h]) - model.kde_value(&[x - h])) / (2.0 * h);
        assert_relative_eq!(model.kde_gradient(&[x]).vector[0], fd, max_relative = 1e-6);
    }

    #[test]
    fn gradient_multivariate_matches_finite_differences() {
        let ds = DataSet::from_rows(&[vec![0.3, -0.2], vec![-0.8, 0.5], vec![0.1, 0.9]])
            .unwrap()
            .with_weights(vec![1.0, 2.0, 0.5])
            .unwrap();
        let model = DensityModel::new(ds, KernelSpec::cauchy(), 0.7).unwrap();
        let x = [0.2, 0.1];
        let g = model.kde_gradient(&x);
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += 1e-6;
            xm[k] -= 1e-6;
            let fd = (model.kde_value(&xp) - model.kde_value(&xm)) / 2e-6;
            assert_relative_eq!(g.vector[k], fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn hessian_examples() {
        let single = gaussian_model(&[0.0]);
        let h = single.kde_hessian(&[0.0]).unwrap();
        assert_relative_eq!(h[(0, 0)], -PHI_0, max_relative = 1e-8);

        let degenerate = gaussian_model(&[-1.0, 1.0]);
        let h = degenerate.kde_hessian(&[0.0]).unwrap();
        assert!(h[(0, 0)].abs() < 1e-16);
    }

    #[test]
    fn hessian_unavailable_on_knot() {
        // datum exactly at the support edge: u = 1 for x = 0 offset sqrt(2)
        let model = DensityModel::new(
            DataSet::from_1d(&[2.0_f64.sqrt()]).unwrap(),
            KernelSpec::biweight(),
            1.0,
        )
        .unwrap();
        match model.kde_hessian(&[0.0]) {
            Err(Error::HessianUndefined { index }) => assert_eq!(index, 0),
            other => panic!("expected knot hit, got {other:?}"),
        }
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let ds = DataSet::from_rows(&[vec![0.4, 0.1], vec![-0.3, 0.8], vec![0.9, -0.6]]).unwrap();
        let model = DensityModel::new(ds, KernelSpec::logistic(), 0.9).unwrap();
        let x = [0.15, 0.25];
        let hess = model.kde_hessian(&x).unwrap();
        let step = 1e-4;
        for r in 0..2 {
            for c in 0..2 {
                let mut pp = x;
                let mut pm = x;
                let mut mp = x;
                let mut mm = x;
                pp[r] += step;
                pp[c] += step;
                pm[r] += step;
                pm[c] -= step;
                mp[r] -= step;
                mp[c] += step;
                mm[r] -= step;
                mm[c] -= step;
                let fd = (model.kde_value(&pp) - model.kde_value(&pm) - model.kde_value(&mp)
                    + model.kde_value(&mm))
                    / (4.0 * step * step);
                assert!(
                    (hess[(r, c)] - fd).abs() < 1e-4,
                    "entry ({r},{c}): {} vs {fd}",
                    hess[(r, c)]
                );
            }
        }
        assert_relative_eq!(hess[(0, 1)], hess[(1, 0)], max_relative = 1e-12);
    }

    #[test]
    fn minorizer_touches_and_dominates() {
        let ds = DataSet::from_rows(&[vec![0.2], vec![-0.4], vec![1.1]]).unwrap();
        let model = DensityModel::new(ds, KernelSpec::biweight(), 0.8).unwrap();
        let anchor = [0.3];
        assert_eq!(
            model.minorizer_value(&anchor, &anchor),
            model.kde_value(&anchor)
        );
        for i in 0..100 {
            let x = [-2.0 + 4.0 * i as f64 / 99.0];
            assert!(model.minorizer_value(&x, &anchor) <= model.kde_value(&x) + 1e-12);
        }
    }

    #[test]
    fn minorizer_constant_when_anchor_outside_support() {
        let model = DensityModel::new(
            DataSet::from_1d(&[0.0]).unwrap(),
            KernelSpec::epanechnikov(),
            1.0,
        )
        .unwrap();
        let anchor = [10.0];
        let v1 = model.minorizer_value(&[-3.0], &anchor);
        let v2 = model.minorizer_value(&[5.0], &anchor);
        assert_eq!(v1, v2);
        assert_eq!(v1, model.kde_value(&anchor));
    }

    #[test]
    fn derivative_1d_examples() {
        let pair = gaussian_model(&[-1.0, 1.0]);
        assert_eq!(pair.kde_derivative_1d(2, 0.0).unwrap(), 0.0);
        // fourth derivative at the flat mode is strictly negative: -2 phi(1)
        assert_relative_eq!(
            pair.kde_derivative_1d(4, 0.0).unwrap(),
            -2.0 * PHI_1,
            max_relative = 1e-8
        );
        for m in [1, 3, 5, 7] {
            assert_eq!(pair.kde_derivative_1d(m, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn derivative_rejects_bad_requests() {
        let ds = DataSet::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let model = DensityModel::new(ds, KernelSpec::gaussian(), 1.0).unwrap();
        assert!(matches!(
            model.kde_derivative_1d(2, 0.0),
            Err(Error::NotOneDimensional(2))
        ));

        let flat = DensityModel::new(
            DataSet::from_1d(&[0.0]).unwrap(),
            KernelSpec::cauchy(),
            1.0,
        )
        .unwrap();
        assert!(matches!(
            flat.kde_derivative_1d(9, 0.0),
            Err(Error::UnsupportedOrder { order: 9, max: 8 })
        ));
    }

    #[test]
    fn analytic_and_finite_difference_derivatives_agree() {
        // near zeros of a derivative a pure relative comparison drowns in
        // difference noise, so magnitudes are floored at 1e-2 for the
        // Richardson orders (1e-3 below)
        let model = gaussian_model(&[-0.9, 0.4, 1.3]);
        for x in [-0.7, 0.0, 0.3, 1.1] {
            for m in 1..=4 {
                let exact = model.kde_derivative_1d(m, x).unwrap();
                let fd = model.kde_derivative_1d_fd(m, x).unwrap();
                let floor = if m >= 3 { 1e-2 } else { 1e-3 };
                assert!(
                    (exact - fd).abs() <= 1e-5 * exact.abs().max(floor),
                    "m={m} x={x}: {exact} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn per_point_bandwidths_match_explicit_sum() {
        let ds = DataSet::from_1d(&[-0.5, 0.8])
            .unwrap()
            .with_bandwidths(vec![0.4, 1.6])
            .unwrap()
            .with_weights(vec![2.0, 1.0])
            .unwrap();
        let model = DensityModel::new(ds, KernelSpec::gaussian(), 9.0).unwrap();
        let x = 0.2_f64;
        let expect = (2.0 * (-((x + 0.5) / 0.4).powi(2) / 2.0).exp() / 0.4
            + (-((x - 0.8) / 1.6).powi(2) / 2.0).exp() / 1.6)
            / 2.0;
        assert_relative_eq!(model.kde_value(&[x]), expect, max_relative = 1e-14);

        // gradient against finite differences under mixed bandwidths
        let g = model.kde_gradient(&[x]).vector[0];
        let fd = (model.kde_value(&[x + 1e-6]) - model.kde_value(&[x - 1e-6])) / 2e-6;
        assert_relative_eq!(g, fd, max_relative = 1e-6);
    }

    #[test]
    fn step_denominator_reduces_to_f_check_over_h_squared() {
        let ds = DataSet::from_1d(&[-1.0, 0.3, 2.0]).unwrap();
        let model = DensityModel::new(ds, KernelSpec::triweight(), 1.7).unwrap();
        let x = [0.4];
        assert_relative_eq!(
            model.step_denominator(&x),
            model.f_check(&x) / (1.7 * 1.7),
            max_relative = 1e-14
        );
    }
}
