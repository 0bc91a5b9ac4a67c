//! Catalog of radially symmetric kernels described through their profiles.
//!
//! A radially symmetric kernel factors as `K(x) = profile(||x||^2 / 2)`. The
//! mean-shift machinery never needs `K` itself, only the profile, a selection
//! from its negated subdifferential (the weight function driving the
//! iteration), and, for rate diagnostics, the second profile derivative.
//!
//! Profiles are stored unnormalized: the iteration is a ratio of kernel
//! sums, so positive scaling cancels. Normalization constants are computed
//! on demand by quadrature when density values must integrate to one.
//!
//! At non-smooth points of the profile the subdifferential is an interval;
//! this catalog resolves the tie with the right derivative, which makes the
//! weight vanish at support edges so that points sitting exactly on the
//! boundary exert no pull.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature;

/// Squared-half-radius distance under which a point counts as sitting on a
/// profile knot, making second derivatives unavailable there.
pub const KNOT_TOLERANCE: f64 = 1e-9;

/// Names accepted by [`KernelSpec::by_name`], in catalog order.
pub const KERNEL_NAMES: [&str; 9] = [
    "gaussian",
    "epanechnikov",
    "biweight",
    "triweight",
    "tricube",
    "cosine",
    "logistic",
    "cauchy",
    "threehalves",
];

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Structural properties of a kernel, as used by the convergence theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelProperties {
    /// Profile is convex, non-increasing, with a finite right derivative at 0.
    pub convex_profile: bool,
    /// The kernel (as a function on `R^d`) has a Lipschitz-continuous gradient.
    pub lipschitz_gradient: bool,
    /// The kernel is analytic or subanalytic.
    pub subanalytic: bool,
    /// The kernel is continuously differentiable.
    pub c1_smooth: bool,
}

/// A kernel described by its profile, subgradient profile, and metadata.
///
/// Values are immutable after construction and cheap to clone (function
/// objects are shared), so they can be used freely across threads.
#[derive(Clone)]
pub struct KernelSpec {
    name: String,
    profile: ProfileFn,
    subgradient: ProfileFn,
    second_derivative: Option<ProfileFn>,
    /// Squared half-radii where the profile is not smooth.
    knots: Vec<f64>,
    /// `u` beyond which the profile is exactly zero, for compact supports.
    support_radius_sq_half: Option<f64>,
    properties: KernelProperties,
    /// Maximum degree (in `x`) when the kernel is piecewise polynomial.
    max_poly_degree: Option<u32>,
    /// Profile is a positive multiple of `exp(-u)`, enabling the analytic
    /// derivative path for one-dimensional estimates.
    gaussian_profile: bool,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("name", &self.name)
            .field("knots", &self.knots)
            .field("support_radius_sq_half", &self.support_radius_sq_half)
            .field("properties", &self.properties)
            .field("max_poly_degree", &self.max_poly_degree)
            .finish_non_exhaustive()
    }
}

impl KernelSpec {
    /// Build a kernel from arbitrary profile functions.
    ///
    /// `profile` and `subgradient` take the squared half-radius
    /// `u = ||x||^2 / 2`; `subgradient` must be a non-negative selection
    /// from the negated subdifferential of the profile.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: impl Into<String>,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
        subgradient: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second_derivative: Option<ProfileFn>,
        knots: Vec<f64>,
        support_radius_sq_half: Option<f64>,
        properties: KernelProperties,
        max_poly_degree: Option<u32>,
    ) -> Self {
        Self {
            name: name.into(),
            profile: Arc::new(profile),
            subgradient: Arc::new(subgradient),
            second_derivative,
            knots,
            support_radius_sq_half,
            properties,
            max_poly_degree,
            gaussian_profile: false,
        }
    }

    /// Look up a cataloged kernel by (case-insensitive) name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Self::gaussian()),
            "epanechnikov" => Ok(Self::epanechnikov()),
            "biweight" => Ok(Self::biweight()),
            "triweight" => Ok(Self::triweight()),
            "tricube" => Ok(Self::tricube()),
            "cosine" => Ok(Self::cosine()),
            "logistic" => Ok(Self::logistic()),
            "cauchy" => Ok(Self::cauchy()),
            "threehalves" => Ok(Self::three_halves()),
            _ => Err(Error::UnknownKernel {
                name: name.to_owned(),
                available: KERNEL_NAMES.join(", "),
            }),
        }
    }

    /// All nine cataloged kernels.
    pub fn catalog() -> Vec<Self> {
        KERNEL_NAMES
            .iter()
            .map(|n| Self::by_name(n).expect("catalog names are valid"))
            .collect()
    }

    /// `profile(u) = exp(-u)`
    pub fn gaussian() -> Self {
        let mut spec = Self::custom(
            "gaussian",
            |u: f64| (-u).exp(),
            |u: f64| (-u).exp(),
            Some(Arc::new(|u: f64| (-u).exp()) as ProfileFn),
            vec![],
            None,
            KernelProperties {
                convex_profile: true,
                lipschitz_gradient: true,
                subanalytic: true,
                c1_smooth: true,
            },
            None,
        );
        spec.gaussian_profile = true;
        spec
    }

    /// `profile(u) = (1 - u)_+`
    pub fn epanechnikov() -> Self {
        Self::custom(
            "epanechnikov",
            |u: f64| (1.0 - u).max(0.0),
            |u: f64| if u < 1.0 { 1.0 } else { 0.0 },
            Some(Arc::new(|_u: f64| 0.0) as ProfileFn),
            vec![1.0],
            Some(1.0),
            KernelProperties {
                convex_profile: true,
                lipschitz_gradient: false,
                subanalytic: true,
                c1_smooth: false,
            },
            Some(2),
        )
    }

    /// `profile(u) = {(1 - u)_+}^2`
    pub fn biweight() -> Self {
        Self::custom(
            "biweight",
            |u: f64| {
                let t = (1.0 - u).max(0.0);
                t * t
            },
            |u: f64| 2.0 * (1.0 - u).max(0.0),
            Some(Arc::new(|u: f64| if u < 1.0 { 2.0 } else { 0.0 }) as ProfileFn),
            vec![1.0],
            Some(1.0),
            KernelProperties {
                convex_profile: true,
                lipschitz_gradient: true,
                subanalytic: true,
                c1_smooth: true,
            },
            Some(4),
        )
    }

    /// `profile(u) = {(1 - u)_+}^3`
    pub fn triweight() -> Self {
        Self::custom(
            "triweight",
            |u: f64| (1.0 - u).max(0.0).powi(3),
            |u: f64| {
                let t = (1.0 - u).max(0.0);
                3.0 * t * t
            },
            Some(Arc::new(|u: f64| 6.0 * (1.0 - u).max(0.0)) as ProfileFn),
            vec![1.0],
            Some(1.0),
            KernelProperties {
                convex_profile: true,
                lipschitz_gradient: true,
                subanalytic: true,
                c1_smooth: true,
            },
            Some(6),
        )
    }

    /// `profile(u) = {(1 - u^{3/2})_+}^3` — non-convex profile.
    pub fn tricube() -> Self {
        Self::custom(
            "tricube",
            |u: f64| (1.0 - u.powf(1.5)).max(0.0).powi(3),
            |u: f64| {
                if u >= 1.0 {
                    0.0
                } else {
                    let t = 1.0 - u.powf(1.5);
                    4.5 * u.sqrt() * t * t
                }
            },
            // singular at u = 0 (a knot), piecewise beyond u = 1
            Some(Arc::new(|u: f64| {
                if u >= 1.0 {
                    0.0
                } else {
                    let t = 1.0 - u.powf(1.5);
                    -2.25 * t * t / u.sqrt() + 13.5 * u * t
                }
            }) as ProfileFn),
            vec![0.0, 1.0],
            Some(1.0),
            KernelProperties {
                convex_profile: false,
                lipschitz_gradient: true,
                subanalytic: true,
                c1_smooth: true,
            },
            None,
        )
    }

    /// `profile(u) = cos(pi sqrt(u) / 2)` on `u <= 1`, zero beyond.
    pub fn cosine() -> Self {
        use std::f64::consts::PI;
        Self::custom(
            "cosine",
            |u: f64| {
                if u > 1.0 {
                    0.0
                } else {
                    (PI * u.sqrt() / 2.0).cos()
                }
            },
            |u: f64| {
                if u >= 1.0 {
                    return 0.0;
                }
                let z = PI * u.sqrt() / 2.0;
                if z < 1e-6 {
                    // sin(z)/z expansion keeps the u -> 0 limit finite
                    PI * PI / 8.0 * (1.0 - z * z / 6.0)
                } else {
                    PI * PI / 8.0 * z.sin() / z
                }
            },
            Some(Arc::new(|u: f64| {
                if u > 1.0 {
                    return 0.0;
                }
                let z = PI * u.sqrt() / 2.0;
                if u < 1e-6 {
                    let p4 = PI.powi(4);
                    p4 / 64.0 * (1.0 / 3.0 - z * z / 30.0)
                } else {
                    PI / 8.0 * z.sin() / u.powf(1.5) - PI * PI / 16.0 * z.cos() / u
                }
            }) as ProfileFn),
            vec![1.0],
            Some(1.0),
            KernelProperties {
                convex_profile: true,
                lipschitz_gradient: false,
                subanalytic: true,
                c1_smooth: false,
            },
            None,
        )
    }

    /// `profile(u) = 1 / (e^{sqrt(u)} + 2 + e^{-sqrt(u)})`
    ///
    /// The denominator equals `2 + 2 cosh(sqrt(u))`, an entire function of
    /// `u`, so the profile is analytic; small-`u` series keep the derivative
    /// formulas stable near zero.
    pub fn logistic() -> Self {
        // g(u) = 2 + 2 cosh(sqrt(u)); g'(u) = sinh(s)/s; g''(u) = (s cosh s - sinh s)/(2 s^3)
        fn g(u: f64) -> f64 {
            2.0 + 2.0 * u.sqrt().cosh()
        }
        fn g1(u: f64) -> f64 {
            if u < 1e-8 {
                1.0 + u / 6.0 + u * u / 120.0
            } else {
                let s = u.sqrt();
                s.sinh() / s
            }
        }
        fn g2(u: f64) -> f64 {
            if u < 1e-4 {
                1.0 / 6.0 + u / 60.0 + u * u / 1680.0
            } else {
                let s = u.sqrt();
                (s * s.cosh() - s.sinh()) / (2.0 * s.powi(3))
            }
        }
        Self::custom(
            "logistic",
            |u: f64| 1.0 / g(u),
            |u: f64| {
                let gv = g(u);
                g1(u) / (gv * gv)
            },
            Some(Arc::new(|u: f64| {
                let gv = g(u);
                let d1 = g1(u);
                (2.0 * d1 * d1 - g2(u) * gv) / gv.powi(3)
            }) as ProfileFn),
            vec![],
            None,
            KernelProperties {
                convex_profile: true,
                lipschitz_gradient: true,
                subanalytic: true,
                c1_smooth: true,
            },
            None,
        )
    }

    /// `profile(u) = 1 / (1 + u)`
    pub fn cauchy() -> Self {
        Self::custom(
            "cauchy",
            |u: f64| 1.0 / (1.0 + u),
            |u: f64| {
                let t = 1.0 + u;
                1.0 / (t * t)
            },
            Some(Arc::new(|u: f64| 2.0 / (1.0 + u).powi(3)) as ProfileFn),
            vec![],
            None,
            KernelProperties {
                convex_profile: true,
                lipschitz_gradient: true,
                subanalytic: true,
                c1_smooth: true,
            },
            None,
        )
    }

    /// `profile(u) = {(1 - u)_+}^{3/2}` — convex but without a Lipschitz
    /// gradient (the second derivative blows up at the support edge).
    pub fn three_halves() -> Self {
        Self::custom(
            "threehalves",
            |u: f64| (1.0 - u).max(0.0).powf(1.5),
            |u: f64| 1.5 * (1.0 - u).max(0.0).sqrt(),
            Some(Arc::new(|u: f64| {
                if u >= 1.0 {
                    0.0
                } else {
                    0.75 / (1.0 - u).sqrt()
                }
            }) as ProfileFn),
            vec![1.0],
            Some(1.0),
            KernelProperties {
                convex_profile: true,
                lipschitz_gradient: false,
                subanalytic: true,
                c1_smooth: true,
            },
            None,
        )
    }

    /// Kernel with the profile multiplied by `factor > 0`. The mean-shift
    /// update is a ratio of kernel sums, so iterates are unchanged; useful
    /// for verifying that invariance.
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor > 0.0 && factor.is_finite());
        let profile = self.profile.clone();
        let subgradient = self.subgradient.clone();
        let second = self.second_derivative.clone();
        Self {
            name: format!("{}*{factor}", self.name),
            profile: Arc::new(move |u| factor * profile(u)),
            subgradient: Arc::new(move |u| factor * subgradient(u)),
            second_derivative: second
                .map(|f| Arc::new(move |u| factor * f(u)) as ProfileFn),
            knots: self.knots.clone(),
            support_radius_sq_half: self.support_radius_sq_half,
            properties: self.properties,
            max_poly_degree: self.max_poly_degree,
            gaussian_profile: self.gaussian_profile,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn properties(&self) -> KernelProperties {
        self.properties
    }

    /// Maximum degree in `x` when the kernel is piecewise polynomial.
    pub fn max_poly_degree(&self) -> Option<u32> {
        self.max_poly_degree
    }

    pub fn support_radius_sq_half(&self) -> Option<f64> {
        self.support_radius_sq_half
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub(crate) fn is_gaussian_profile(&self) -> bool {
        self.gaussian_profile
    }

    /// Unnormalized profile value at squared half-radius `u >= 0`.
    pub fn profile_value(&self, u: f64) -> Result<f64> {
        if u.is_nan() || u < 0.0 {
            return Err(Error::NegativeRadius(u));
        }
        Ok((self.profile)(u))
    }

    /// Subgradient-profile value at `u >= 0` (right-derivative convention at
    /// knots). Non-negative on the whole domain.
    pub fn subgradient_value(&self, u: f64) -> Result<f64> {
        if u.is_nan() || u < 0.0 {
            return Err(Error::NegativeRadius(u));
        }
        Ok((self.subgradient)(u))
    }

    /// Infallible profile access for hot loops; `u` must be non-negative.
    #[inline]
    pub(crate) fn profile_raw(&self, u: f64) -> f64 {
        debug_assert!(u >= 0.0);
        (self.profile)(u)
    }

    #[inline]
    pub(crate) fn subgradient_raw(&self, u: f64) -> f64 {
        debug_assert!(u >= 0.0);
        (self.subgradient)(u)
    }

    pub fn has_second_derivative(&self) -> bool {
        self.second_derivative.is_some()
    }

    /// Second profile derivative at `u`, where it exists. Validity near
    /// knots must be checked by the caller via [`KernelSpec::near_knot`].
    pub fn second_derivative_value(&self, u: f64) -> Result<f64> {
        if u.is_nan() || u < 0.0 {
            return Err(Error::NegativeRadius(u));
        }
        match &self.second_derivative {
            Some(f) => Ok(f(u)),
            None => Err(Error::NoSecondDerivative(self.name.clone())),
        }
    }

    /// Whether `u` lies within [`KNOT_TOLERANCE`] of a profile knot.
    pub fn near_knot(&self, u: f64) -> bool {
        self.knots.iter().any(|&k| (u - k).abs() <= KNOT_TOLERANCE)
    }

    /// Kernel value at a point of `R^d`: `profile(||x||^2 / 2)`.
    pub fn kernel_value(&self, x: &[f64]) -> Result<f64> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        let u = 0.5 * x.iter().map(|v| v * v).sum::<f64>();
        self.profile_value(u)
    }

    /// Constant `Z` such that `Z * int K(x) dx = 1` over `R^d`, by adaptive
    /// radial quadrature (relative accuracy better than 1e-8).
    pub fn normalization_constant(&self, d: usize) -> Result<f64> {
        assert!(d >= 1, "dimension must be at least 1");
        let profile = self.profile.clone();
        let radius = self.support_radius_sq_half.map(|u| (2.0 * u).sqrt());
        match quadrature::radial_integral(move |u| profile(u), d, radius) {
            Some(integral) if integral > 0.0 && integral.is_finite() => Ok(1.0 / integral),
            _ => Err(Error::NotIntegrable {
                kernel: self.name.clone(),
                dim: d,
            }),
        }
    }
}
