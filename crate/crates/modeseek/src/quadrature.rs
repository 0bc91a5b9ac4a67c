//! Adaptive quadrature for kernel normalization constants.

/// Adaptive Simpson integration of `f` over `[a, b]`.
///
/// `tol` is an absolute tolerance for the segment; recursion splits until the
/// classic Richardson estimate of the local error is below it.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }

    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Integrate a radial profile over `R^d`:
/// `S_{d-1} * int_0^inf profile(r^2/2) r^{d-1} dr`,
/// where `S_{d-1}` is the surface area of the unit sphere.
///
/// Compactly supported profiles pass the outer radius in `support_radius`;
/// unbounded supports are handled by doubling windows until the tail is
/// negligible. Returns `None` when the tail fails to decay (the integral
/// diverges or converges too slowly to resolve).
pub(crate) fn radial_integral<F: Fn(f64) -> f64>(
    profile: F,
    d: usize,
    support_radius: Option<f64>,
) -> Option<f64> {
    let integrand = |r: f64| profile(0.5 * r * r) * r.powi(d as i32 - 1);
    let rel_tol = 1e-10;

    let radial = match support_radius {
        Some(rmax) => {
            let rough = adaptive_simpson(&integrand, 0.0, rmax, 1e-6);
            adaptive_simpson(&integrand, 0.0, rmax, rel_tol * rough.abs().max(1e-12))
        }
        None => {
            let mut total = adaptive_simpson(&integrand, 0.0, 1.0, 1e-12);
            let mut lo = 1.0;
            let mut converged = false;
            for _ in 0..64 {
                let hi = 2.0 * lo;
                let seg = adaptive_simpson(&integrand, lo, hi, rel_tol * total.abs().max(1e-12));
                total += seg;
                lo = hi;
                if seg.abs() <= rel_tol * total.abs() {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return None;
            }
            total
        }
    };

    Some(sphere_surface_area(d) * radial)
}

/// Surface area of the unit sphere in `R^d` (`2` for d = 1, `2*pi` for d = 2, ...).
fn sphere_surface_area(d: usize) -> f64 {
    let half_d = 0.5 * d as f64;
    2.0 * std::f64::consts::PI.powf(half_d) / gamma(half_d)
}

/// Gamma function for half-integer arguments (all we ever need).
fn gamma(x: f64) -> f64 {
    // x is either an integer or half-integer >= 1/2
    let twice = (2.0 * x).round() as i64;
    debug_assert!((2.0 * x - twice as f64).abs() < 1e-12 && twice >= 1);
    if twice % 2 == 0 {
        // integer argument: (n-1)!
        let n = twice / 2;
        (1..n).map(|k| k as f64).product()
    } else {
        // half-integer: Gamma(1/2) = sqrt(pi), then Gamma(x+1) = x Gamma(x)
        let mut value = std::f64::consts::PI.sqrt();
        let mut arg = 0.5;
        while arg + 0.5 < x {
            value *= arg;
            arg += 1.0;
        }
        value
    }
}
