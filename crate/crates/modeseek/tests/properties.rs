//! Property suites for the structural invariants of the estimate and the
//! iteration, on seeded random draws plus a few proptest generators.

use modeseek::density::{DataSet, DensityModel};
use modeseek::diagnostics::{classify_rate, rate_report};
use modeseek::kernels::KernelSpec;
use modeseek::meanshift::{ms_displacement, ms_run, ms_step, MSConfig, StopReason};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_dataset(rng: &mut ChaCha8Rng, d: usize, max_n: usize) -> DataSet {
    let n = rng.random_range(2..=max_n);
    let coords: Vec<f64> = (0..n * d).map(|_| rng.random_range(-2.0..2.0)).collect();
    DataSet::new(coords, d).unwrap()
}

/// The displacement equals the gradient over the step denominator wherever
/// the weight function is positive (1000 random draws).
#[test]
fn displacement_is_scaled_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let kernels = KernelSpec::catalog();
    let mut checked = 0;
    while checked < 1000 {
        let d = if checked % 3 == 0 { 2 } else { 1 };
        let data = random_dataset(&mut rng, d, 12);
        let h = rng.random_range(0.4..1.6);
        let kernel = kernels[checked % kernels.len()].clone();
        let model = DensityModel::new(data, kernel, h).unwrap();
        let y: Vec<f64> = (0..d).map(|_| rng.random_range(-2.5..2.5)).collect();
        let denominator = model.step_denominator(&y);
        if denominator == 0.0 {
            continue;
        }
        let m = ms_displacement(&model, &y);
        let g = model.kde_gradient(&y).vector;
        for k in 0..d {
            let expected = g[k] / denominator;
            assert!(
                (m[k] - expected).abs() <= 1e-10 * expected.abs().max(1e-12),
                "draw {checked}: component {k}: {} vs {expected}",
                m[k]
            );
        }
        checked += 1;
    }
}

/// Same identity with per-point bandwidths and weights.
#[test]
fn displacement_identity_with_per_point_bandwidths() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for draw in 0..200 {
        let n = rng.random_range(2..10);
        let coords: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..3.0)).collect();
        let bandwidths: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..1.5)).collect();
        let data = DataSet::new(coords, 1)
            .unwrap()
            .with_weights(weights)
            .unwrap()
            .with_bandwidths(bandwidths)
            .unwrap();
        let model = DensityModel::new(data, KernelSpec::gaussian(), 9.9).unwrap();
        let y = [rng.random_range(-2.0..2.0)];
        let m = ms_displacement(&model, &y);
        let expected = model.kde_gradient(&y).vector[0] / model.step_denominator(&y);
        assert!(
            (m[0] - expected).abs() <= 1e-10 * expected.abs().max(1e-12),
            "draw {draw}: {} vs {expected}",
            m[0]
        );
    }
}

/// Tangent-line dominance at the profile level for convex profiles:
/// `K(v) >= K(u) + Kcheck(u) (u - v)` over 1000 random pairs per kernel.
#[test]
fn profile_tangent_dominance() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for kernel in KernelSpec::catalog() {
        if !kernel.properties().convex_profile {
            continue;
        }
        let top = kernel.support_radius_sq_half().unwrap_or(4.0) * 2.0;
        for _ in 0..1000 {
            let u = rng.random_range(0.0..top);
            let v = rng.random_range(0.0..top);
            let tangent = kernel.profile_value(u).unwrap()
                + kernel.subgradient_value(u).unwrap() * (u - v);
            assert!(
                kernel.profile_value(v).unwrap() >= tangent - 1e-12,
                "{}: tangent at u={u} exceeds profile at v={v}",
                kernel.name()
            );
        }
    }
}

/// Midpoint convexity over random pairs for every convex-flagged profile.
#[test]
fn profile_midpoint_convexity() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for kernel in KernelSpec::catalog() {
        if !kernel.properties().convex_profile {
            continue;
        }
        let top = kernel.support_radius_sq_half().unwrap_or(4.0) * 2.0;
        let at_zero = kernel.profile_value(0.0).unwrap();
        for _ in 0..10_000 {
            let u = rng.random_range(0.0..top);
            let v = rng.random_range(0.0..top);
            let mid = kernel.profile_value(0.5 * (u + v)).unwrap();
            let avg =
                0.5 * (kernel.profile_value(u).unwrap() + kernel.profile_value(v).unwrap());
            assert!(
                mid <= avg + 1e-12,
                "{}: convexity violated at ({u}, {v})",
                kernel.name()
            );
            // non-increasing profiles peak at zero
            assert!(kernel.profile_value(u).unwrap() <= at_zero + 1e-12);
        }
    }
}

/// Random plain runs terminate at fixed points (not the iteration cap) with
/// finite path length, and their iterates stay inside the data bounding box.
#[test]
fn runs_terminate_with_finite_paths_inside_the_hull() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let kernels = [
        KernelSpec::gaussian(),
        KernelSpec::biweight(),
        KernelSpec::logistic(),
        KernelSpec::epanechnikov(),
    ];
    for trial in 0..60 {
        let d = if trial % 2 == 0 { 1 } else { 2 };
        let data = random_dataset(&mut rng, d, 25);
        let (lo, hi) = data.bounding_box();
        let diameter = data.diameter();
        let h = rng.random_range(0.4..1.3);
        let seed = rng.random_range(0..data.n());
        let start = data.point(seed).to_vec();
        let kernel = kernels[trial % kernels.len()].clone();
        let model = DensityModel::new(data, kernel, h).unwrap();
        let traj = ms_run(&model, &start, &MSConfig::default()).unwrap();
        assert!(
            matches!(
                traj.stop_reason(),
                StopReason::StepBelowTolerance | StopReason::ExactFixedPoint
            ),
            "trial {trial}: stopped by {:?}",
            traj.stop_reason()
        );
        let path_length: f64 = (0..traj.len()).map(|i| traj.step_norm(i)).sum();
        assert!(path_length.is_finite() && path_length <= 100.0 * (diameter + 1.0));
        for i in 1..traj.len() {
            for (k, &v) in traj.position(i).iter().enumerate() {
                assert!(
                    v >= lo[k] - 1e-9 && v <= hi[k] + 1e-9,
                    "trial {trial}: iterate {i} escaped the hull"
                );
            }
        }
    }
}

/// Over-relaxed runs land on the same mode as the plain iteration.
#[test]
fn over_relaxation_reaches_the_same_mode() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for trial in 0..20 {
        // two separated blobs with moderate smoothing keep basins clean
        let mut coords = Vec::new();
        let gap = rng.random_range(6.0..10.0);
        for _ in 0..8 {
            coords.push(rng.random_range(-0.5..0.5));
            coords.push(gap + rng.random_range(-0.5..0.5));
        }
        let data = DataSet::new(coords, 1).unwrap();
        let model = DensityModel::new(data, KernelSpec::gaussian(), 0.8).unwrap();
        for seed in 0..model.dataset().n() {
            let start = model.dataset().point(seed).to_vec();
            let plain = ms_run(&model, &start, &MSConfig::default()).unwrap();
            for zeta in [0.5, 1.5] {
                let config = MSConfig {
                    over_relaxation: zeta,
                    ..MSConfig::default()
                };
                let relaxed = ms_run(&model, &start, &config).unwrap();
                assert!(relaxed.converged());
                let dist = (relaxed.final_position()[0] - plain.final_position()[0]).abs();
                assert!(
                    dist <= 1e-6,
                    "trial {trial} seed {seed} zeta {zeta}: modes differ by {dist:.3e}"
                );
            }
        }
    }
}

/// Over-relaxed runs still ascend (the surrogate gain stays positive for
/// step scalings below 2).
#[test]
fn over_relaxed_runs_still_ascend() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..40 {
        let data = random_dataset(&mut rng, 1, 15);
        let h = rng.random_range(0.5..1.2);
        let model = DensityModel::new(data, KernelSpec::gaussian(), h).unwrap();
        let start = model.dataset().point(0).to_vec();
        let zeta = rng.random_range(0.2..1.8);
        let config = MSConfig {
            over_relaxation: zeta,
            ..MSConfig::default()
        };
        let traj = ms_run(&model, &start, &config).unwrap();
        for i in 1..traj.len() {
            assert!(
                traj.density(i) >= traj.density(i - 1) - 1e-12,
                "trial {trial} zeta {zeta:.2}: descent at step {i}"
            );
        }
    }
}

/// The report's rate class agrees with the classifier across the exponent
/// grid, including the degenerate flat-mode runs.
#[test]
fn rate_report_class_matches_classifier() {
    for theta in [0.0, 0.25, 0.5, 0.75, 0.875] {
        let expected = classify_rate(theta).unwrap().rate_class;
        // short non-degenerate run; the class comes from theta alone
        let data = DataSet::from_1d(&[-0.95, 0.95]).unwrap();
        let model = DensityModel::new(data, KernelSpec::gaussian(), 1.0).unwrap();
        let traj = ms_run(&model, &[0.1], &MSConfig::default()).unwrap();
        let report = rate_report(&model, &traj, Some(&[0.0]), Some(theta)).unwrap();
        assert_eq!(report.rate_class, expected, "theta = {theta}");
    }
}

proptest! {
    /// The update is a convex combination of data points whenever any
    /// weight is active, so it lands inside the coordinate range.
    #[test]
    fn step_stays_in_coordinate_range(
        points in prop::collection::vec(-5.0_f64..5.0, 1..12),
        y in -8.0_f64..8.0,
        h in 0.2_f64..2.0,
    ) {
        let data = DataSet::from_1d(&points).unwrap();
        let model = DensityModel::new(data, KernelSpec::biweight(), h).unwrap();
        let next = ms_step(&model, &[y])[0];
        let lo = points.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = points.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if model.f_check(&[y]) > 0.0 {
            prop_assert!(next >= lo - 1e-12 && next <= hi + 1e-12);
        } else {
            prop_assert_eq!(next, y);
        }
    }

    /// Density estimates are non-negative and zero far outside compact
    /// supports.
    #[test]
    fn kde_is_nonnegative(
        points in prop::collection::vec(-3.0_f64..3.0, 1..10),
        x in -10.0_f64..10.0,
        h in 0.2_f64..2.0,
    ) {
        let data = DataSet::from_1d(&points).unwrap();
        let model = DensityModel::new(data, KernelSpec::triweight(), h).unwrap();
        let v = model.kde_value(&[x]);
        prop_assert!(v >= 0.0);
        let far = model.kde_value(&[1e6]);
        prop_assert_eq!(far, 0.0);
    }

    /// Reported profile values never go negative and respect the support
    /// radius for every cataloged kernel.
    #[test]
    fn profiles_nonnegative_with_exact_support(u in 0.0_f64..10.0, idx in 0usize..9) {
        let kernel = KernelSpec::catalog().swap_remove(idx);
        let v = kernel.profile_value(u).unwrap();
        prop_assert!(v >= 0.0);
        if let Some(edge) = kernel.support_radius_sq_half() {
            if u >= edge {
                prop_assert_eq!(v, 0.0);
            }
        }
        prop_assert!(kernel.subgradient_value(u).unwrap() >= 0.0);
    }
}
