//! The mean-shift iteration: single step, full run with stopping rules,
//! over-relaxed variant, and mode-based clustering.

use serde::{Deserialize, Serialize};

use crate::density::DensityModel;
use crate::error::{Error, Result};

/// Iteration parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MSConfig {
    /// Stop once the step norm drops to this value or below. A step-norm
    /// rule (rather than a gradient rule) lets compact-support kernels
    /// register their exact fixed points, where the step is exactly zero.
    pub step_tolerance: f64,
    pub max_iterations: usize,
    /// Step scaling in (0, 2); 1 is the plain update.
    pub over_relaxation: f64,
    /// Record every state; otherwise only the final state is kept.
    pub record_trajectory: bool,
}

impl Default for MSConfig {
    fn default() -> Self {
        Self {
            step_tolerance: 1e-12,
            max_iterations: 100_000,
            over_relaxation: 1.0,
            record_trajectory: true,
        }
    }
}

impl MSConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_tolerance > 0.0 && self.step_tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "step tolerance must be positive, got {}",
                self.step_tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("iteration cap must be positive".into()));
        }
        if !(self.over_relaxation > 0.0 && self.over_relaxation < 2.0) {
            return Err(Error::InvalidConfig(format!(
                "over-relaxation must lie in (0, 2), got {}",
                self.over_relaxation
            )));
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// `0 < step <= tolerance`.
    StepBelowTolerance,
    /// The update reproduced the iterate bit for bit (step exactly zero).
    ExactFixedPoint,
    /// The weight function vanished; the iterate is a critical point and
    /// the update leaves it unchanged.
    FCheckZero,
    MaxIterations,
}

/// One recorded state, borrowed from a [`Trajectory`].
#[derive(Debug, Clone, Copy)]
pub struct StateView<'a> {
    /// 1-based iteration index.
    pub t: usize,
    pub position: &'a [f64],
    pub density: f64,
    /// Distance to the next recorded position (0 for the final state).
    pub step_norm: f64,
    pub grad_norm: f64,
    pub f_check: f64,
}

/// The recorded run: per-iterate position, density, step norm, gradient
/// norm, and weight-function value, plus the stop reason.
///
/// Storage is columnar; iterate `i` (0-based) corresponds to iteration
/// `t = i + 1`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    d: usize,
    positions: Vec<f64>,
    densities: Vec<f64>,
    step_norms: Vec<f64>,
    grad_norms: Vec<f64>,
    f_checks: Vec<f64>,
    stop_reason: StopReason,
    /// Number of update evaluations performed (equals `len()` when fully
    /// recorded).
    total_iterations: usize,
    over_relaxation: f64,
    /// The run began where the density vanishes; the positivity guarantee
    /// for the weight function does not apply.
    zero_density_start: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.densities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.densities.is_empty()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i * self.d..(i + 1) * self.d]
    }

    pub fn density(&self, i: usize) -> f64 {
        self.densities[i]
    }

    pub fn step_norm(&self, i: usize) -> f64 {
        self.step_norms[i]
    }

    pub fn grad_norm(&self, i: usize) -> f64 {
        self.grad_norms[i]
    }

    pub fn f_check(&self, i: usize) -> f64 {
        self.f_checks[i]
    }

    pub fn state(&self, i: usize) -> StateView<'_> {
        StateView {
            t: i + 1,
            position: self.position(i),
            density: self.densities[i],
            step_norm: self.step_norms[i],
            grad_norm: self.grad_norms[i],
            f_check: self.f_checks[i],
        }
    }

    pub fn states(&self) -> impl Iterator<Item = StateView<'_>> {
        (0..self.len()).map(|i| self.state(i))
    }

    pub fn final_position(&self) -> &[f64] {
        self.position(self.len() - 1)
    }

    pub fn stop_reason(&self) -> StopReason {
        self.stop_reason
    }

    pub fn total_iterations(&self) -> usize {
        self.total_iterations
    }

    pub fn over_relaxation(&self) -> f64 {
        self.over_relaxation
    }

    pub fn zero_density_start(&self) -> bool {
        self.zero_density_start
    }

    /// Whether the run ended at a fixed point rather than by running out of
    /// iterations.
    pub fn converged(&self) -> bool {
        !matches!(self.stop_reason, StopReason::MaxIterations)
    }
}

fn norm_of_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// One mean-shift update from `y`: the subgradient-weighted mean of the
/// data, or `y` itself when every weight vanishes.
pub fn ms_step(model: &DensityModel, y: &[f64]) -> Vec<f64> {
    match weighted_mean(model, y) {
        Some(mean) => mean,
        None => y.to_vec(),
    }
}

/// The displacement `m(y) = step(y) - y`, accumulated in difference form
/// (`sum_i c_i (x_i - y) / sum_i c_i`). Zero when every weight vanishes.
///
/// Equal to the gradient divided by the step denominator wherever the
/// estimate is differentiable.
pub fn ms_displacement(model: &DensityModel, y: &[f64]) -> Vec<f64> {
    let data = model.dataset();
    let d = data.d();
    let kernel = model.kernel();
    let per_point = data.bandwidths();
    let mut num = vec![0.0; d];
    let mut den = 0.0;
    for i in 0..data.n() {
        let point = data.point(i);
        let h = per_point.map_or(model.bandwidth(), |hs| hs[i]);
        let dist2: f64 = y.iter().zip(point).map(|(a, b)| (a - b) * (a - b)).sum();
        let u = 0.5 * dist2 / (h * h);
        let mut c = data.weight(i) * kernel.subgradient_raw(u);
        if per_point.is_some() {
            c /= h.powi(d as i32 + 2);
        }
        if c != 0.0 {
            den += c;
            for (acc, (&xi, &yi)) in num.iter_mut().zip(point.iter().zip(y)) {
                *acc += c * (xi - yi);
            }
        }
    }
    if den == 0.0 {
        return vec![0.0; d];
    }
    for v in &mut num {
        *v /= den;
    }
    num
}

/// Weighted mean of data points with weights `w_i K-check(u_i) / h_i^{d+2}`.
/// `None` when the weight sum is zero. The `h_i` factor is constant under a
/// uniform bandwidth and is dropped there so exact fixed points stay exact.
fn weighted_mean(model: &DensityModel, y: &[f64]) -> Option<Vec<f64>> {
    let data = model.dataset();
    let d = data.d();
    let kernel = model.kernel();
    let per_point = data.bandwidths();
    let mut num = vec![0.0; d];
    let mut den = 0.0;
    for i in 0..data.n() {
        let point = data.point(i);
        let h = per_point.map_or(model.bandwidth(), |hs| hs[i]);
        let dist2: f64 = y.iter().zip(point).map(|(a, b)| (a - b) * (a - b)).sum();
        let u = 0.5 * dist2 / (h * h);
        let mut c = data.weight(i) * kernel.subgradient_raw(u);
        if per_point.is_some() {
            c /= h.powi(d as i32 + 2);
        }
        if c != 0.0 {
            den += c;
            for (acc, &xi) in num.iter_mut().zip(point) {
                *acc += c * xi;
            }
        }
    }
    if den == 0.0 {
        return None;
    }
    for v in &mut num {
        *v /= den;
    }
    Some(num)
}

/// Run the iteration from `start` until the step norm reaches the
/// tolerance, an exact fixed point, a vanishing weight function, or the
/// iteration cap.
pub fn ms_run(model: &DensityModel, start: &[f64], config: &MSConfig) -> Result<Trajectory> {
    config.validate()?;
    let d = model.d();
    assert_eq!(start.len(), d, "start dimension mismatch");
    if start.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }

    let zeta = config.over_relaxation;
    let record = config.record_trajectory;
    let zero_density_start = model.kde_value(start) == 0.0;

    let mut traj = Trajectory {
        d,
        positions: Vec::new(),
        densities: Vec::new(),
        step_norms: Vec::new(),
        grad_norms: Vec::new(),
        f_checks: Vec::new(),
        stop_reason: StopReason::MaxIterations,
        total_iterations: 0,
        over_relaxation: zeta,
        zero_density_start,
    };

    let push_state = |traj: &mut Trajectory, y: &[f64], step: f64| {
        traj.positions.extend_from_slice(y);
        traj.densities.push(model.kde_value(y));
        traj.step_norms.push(step);
        traj.grad_norms.push(model.kde_gradient(y).norm());
        traj.f_checks.push(model.f_check(y));
    };

    let keep_last = |traj: &mut Trajectory| {
        if !record && traj.len() > 1 {
            let n = traj.len();
            traj.positions.drain(0..(n - 1) * d);
            traj.densities.drain(0..n - 1);
            traj.step_norms.drain(0..n - 1);
            traj.grad_norms.drain(0..n - 1);
            traj.f_checks.drain(0..n - 1);
        }
    };

    let mut y = start.to_vec();
    for t in 1..=config.max_iterations {
        traj.total_iterations = t;
        let Some(mean) = weighted_mean(model, &y) else {
            push_state(&mut traj, &y, 0.0);
            traj.stop_reason = StopReason::FCheckZero;
            keep_last(&mut traj);
            return Ok(traj);
        };
        let next: Vec<f64> = if zeta == 1.0 {
            mean
        } else {
            y.iter()
                .zip(&mean)
                .map(|(yi, mi)| yi + zeta * (mi - yi))
                .collect()
        };
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure { iteration: t });
        }
        let step = norm_of_difference(&next, &y);
        push_state(&mut traj, &y, step);
        keep_last(&mut traj);
        if step == 0.0 {
            traj.stop_reason = StopReason::ExactFixedPoint;
            return Ok(traj);
        }
        if step <= config.step_tolerance {
            push_state(&mut traj, &next, 0.0);
            keep_last(&mut traj);
            traj.stop_reason = StopReason::StepBelowTolerance;
            return Ok(traj);
        }
        y = next;
    }
    traj.stop_reason = StopReason::MaxIterations;
    Ok(traj)
}

/// Result of mode-based clustering.
#[derive(Debug, Clone, Serialize)]
pub struct Clustering {
    /// Cluster label per data point, indexing into `modes`.
    pub labels: Vec<usize>,
    /// Merged mode list, ordered by first appearance over the seed order.
    pub modes: Vec<Vec<f64>>,
    /// Seed indices whose runs ran out of iterations before converging.
    pub unconverged_seeds: Vec<usize>,
}

/// Merge tolerance used by the command-line driver when none is given:
/// `1e-6` times the data diameter.
pub fn default_merge_tolerance(model: &DensityModel) -> f64 {
    (1e-6 * model.dataset().diameter()).max(1e-12)
}

/// Run the iteration from every data point and merge the resulting modes by
/// single linkage at `merge_tolerance`.
///
/// Per-seed runs may execute on up to `threads` worker threads; the label
/// assembly is by seed index, so the outcome does not depend on scheduling.
pub fn cluster(
    model: &DensityModel,
    config: &MSConfig,
    merge_tolerance: f64,
    threads: usize,
) -> Result<Clustering> {
    config.validate()?;
    if !(merge_tolerance > 0.0 && merge_tolerance.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "merge tolerance must be positive, got {merge_tolerance}"
        )));
    }
    let n = model.dataset().n();
    let run_config = MSConfig {
        record_trajectory: false,
        ..config.clone()
    };

    let run_seed = |i: usize| -> Result<(Vec<f64>, bool)> {
        let start = model.dataset().point(i);
        match ms_run(model, start, &run_config) {
            Ok(traj) => Ok((traj.final_position().to_vec(), traj.converged())),
            Err(e) => Err(Error::SeededRunFailed {
                seed: i,
                source: Box::new(e),
            }),
        }
    };

    let threads = threads.clamp(1, n);
    type SeedOutcome = Option<Result<(Vec<f64>, bool)>>;
    let mut slots: Vec<SeedOutcome> = (0..n).map(|_| None).collect();
    if threads == 1 {
        for (i, slot) in slots.iter_mut().enumerate() {
            *slot = Some(run_seed(i));
        }
    } else {
        let chunk = n.div_ceil(threads);
        let run_seed = &run_seed;
        std::thread::scope(|scope| {
            for (ci, slab) in slots.chunks_mut(chunk).enumerate() {
                scope.spawn(move || {
                    for (k, slot) in slab.iter_mut().enumerate() {
                        *slot = Some(run_seed(ci * chunk + k));
                    }
                });
            }
        });
    }
    let outcomes: Vec<(Vec<f64>, bool)> = slots
        .into_iter()
        .map(|r| r.expect("every seed slot is filled"))
        .collect::<Result<_>>()?;
    let unconverged_seeds: Vec<usize> = outcomes
        .iter()
        .enumerate()
        .filter_map(|(i, (_, ok))| (!ok).then_some(i))
        .collect();
    let endpoints: Vec<Vec<f64>> = outcomes.into_iter().map(|(p, _)| p).collect();

    // single-linkage merge via union-find over seed endpoints
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if norm_of_difference(&endpoints[i], &endpoints[j]) <= merge_tolerance {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    // root at the smaller seed index for determinism
                    let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                    parent[hi] = lo;
                }
            }
        }
    }

    let mut modes: Vec<Vec<f64>> = Vec::new();
    let mut root_label: Vec<Option<usize>> = vec![None; n];
    let labels: Vec<usize> = (0..n)
        .map(|i| {
            let root = find(&mut parent, i);
            *root_label[root].get_or_insert_with(|| {
                modes.push(endpoints[root].clone());
                modes.len() - 1
            })
        })
        .collect();
    Ok(Clustering {
        labels,
        modes,
        unconverged_seeds,
    })
}
