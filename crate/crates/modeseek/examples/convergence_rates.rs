//! Predict the geometric contraction factor at a mode from the Jacobian of
//! the iteration map, then confirm it against the recorded run.

use modeseek::diagnostics::{fit_empirical_rates, jacobian_at, linear_rate, EmpiricalRates, LocalRate};
use modeseek::{ms_run, DataSet, DensityModel, KernelSpec, MSConfig};

fn main() -> modeseek::Result<()> {
    // symmetric pair: the mode sits at the origin and the 1x1 Jacobian
    // there has the closed form a^2 for half-separation a
    let a = 0.95;
    let model = DensityModel::normalized(
        DataSet::from_1d(&[-a, a])?,
        KernelSpec::gaussian(),
        1.0,
    )?;

    let jac = jacobian_at(&model, &[0.0])?;
    println!("iteration-map Jacobian at the mode: {:.6} (a^2 = {:.6})", jac[(0, 0)], a * a);

    match linear_rate(&model, &[0.0])? {
        LocalRate::Linear { q, lambda } => {
            println!("predicted contraction: q = {q:.6} (top Hessian eigenvalue {lambda:.6})")
        }
        LocalRate::Degenerate { lambda } => {
            println!("degenerate mode (top Hessian eigenvalue {lambda:.3e})")
        }
    }

    let traj = ms_run(&model, &[0.1], &MSConfig::default())?;
    match fit_empirical_rates(&model, &traj, &[0.0])? {
        EmpiricalRates::Fitted(fit) => println!(
            "fitted over iterations {:?}: q_hat = {:.6} from {} usable states",
            fit.fit_window, fit.q_hat, fit.usable_states
        ),
        EmpiricalRates::FiniteConvergence { iterations } => {
            println!("converged exactly in {iterations} iterations")
        }
    }

    // a single data point contracts in one step: q = 0
    let point = DensityModel::new(DataSet::from_1d(&[0.4])?, KernelSpec::gaussian(), 1.0)?;
    if let LocalRate::Linear { q, .. } = linear_rate(&point, &[0.4])? {
        println!("single-point dataset: q = {q}");
    }
    Ok(())
}
