//! Constant weights and per-point bandwidths: both generalizations enter
//! the estimate and the update together.

use modeseek::{ms_run, DataSet, DensityModel, KernelSpec, MSConfig};

fn main() -> modeseek::Result<()> {
    let xs = [-1.0, 0.0, 1.0];

    // upweighting the right point drags the central mode toward it
    for w in [1.0, 3.0, 9.0] {
        let data = DataSet::from_1d(&xs)?.with_weights(vec![1.0, 1.0, w])?;
        let model = DensityModel::new(data, KernelSpec::gaussian(), 0.9)?;
        let traj = ms_run(&model, &[0.0], &MSConfig::default())?;
        println!(
            "weight on x = 1 set to {w}: mode at {:>8.5}",
            traj.final_position()[0]
        );
    }

    // per-point bandwidths: a sharp local peak survives next to a broad one
    let data = DataSet::from_1d(&[-1.0, 1.0])?.with_bandwidths(vec![1.4, 0.25])?;
    let model = DensityModel::new(data, KernelSpec::gaussian(), 1.0)?;
    println!("\nper-point bandwidths (1.4 broad, 0.25 sharp):");
    for start in [-1.5, 0.4, 1.5] {
        let traj = ms_run(&model, &[start], &MSConfig::default())?;
        println!(
            "  start {start:>4.1} -> {:>8.5} after {} iterations",
            traj.final_position()[0],
            traj.total_iterations()
        );
    }
    Ok(())
}
