//! Scale the step by a factor in (0, 2) and compare iteration counts.

use modeseek::{ms_run, DataSet, DensityModel, KernelSpec, MSConfig};

fn main() -> modeseek::Result<()> {
    let data = DataSet::from_1d(&[-1.3, -0.8, -0.1, 0.4, 1.1, 1.9])?;
    let model = DensityModel::new(data, KernelSpec::gaussian(), 0.9)?;
    let start = [1.8];

    println!("{:>6} {:>12} {:>14} {:>14}", "zeta", "iterations", "mode", "stop");
    for zeta in [0.5, 0.8, 1.0, 1.2, 1.5, 1.9] {
        let config = MSConfig {
            over_relaxation: zeta,
            ..MSConfig::default()
        };
        let traj = ms_run(&model, &start, &config)?;
        println!(
            "{zeta:>6.1} {:>12} {:>14.9} {:>14}",
            traj.total_iterations(),
            traj.final_position()[0],
            format!("{:?}", traj.stop_reason()),
        );
    }
    println!("\nall step scalings below 2 keep the ascent property and the mode");
    Ok(())
}
