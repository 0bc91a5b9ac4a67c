//! Seek a mode from a single start point and inspect the recorded run.

use modeseek::{ms_run, DataSet, DensityModel, KernelSpec, MSConfig};

fn main() -> modeseek::Result<()> {
    let data = DataSet::from_rows(&[
        vec![0.0, 0.1],
        vec![0.3, -0.2],
        vec![-0.1, 0.4],
        vec![4.8, 5.1],
        vec![5.2, 4.9],
    ])?;
    let model = DensityModel::new(data, KernelSpec::gaussian(), 0.7)?;

    let traj = ms_run(&model, &[1.5, 1.5], &MSConfig::default())?;
    println!(
        "stopped by {:?} after {} iterations at {:?}",
        traj.stop_reason(),
        traj.total_iterations(),
        traj.final_position()
    );

    println!("\n{:>4} {:>22} {:>12} {:>12}", "t", "position", "f", "step");
    let stride = (traj.len() / 10).max(1);
    for i in (0..traj.len()).step_by(stride) {
        let s = traj.state(i);
        println!(
            "{:>4} ({:>9.6}, {:>9.6}) {:>12.8} {:>12.3e}",
            s.t, s.position[0], s.position[1], s.density, s.step_norm
        );
    }

    // a compact-support kernel reaches its fixed point exactly
    let compact = DensityModel::new(
        DataSet::from_1d(&[-0.5, 0.5])?,
        KernelSpec::epanechnikov(),
        1.0,
    )?;
    let traj = ms_run(&compact, &[0.2], &MSConfig::default())?;
    println!(
        "\npiecewise-linear profile: {:?} after {} iterations, final step = {}",
        traj.stop_reason(),
        traj.total_iterations(),
        traj.step_norm(traj.len() - 1)
    );
    Ok(())
}
