//! Audit a recorded run against the per-step guarantees: density ascent,
//! sufficient increase, and the step/gradient identity.

use modeseek::{audit_trajectory, ms_run, DataSet, DensityModel, KernelSpec, MSConfig};

fn main() -> modeseek::Result<()> {
    let data = DataSet::from_1d(&[-1.0, -0.2, 0.3, 0.7, 2.1])?;
    let model = DensityModel::new(data, KernelSpec::biweight(), 1.1)?;

    for zeta in [1.0, 1.5] {
        let config = MSConfig {
            over_relaxation: zeta,
            ..MSConfig::default()
        };
        let traj = ms_run(&model, &[2.0], &config)?;
        let report = audit_trajectory(&model, &traj);
        println!("zeta = {zeta}: {} steps audited", report.steps);
        println!(
            "  worst ascent violation:              {:.3e}",
            report.max_ascent_violation
        );
        println!(
            "  worst sufficient-increase violation: {:.3e}",
            report.max_sufficient_increase_violation
        );
        println!(
            "  step/gradient identity error:        {:.3e} ({} short steps covered by the consistency check)",
            report.max_step_identity_rel_error, report.identity_steps_below_floor
        );
        println!(
            "  trajectory/update consistency:       {:.3e}",
            report.max_step_consistency_error
        );
        println!("  passes at 1e-10: {}\n", report.passes(1e-10));
    }
    Ok(())
}
