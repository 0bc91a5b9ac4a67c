//! Run the four flat-mode rate experiments end to end and print the
//! predicted-versus-fitted comparison table.

use modeseek::cli::{run_experiment_case, ExperimentCase};

fn main() -> modeseek::Result<()> {
    println!(
        "{:<5} {:>6} {:>10} {:>22} {:>22}",
        "case", "theta", "iters", "position slope (fit)", "value slope (fit)"
    );
    for case in [
        ExperimentCase::I,
        ExperimentCase::II,
        ExperimentCase::III,
        ExperimentCase::IV,
    ] {
        let (report, _traj) = run_experiment_case(case)?;
        let fitted = |v: Option<f64>| v.map_or("n/a".to_owned(), |s| format!("{s:+.4}"));
        let predicted = |v: Option<f64>| v.map_or("-".to_owned(), |s| format!("{:+.4}", -s));
        println!(
            "{:<5} {:>6.3} {:>10} {:>10} vs {:>8} {:>10} vs {:>8}   {}",
            report.case,
            report.theta,
            report.iterations,
            fitted(report.rate.fitted_position_slope),
            predicted(report.rate.predicted_position_slope),
            fitted(report.rate.fitted_value_slope),
            predicted(report.rate.predicted_value_slope),
            if report.pass { "pass" } else { "FAIL" }
        );
        if case == ExperimentCase::I {
            println!(
                "      geometric: q_hat = {:.6} vs predicted q = {:.6}",
                report.rate.fitted_q.unwrap_or(f64::NAN),
                report.rate.predicted_q
            );
        }
    }
    Ok(())
}
