//! Build symmetric placements whose density estimate is flat at the origin
//! to a prescribed order, and show the polynomial decay they induce.

use modeseek::diagnostics::classify_rate;
use modeseek::{
    even_derivative_residuals, ms_run, solve_degenerate_config, DensityModel, KernelSpec,
    MSConfig,
};

fn main() -> modeseek::Result<()> {
    for m in 1..=3 {
        let config = solve_degenerate_config(m, None)?;
        let prediction = classify_rate(config.theta)?;
        println!(
            "m = {m}: positions {:?}\n  vanishing orders <= {}, theta = {:.4}, residuals {:?}",
            config.pair_positions,
            config.vanish_order + 1,
            config.theta,
            config
                .residuals
                .iter()
                .map(|r| format!("{r:.1e}"))
                .collect::<Vec<_>>(),
        );
        println!(
            "  predicted decay: distance ~ t^-{:.4}, density gap ~ t^-{:.4}",
            prediction.position_decay.unwrap(),
            prediction.value_decay.unwrap()
        );

        // a short run makes the slow decay visible
        let model = DensityModel::normalized(config.dataset(), KernelSpec::gaussian(), 1.0)?;
        let run = ms_run(
            &model,
            &[0.5],
            &MSConfig {
                max_iterations: 20_000,
                ..MSConfig::default()
            },
        )?;
        let show = [10usize, 100, 1000, 10_000];
        let row: Vec<String> = show
            .iter()
            .filter(|&&t| t <= run.len())
            .map(|&t| format!("y_{t} = {:.5}", run.position(t - 1)[0]))
            .collect();
        println!("  {}\n", row.join(", "));
    }

    // residuals at truncated published placements stay small but nonzero
    let truncated = [0.651, 1.959, 3.243];
    let r = even_derivative_residuals(&truncated, &[2, 4, 6])?;
    println!(
        "residuals at truncated positions {truncated:?}: {:?}",
        r.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>()
    );
    Ok(())
}
