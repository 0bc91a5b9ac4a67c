//! Cluster data by the modes their seeded runs converge to.

use modeseek::{cluster, default_merge_tolerance, DataSet, DensityModel, KernelSpec, MSConfig};

fn main() -> modeseek::Result<()> {
    // three groups on a line, the third one tight
    let mut xs = Vec::new();
    for k in 0..8 {
        xs.push(0.15 * k as f64 - 0.5);
        xs.push(6.0 + 0.15 * k as f64);
        xs.push(12.0 + 0.02 * k as f64);
    }
    let data = DataSet::from_1d(&xs)?;
    let model = DensityModel::new(data, KernelSpec::gaussian(), 0.6)?;

    let tolerance = default_merge_tolerance(&model);
    let result = cluster(&model, &MSConfig::default(), tolerance, 4)?;

    println!(
        "{} points -> {} clusters (merge tolerance {tolerance:.3e})",
        result.labels.len(),
        result.modes.len()
    );
    for (label, mode) in result.modes.iter().enumerate() {
        let members = result.labels.iter().filter(|&&l| l == label).count();
        println!("  cluster {label}: mode {:>8.5}, {members} members", mode[0]);
    }

    // a wider bandwidth merges the two nearby groups
    let wide = DensityModel::new(DataSet::from_1d(&xs)?, KernelSpec::gaussian(), 3.0)?;
    let result = cluster(&wide, &MSConfig::default(), default_merge_tolerance(&wide), 4)?;
    println!("with bandwidth 3.0: {} clusters", result.modes.len());
    Ok(())
}
