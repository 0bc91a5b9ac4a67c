//! Walk the kernel catalog: profile values, structural flags,
//! normalization constants, and flatness-exponent bounds.

use modeseek::diagnostics::lojasiewicz_exponent_bound;
use modeseek::KernelSpec;

fn main() -> modeseek::Result<()> {
    println!(
        "{:<13} {:>10} {:>10} {:>8} {:>8} {:>12} {:>10}",
        "kernel", "K(0.25)", "Kcheck(.25)", "convex", "smooth", "Z (d=1)", "bound d=1"
    );
    for kernel in KernelSpec::catalog() {
        let z = match kernel.normalization_constant(1) {
            Ok(z) => format!("{z:.7}"),
            Err(_) => "n/a".into(),
        };
        let bound = lojasiewicz_exponent_bound(&kernel, 1)
            .map_or("-".to_owned(), |b| format!("{b:.4}"));
        println!(
            "{:<13} {:>10.6} {:>10.6} {:>8} {:>8} {:>12} {:>10}",
            kernel.name(),
            kernel.profile_value(0.25)?,
            kernel.subgradient_value(0.25)?,
            kernel.properties().convex_profile,
            kernel.properties().lipschitz_gradient,
            z,
            bound,
        );
    }

    // compact supports report exact zeros beyond the edge
    let biweight = KernelSpec::biweight();
    println!(
        "\nbiweight at the support edge: K(1) = {}, beyond: K(1.5) = {}",
        biweight.profile_value(1.0)?,
        biweight.profile_value(1.5)?
    );

    // the tricube profile is the catalog's non-convex member
    let tricube = KernelSpec::tricube();
    let (u, v) = (0.0, 0.37);
    let mid = tricube.profile_value(0.5 * (u + v))?;
    let avg = 0.5 * (tricube.profile_value(u)? + tricube.profile_value(v)?);
    println!(
        "tricube midpoint check on ({u}, {v}): profile(mid) = {mid:.6} > chord = {avg:.6}"
    );
    Ok(())
}
