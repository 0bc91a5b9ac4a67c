//! Evaluate a density estimate and its derived quantities over a grid:
//! value, gradient, weight function, Hessian, and the quadratic minorizer.

use modeseek::{DataSet, DensityModel, KernelSpec};

fn main() -> modeseek::Result<()> {
    let data = DataSet::from_1d(&[-1.2, -0.4, 0.1, 0.9, 1.6])?;
    let model = DensityModel::normalized(data, KernelSpec::biweight(), 0.8)?;

    println!("{:>6} {:>10} {:>10} {:>10}", "x", "f", "f'", "fcheck");
    for i in 0..13 {
        let x = -2.4 + 0.4 * i as f64;
        let g = model.kde_gradient(&[x]);
        println!(
            "{x:>6.2} {:>10.6} {:>10.6} {:>10.6}",
            model.kde_value(&[x]),
            g.vector[0],
            model.f_check(&[x]),
        );
    }

    let x = [0.2];
    match model.kde_hessian(&x) {
        Ok(h) => println!("\nHessian at {:?}: {:.6}", x, h[(0, 0)]),
        Err(e) => println!("\nHessian at {x:?} unavailable: {e}"),
    }

    // the minorizer touches at its anchor and sits below everywhere else
    let anchor = [0.3];
    println!(
        "\nminorizer anchored at {anchor:?}: touch {} = {}",
        model.minorizer_value(&anchor, &anchor),
        model.kde_value(&anchor)
    );
    for x in [-0.5, 0.0, 0.8] {
        println!(
            "  at {x:>4.1}: minorizer {:.6} <= estimate {:.6}",
            model.minorizer_value(&[x], &anchor),
            model.kde_value(&[x])
        );
    }

    // higher derivatives of a Gaussian estimate come from the exact
    // polynomial identity; others fall back to finite differences
    let gauss = DensityModel::normalized(
        DataSet::from_1d(&[-1.0, 1.0])?,
        KernelSpec::gaussian(),
        1.0,
    )?;
    println!("\nGaussian pair at the flat mode:");
    for order in 1..=4 {
        println!(
            "  f^({order})(0) = {:+.8e}",
            gauss.kde_derivative_1d(order, 0.0)?
        );
    }
    Ok(())
}
