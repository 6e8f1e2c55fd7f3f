//! Bandwidth-regression bias reduction: local linear estimates on a ladder of
//! bandwidths, regressed on h², extrapolated to h = 0.

use sharpar::localreg::estimate_point;
use sharpar::prelude::*;

fn main() -> sharpar::Result<()> {
    let g = TrueFunction::XCos;
    let cfg = SimulationConfig::new(g, 0.5, 300, 5)?;
    let series = simulate_replicate(&cfg, 0)?.series;
    let pairs = lag_pairs(&series);
    let h = Bandwidth::new(0.3)?;
    let ladder = bandwidth_sequence(h, 11)?;

    let z = 0.4;
    let ys: Vec<f64> = ladder
        .values()
        .iter()
        .map(|&hj| {
            estimate_point(
                &pairs,
                z,
                &EstimatorSpec::new(EstimatorKind::LocalLinear, KernelFamily::Epanechnikov, hj)?,
            )
        })
        .collect::<sharpar::Result<_>>()?;
    println!("ladder at z = {z}:");
    for (hj, y) in ladder.values().iter().zip(&ys) {
        println!("  h = {hj:.3}  estimate = {y:.5}");
    }
    let fit = fit_h2_regression(ladder.values(), &ys)?;
    println!(
        "intercept {:.5}, slope on h^2 {:.5}, truth {:.5}",
        fit.beta0,
        fit.beta1,
        g.eval(z)
    );

    let grid = Grid::linspace(-0.5, 0.5, 5)?;
    let curve = cheng_curve(&series, &grid, h, KernelFamily::Epanechnikov, 11)?;
    for (z, v) in curve.iter() {
        println!(
            "  z = {z:>5.2}  cheng = {:>8.5}  g = {:>8.5}",
            v.unwrap(),
            g.eval(z)
        );
    }
    Ok(())
}
