//! Raw local constant and local linear estimates of the autoregression
//! function on a simulated path, against the truth.

use sharpar::prelude::*;

fn main() -> sharpar::Result<()> {
    let g = TrueFunction::XSin;
    let cfg = SimulationConfig::new(g, 0.5, 400, 11)?;
    let series = simulate_replicate(&cfg, 0)?.series;
    let grid = Grid::linspace(-1.0, 1.0, 9)?;

    let lc = estimate_curve(
        &series,
        &grid,
        &EstimatorSpec::new(
            EstimatorKind::LocalConstant,
            KernelFamily::Epanechnikov,
            0.25,
        )?,
    )?;
    let ll = estimate_curve(
        &series,
        &grid,
        &EstimatorSpec::new(EstimatorKind::LocalLinear, KernelFamily::Epanechnikov, 0.25)?,
    )?;

    println!("{:>6} {:>9} {:>9} {:>9}", "z", "g(z)", "lc", "ll");
    for ((z, a), (_, b)) in lc.iter().zip(ll.iter()) {
        let show = |v: Option<f64>| v.map_or("undef".to_string(), |v| format!("{v:.4}"));
        println!("{z:>6.2} {:>9.4} {:>9} {:>9}", g.eval(z), show(a), show(b));
    }
    Ok(())
}
