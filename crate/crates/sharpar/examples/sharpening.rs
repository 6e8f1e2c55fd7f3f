//! Data sharpening: perturbed responses and the sharpened estimate, checked
//! against the "twice the fit minus the smoothed fit" form.

use sharpar::localreg::estimate_point;
use sharpar::prelude::*;

fn main() -> sharpar::Result<()> {
    let cfg = SimulationConfig::new(TrueFunction::Cos, 0.5, 200, 3)?;
    let series = simulate_replicate(&cfg, 0)?.series;
    let spec = EstimatorSpec::new(
        EstimatorKind::LocalConstant,
        KernelFamily::Epanechnikov,
        0.3,
    )?;

    let sharp = sharpen_responses(&series, &spec)?;
    let pairs = lag_pairs(&series);
    println!("first sharpened responses (z_t -> z*_t):");
    for (y, s) in pairs.responses.iter().zip(&sharp.values).take(5) {
        println!("  {y:>8.4} -> {s:>8.4}");
    }

    let fitted = fitted_values(&series, &spec)?;
    let smoothed_fit = pairs.with_responses(fitted)?;
    let grid = Grid::linspace(-0.6, 0.6, 7)?;
    let curve = sharpened_curve(&series, &grid, &spec)?;
    println!(
        "\n{:>6} {:>10} {:>10} {:>10}",
        "z", "sharp", "2g-Sg", "cos z"
    );
    for (z, v) in curve.iter() {
        let raw = estimate_point(&pairs, z, &spec)?;
        let twice = 2.0 * raw - estimate_point(&smoothed_fit, z, &spec)?;
        println!(
            "{z:>6.2} {:>10.5} {twice:>10.5} {:>10.5}",
            v.unwrap(),
            z.cos()
        );
    }
    Ok(())
}
