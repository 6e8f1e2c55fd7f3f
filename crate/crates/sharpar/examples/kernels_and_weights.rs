//! Kernel constants and the equivalent-kernel weights of both smoothers.

use sharpar::prelude::*;

fn main() -> sharpar::Result<()> {
    println!(
        "{:<13} {:>10} {:>10} {:>8}",
        "kernel", "R(K)", "mu2(K)", "support"
    );
    for k in KernelFamily::ALL {
        let support = k
            .support_radius()
            .map_or("inf".to_string(), |r| format!("{r}"));
        println!(
            "{:<13} {:>10.6} {:>10.6} {:>8}",
            k.name(),
            k.roughness(),
            k.second_moment(),
            support
        );
    }

    let series = TimeSeries::new(vec![0.1, 0.5, -0.2, 0.3, 0.8, 0.4, -0.1, 0.2])?;
    let pairs = lag_pairs(&series);
    let z = 0.25;
    for kind in [EstimatorKind::LocalConstant, EstimatorKind::LocalLinear] {
        let spec = EstimatorSpec::new(kind, KernelFamily::Epanechnikov, 0.6)?;
        let w = weights(&pairs, z, &spec)?;
        let total: f64 = w.weights.iter().sum();
        let moment: f64 = w
            .weights
            .iter()
            .zip(&pairs.predictors)
            .map(|(a, x)| a * (x - z))
            .sum();
        println!("\n{kind} weights at z = {z}");
        for (x, a) in pairs.predictors.iter().zip(&w.weights) {
            println!("  z_prev = {x:>5.2}  A = {a:>9.5}");
        }
        println!("  sum A = {total:.12}, sum A (z_prev - z) = {moment:.3e}");
        println!("  estimate = {:.6}", w.apply(&pairs.responses));
    }
    Ok(())
}
