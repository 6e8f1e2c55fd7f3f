//! Plug-in bandwidth from a global quartic pilot, and the inflated bandwidth
//! used for sharpened estimates.

use sharpar::prelude::*;

fn main() -> sharpar::Result<()> {
    for n in [50, 100, 200, 400] {
        let cfg = SimulationConfig::new(TrueFunction::Sin, 0.5, n, 1)?;
        let series = simulate_replicate(&cfg, 0)?.series;
        let rot = rule_of_thumb(&lag_pairs(&series), KernelFamily::Epanechnikov)?;
        let sharp = sharpen_adjust(rot.h, n)?;
        println!(
            "n = {n:>3}: sigma^2 = {:.4}, curvature = {:.4e}, h = {:.4}, sharpened h = {:.4}{}",
            rot.sigma2_hat,
            rot.curvature_sum,
            rot.h.get(),
            sharp.get(),
            if rot.fallback { " (fallback)" } else { "" }
        );
    }
    for n in [50, 100, 200] {
        println!(
            "fixed preset for n = {n}: h = {}",
            fixed_bandwidth_preset(n)?.get()
        );
    }
    Ok(())
}
