//! Bias and mean absolute error of raw, sharpened and bandwidth-regression
//! local linear estimates under rule-of-thumb bandwidths.

use sharpar::prelude::*;

fn main() -> sharpar::Result<()> {
    let mut cfg = study_preset("compare-xsin", 100)?;
    cfg.replicates = 100;
    cfg.grid = Grid::linspace(-0.5, 0.5, 5)?;
    let result = run_study(&cfg)?;

    for summary in &result.methods {
        println!("{}", summary.method);
        for (i, z) in cfg.grid.points().iter().enumerate() {
            let (b, m) = (summary.bias.values[i], summary.mae.values[i]);
            println!(
                "  z = {z:>5.2}  bias = {:>9}  mae = {:>8}",
                b.map_or("-".into(), |v| format!("{v:.4}")),
                m.map_or("-".into(), |v| format!("{v:.4}"))
            );
        }
    }
    Ok(())
}
