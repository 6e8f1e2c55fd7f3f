//! Monte Carlo bias of raw and sharpened local constant estimates, with the
//! sharpened bias split into the raw bias, the bias of the fitted values and
//! the serial-dependence term.

use sharpar::biasstudy::decomposition_study;
use sharpar::prelude::*;

fn main() -> sharpar::Result<()> {
    let mut cfg = study_preset("decomp-xsin", 100)?;
    cfg.replicates = 200;
    cfg.grid = Grid::linspace(-1.0, 1.0, 11)?;
    let d = decomposition_study(&cfg)?;

    println!(
        "{:>6} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "z", "B_raw", "B_ghat", "Err", "B_sharp", "raw-B-E"
    );
    let show = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
    for (i, z) in d.grid.points().iter().enumerate() {
        println!(
            "{z:>6.2} {:>9} {:>9} {:>9} {:>9} {:>9}",
            show(d.b_raw[i]),
            show(d.b_ghat[i]),
            show(d.err[i]),
            show(d.b_sharp[i]),
            show(d.combination[i])
        );
    }
    Ok(())
}
