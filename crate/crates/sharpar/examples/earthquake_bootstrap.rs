//! Direct bootstrap linearity test on the earthquake counts. The series is
//! not bundled; drop it into data/earthquakes.csv to run this example.

use sharpar::prelude::*;

fn main() -> sharpar::Result<()> {
    let data = match bundled_dataset("earthquakes") {
        Ok(d) => d,
        Err(e @ Error::DatasetUnavailable { .. }) => {
            eprintln!("{e}");
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    let fit = fit_ar(&data.values, 1)?;
    println!(
        "AR(1): z_t = {:.4} + {:.4} z_(t-1) + e_t, Var(e) = {:.3}",
        fit.intercept, fit.coefficients[0], fit.noise_variance
    );
    for method in Method::ALL {
        let procedure = Procedure::local_linear(
            method,
            KernelFamily::Epanechnikov,
            BandwidthMode::RuleOfThumb,
        );
        let test = run_test(&data.values, BootMode::Direct, 1, &procedure, 101, 500, 0)?;
        println!(
            "{method}: {:.1}% of grid outside the bands",
            100.0 * test.report.fraction_outside
        );
        for r in &test.report.regions {
            println!("  exits on [{:.2}, {:.2}]", r.z_start, r.z_end);
        }
    }
    Ok(())
}
