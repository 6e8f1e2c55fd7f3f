//! Monte Carlo trends at the study presets.

use sharpar::prelude::*;

fn mean_abs_bias(result: &StudyResult, method: Method, keep: impl Fn(f64) -> bool) -> f64 {
    let bias = &result.method(method).unwrap().bias;
    let vals: Vec<f64> = bias
        .grid
        .points()
        .iter()
        .zip(&bias.values)
        .filter(|(z, _)| keep(**z))
        .map(|(_, v)| v.unwrap().abs())
        .collect();
    vals.iter().sum::<f64>() / vals.len() as f64
}

/// The interior bias is about 0.01, close to the standard error of a
/// 500-replicate average, so this comparison uses 10000 replicates.
#[test]
fn larger_sample_with_smaller_preset_bandwidth_lowers_interior_bias() {
    let interior = |z: f64| z.abs() <= 0.5 + 1e-12;
    let run = |n| {
        let mut cfg = study_preset("decomp-xsin", n).unwrap();
        cfg.replicates = 10_000;
        run_study(&cfg).unwrap()
    };
    let (small, large) = (run(100), run(200));
    assert_eq!(
        small.config.bandwidth,
        BandwidthMode::Fixed(Bandwidth::new(0.25).unwrap())
    );
    assert_eq!(
        large.config.bandwidth,
        BandwidthMode::Fixed(Bandwidth::new(0.2).unwrap())
    );
    let (b100, b200) = (
        mean_abs_bias(&small, Method::Raw, interior),
        mean_abs_bias(&large, Method::Raw, interior),
    );
    assert!(
        b200 < b100,
        "n = 200 bias {b200} not below n = 100 bias {b100}"
    );
}

#[test]
fn sharpened_mae_tracks_raw_mae_in_the_interior() {
    let cfg = study_preset("compare-xsin", 100).unwrap();
    let result = run_study(&cfg).unwrap();
    let raw = &result.method(Method::Raw).unwrap().mae;
    let sharp = &result.method(Method::Sharpened).unwrap().mae;
    for i in 1..cfg.grid.len() - 1 {
        let (r, s) = (raw.values[i].unwrap(), sharp.values[i].unwrap());
        assert!(
            s <= 1.2 * r,
            "z = {}: sharpened MAE {s} vs raw {r}",
            cfg.grid.points()[i]
        );
    }
}

#[test]
fn decomposition_recombines_to_sharpened_bias() {
    let mut cfg = study_preset("decomp-cos", 100).unwrap();
    cfg.replicates = 100;
    let result = run_study(&cfg).unwrap();
    let d = result.decomposition.as_ref().unwrap();
    let sharp = &result.method(Method::Sharpened).unwrap().bias;
    for i in 0..cfg.grid.len() {
        if let (Some(c), Some(b)) = (d.combination[i], d.b_sharp[i]) {
            assert!((c - b).abs() < 1e-10);
        }
        if d.defined_count[i] == cfg.replicates {
            assert!((d.b_sharp[i].unwrap() - sharp.values[i].unwrap()).abs() < 1e-10);
        }
    }
}
