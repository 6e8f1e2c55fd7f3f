//! Data sharpening for local autoregression.
//!
//! Responses are replaced by `z*_t = 2 z_t - ĝ(z_{t-1})` and re-smoothed
//! against the original lagged predictors with the same weights.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::localreg::{
    estimate_point, lag_pairs, map_grid, weights, CurveEstimate, EstimatorSpec, Grid, LagPairs,
    Method, TimeSeries,
};

/// Sharpened responses aligned with the lagged pairs (`t = 2..n`).
#[derive(Debug, Clone, PartialEq)]
pub struct SharpenedResponses {
    pub values: Vec<f64>,
}

/// `ĝ(z_{t-1})` for every pair, `None` where the estimate is undefined.
/// Fitting is leave-in: pair `t` contributes to its own fitted value.
pub(crate) fn fitted_values_partial(
    pairs: &LagPairs,
    spec: &EstimatorSpec,
) -> Result<Vec<Option<f64>>> {
    pairs
        .predictors
        .par_iter()
        .map(|&x| match estimate_point(pairs, x, spec) {
            Ok(v) => Ok(Some(v)),
            Err(e) if e.is_numerical() => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// `ĝ(z_{t-1})` for `t = 2..n`; fails if any fitted value is undefined.
pub fn fitted_values(series: &TimeSeries, spec: &EstimatorSpec) -> Result<Vec<f64>> {
    let pairs = lag_pairs(series);
    pairs
        .predictors
        .par_iter()
        .map(|&x| estimate_point(&pairs, x, spec))
        .collect()
}

pub fn sharpen_responses(series: &TimeSeries, spec: &EstimatorSpec) -> Result<SharpenedResponses> {
    let fitted = fitted_values(series, spec)?;
    let values = series.values()[1..]
        .iter()
        .zip(&fitted)
        .map(|(z, g)| 2.0 * z - g)
        .collect();
    Ok(SharpenedResponses { values })
}

pub(crate) fn sharpen_partial(pairs: &LagPairs, fitted: &[Option<f64>]) -> Vec<Option<f64>> {
    pairs
        .responses
        .iter()
        .zip(fitted)
        .map(|(z, g)| g.map(|g| 2.0 * z - g))
        .collect()
}

/// `Σ A_i(z) y_i`, undefined when any response carrying weight is undefined.
pub(crate) fn smooth_partial(
    pairs: &LagPairs,
    responses: &[Option<f64>],
    z: f64,
    spec: &EstimatorSpec,
) -> Result<f64> {
    let w = weights(pairs, z, spec)?;
    let mut acc = 0.0;
    for (a, y) in w.weights.iter().zip(responses) {
        if *a == 0.0 {
            continue;
        }
        match y {
            Some(y) => acc += a * y,
            None => {
                return Err(Error::DegenerateDesign(format!(
                    "sharpened response in the window of z = {z} is undefined"
                )))
            }
        }
    }
    Ok(acc)
}

/// `ĝ*(z) = Σ A_i(z) z*_i` over the grid.
///
/// A grid point is undefined when its own weights are undefined or when a
/// pair with nonzero weight has an undefined fitted value.
pub fn sharpened_curve(
    series: &TimeSeries,
    grid: &Grid,
    spec: &EstimatorSpec,
) -> Result<CurveEstimate> {
    let pairs = lag_pairs(series);
    let fitted = fitted_values_partial(&pairs, spec)?;
    let sharp = sharpen_partial(&pairs, &fitted);
    let estimates = map_grid(grid, |z| smooth_partial(&pairs, &sharp, z, spec))?;
    Ok(CurveEstimate {
        grid: grid.clone(),
        estimates,
        spec: *spec,
        method: Method::Sharpened,
    })
}
