//! Bias reduction by regression on squared bandwidth.
//!
//! The local linear estimate is computed on a ladder of bandwidths
//! `h_j = (1 + (j-1)/10) h`, regressed on `h_j²`, and the intercept is
//! reported as the bias-reduced estimate.

use crate::error::{Error, Result};
use crate::kernels::{Bandwidth, KernelFamily};
use crate::localreg::{
    estimate_point, lag_pairs, map_grid, CurveEstimate, EstimatorKind, EstimatorSpec, Grid,
    LagPairs, Method, TimeSeries,
};

pub const DEFAULT_LADDER_LEN: usize = 11;

/// Strictly increasing positive bandwidths, at least three of them.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthSequence(Vec<f64>);

impl BandwidthSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "bandwidth sequence needs at least 3 values, got {}",
                values.len()
            )));
        }
        for &h in &values {
            Bandwidth::new(h)?;
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "bandwidth sequence must be strictly increasing".into(),
            ));
        }
        Ok(BandwidthSequence(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

pub fn bandwidth_sequence(h: Bandwidth, m: usize) -> Result<BandwidthSequence> {
    BandwidthSequence::new((0..m).map(|j| (1.0 + j as f64 / 10.0) * h.get()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H2RegressionFit {
    pub beta0: f64,
    pub beta1: f64,
}

/// OLS of `ys` on `h²` with intercept.
pub fn fit_h2_regression(hs: &[f64], ys: &[f64]) -> Result<H2RegressionFit> {
    if hs.len() != ys.len() {
        return Err(Error::InvalidArgument(format!(
            "{} bandwidths but {} responses",
            hs.len(),
            ys.len()
        )));
    }
    let n = hs.len() as f64;
    let xs: Vec<f64> = hs.iter().map(|h| h * h).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if !(sxx > f64::EPSILON * x_mean * x_mean * n) {
        return Err(Error::DegenerateDesign(
            "all squared bandwidths are equal".into(),
        ));
    }
    let beta1 = sxy / sxx;
    Ok(H2RegressionFit {
        beta0: y_mean - beta1 * x_mean,
        beta1,
    })
}

pub(crate) fn cheng_point(
    pairs: &LagPairs,
    z: f64,
    ladder: &BandwidthSequence,
    kernel: KernelFamily,
) -> Result<f64> {
    let ys = ladder
        .values()
        .iter()
        .map(|&h| {
            let spec = EstimatorSpec {
                kind: EstimatorKind::LocalLinear,
                kernel,
                h: Bandwidth::new(h)?,
            };
            estimate_point(pairs, z, &spec)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(fit_h2_regression(ladder.values(), &ys)?.beta0)
}

/// Bias-reduced local linear curve. A grid point is undefined if any rung of
/// the ladder is undefined there.
pub fn cheng_curve(
    series: &TimeSeries,
    grid: &Grid,
    base_h: Bandwidth,
    kernel: KernelFamily,
    m: usize,
) -> Result<CurveEstimate> {
    let ladder = bandwidth_sequence(base_h, m)?;
    let pairs = lag_pairs(series);
    let estimates = map_grid(grid, |z| cheng_point(&pairs, z, &ladder, kernel))?;
    Ok(CurveEstimate {
        grid: grid.clone(),
        estimates,
        spec: EstimatorSpec {
            kind: EstimatorKind::LocalLinear,
            kernel,
            h: base_h,
        },
        method: Method::Cheng,
    })
}

/// Same as [`cheng_curve`], but refuses anything other than local linear.
pub fn cheng_curve_for(
    series: &TimeSeries,
    grid: &Grid,
    spec: &EstimatorSpec,
    m: usize,
) -> Result<CurveEstimate> {
    if spec.kind != EstimatorKind::LocalLinear {
        return Err(Error::InvalidArgument(
            "bandwidth-regression bias reduction applies to local linear only".into(),
        ));
    }
    cheng_curve(series, grid, spec.h, spec.kernel, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bw(h: f64) -> Bandwidth {
        Bandwidth::new(h).unwrap()
    }

    // Closed-form OLS from the 2x2 normal equations in (beta0, beta1).
    fn ols_oracle(x: &[f64], y: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let sx: f64 = x.iter().sum();
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let sy: f64 = y.iter().sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let det = n * sxx - sx * sx;
        ((sxx * sy - sx * sxy) / det, (n * sxy - sx * sy) / det)
    }

    #[test]
    fn ladder_values() {
        let s = bandwidth_sequence(bw(0.2), 11).unwrap();
        let expected = [
            0.20, 0.22, 0.24, 0.26, 0.28, 0.30, 0.32, 0.34, 0.36, 0.38, 0.40,
        ];
        for (a, b) in s.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let s = bandwidth_sequence(bw(1.0), 3).unwrap();
        assert_eq!(s.values(), &[1.0, 1.1, 1.2]);
        let s = bandwidth_sequence(bw(0.5), 11).unwrap();
        assert_eq!(*s.values().last().unwrap(), 1.0);
        assert!(bandwidth_sequence(bw(0.5), 2).is_err());
    }

    #[test]
    fn regression_cases() {
        let hs = bandwidth_sequence(bw(0.3), 11).unwrap();
        let hs = hs.values();
        let fit = fit_h2_regression(hs, &[2.5; 11]).unwrap();
        assert!((fit.beta0 - 2.5).abs() < 1e-12 && fit.beta1.abs() < 1e-10);

        let ys: Vec<f64> = hs.iter().map(|h| -0.4 + 3.0 * h * h).collect();
        let fit = fit_h2_regression(hs, &ys).unwrap();
        assert!((fit.beta0 + 0.4).abs() < 1e-10 && (fit.beta1 - 3.0).abs() < 1e-10);

        let noisy: Vec<f64> = ys
            .iter()
            .enumerate()
            .map(|(i, y)| y + 0.01 * ((i * 7 % 5) as f64 - 2.0))
            .collect();
        let x2: Vec<f64> = hs.iter().map(|h| h * h).collect();
        let (b0, b1) = ols_oracle(&x2, &noisy);
        let fit = fit_h2_regression(hs, &noisy).unwrap();
        assert!((fit.beta0 - b0).abs() < 1e-10 && (fit.beta1 - b1).abs() < 1e-10);

        assert!(fit_h2_regression(&[0.5, 0.5, 0.5], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_h2_regression(&[0.5, 0.6], &[1.0]).is_err());
    }

    #[test]
    fn intercept_invariant_to_bandwidth_units() {
        let hs = [0.2, 0.25, 0.33, 0.4, 0.52];
        let ys = [1.0, 1.3, 0.9, 1.7, 2.2];
        let c = 3.7;
        let scaled: Vec<f64> = hs.iter().map(|h| c * h).collect();
        let a = fit_h2_regression(&hs, &ys).unwrap();
        let b = fit_h2_regression(&scaled, &ys).unwrap();
        assert!((a.beta0 - b.beta0).abs() < 1e-10);
        assert!((a.beta1 - b.beta1 * c * c).abs() < 1e-8);
    }

    #[test]
    fn linear_and_constant_series() {
        let mut v = vec![1.0];
        for _ in 0..30 {
            let last = *v.last().unwrap();
            v.push(0.2 + 0.5 * last);
        }
        // Perturb the start so the predictors are not all near the fixed point.
        let s = TimeSeries::new(v).unwrap();
        let grid = Grid::linspace(0.45, 0.9, 7).unwrap();
        let c = cheng_curve(&s, &grid, bw(0.3), KernelFamily::Gaussian, 11).unwrap();
        for (z, g) in c.iter() {
            assert!((g.unwrap() - (0.2 + 0.5 * z)).abs() < 1e-8);
        }

        let s = TimeSeries::new(vec![3.0; 10]).unwrap();
        let c = cheng_curve(
            &s,
            &Grid::new(vec![3.0]).unwrap(),
            bw(0.3),
            KernelFamily::Gaussian,
            11,
        )
        .unwrap();
        // All predictors equal: local linear is singular at every rung.
        assert!(c.estimates[0].is_none());
    }

    #[test]
    fn rejects_local_constant() {
        let s = TimeSeries::new(vec![0.1, 0.2, 0.3, 0.1]).unwrap();
        let sp =
            EstimatorSpec::new(EstimatorKind::LocalConstant, KernelFamily::Gaussian, 0.5).unwrap();
        assert!(cheng_curve_for(&s, &Grid::new(vec![0.2]).unwrap(), &sp, 11).is_err());
    }
}
