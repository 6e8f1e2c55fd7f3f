//! Linear AR(p) models with intercept: conditional least squares fitting,
//! residuals and simulation.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::localreg::TimeSeries;
use crate::simulate::standard_normal;

/// Burn-in used when simulating bootstrap series from a fitted model.
pub const BOOTSTRAP_BURN_IN: usize = 50;

/// `z_t = c + Σ_k φ_k z_{t-k} + ε_t`, `Var(ε_t) = noise_variance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearArFit {
    pub order: usize,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub noise_variance: f64,
    /// Number of equations in the regression (`n - p`).
    pub n_used: usize,
}

impl LinearArFit {
    pub fn new(coefficients: Vec<f64>, intercept: f64, noise_variance: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument("AR order must be at least 1".into()));
        }
        if !(noise_variance >= 0.0)
            || !intercept.is_finite()
            || coefficients.iter().any(|c| !c.is_finite())
        {
            return Err(Error::InvalidArgument(
                "AR parameters must be finite".into(),
            ));
        }
        Ok(LinearArFit {
            order: coefficients.len(),
            coefficients,
            intercept,
            noise_variance,
            n_used: 0,
        })
    }

    /// One-step conditional mean; the last element of `history` is the latest value.
    fn predict(&self, history: &[f64]) -> f64 {
        let t = history.len();
        self.intercept
            + self
                .coefficients
                .iter()
                .enumerate()
                .map(|(k, phi)| phi * history[t - 1 - k])
                .sum::<f64>()
    }

    /// Stationary mean `c / (1 - Σ φ_k)`.
    pub fn stationary_mean(&self) -> f64 {
        self.intercept / (1.0 - self.coefficients.iter().sum::<f64>())
    }
}

/// OLS of `z_t` on `(1, z_{t-1}, ..., z_{t-p})` for `t = p+1..n`.
pub fn fit_ar(series: &TimeSeries, p: usize) -> Result<LinearArFit> {
    if p == 0 {
        return Err(Error::InvalidArgument("AR order must be at least 1".into()));
    }
    let z = series.values();
    let n = z.len();
    let min = 2 * p + 3;
    if n < min {
        return Err(Error::SeriesTooShort { len: n, min });
    }
    let rows = n - p;
    let design = DMatrix::from_fn(rows, p + 1, |r, c| if c == 0 { 1.0 } else { z[p + r - c] });
    let fit = least_squares(&design, &z[p..])?;
    Ok(LinearArFit {
        order: p,
        intercept: fit.coefficients[0],
        coefficients: fit.coefficients[1..].to_vec(),
        noise_variance: fit.rss / (rows - (p + 1)) as f64,
        n_used: rows,
    })
}

/// `e_t = z_t - c - Σ φ_k z_{t-k}` for `t = p+1..n`.
pub fn residuals(fit: &LinearArFit, series: &TimeSeries) -> Result<Vec<f64>> {
    let z = series.values();
    if z.len() <= fit.order {
        return Err(Error::InvalidArgument(format!(
            "series of length {} is too short for an AR({}) model",
            z.len(),
            fit.order
        )));
    }
    Ok((fit.order..z.len())
        .map(|t| z[t] - fit.predict(&z[..t]))
        .collect())
}

/// Residuals as a series, for re-estimation of a lag-one structure.
pub fn residual_series(fit: &LinearArFit, series: &TimeSeries) -> Result<TimeSeries> {
    TimeSeries::new(residuals(fit, series)?)
}

/// Simulate `n` values from `fit`, starting from `init` (oldest first) and
/// discarding `burn_in` values.
pub fn simulate_ar<R: Rng + ?Sized>(
    fit: &LinearArFit,
    n: usize,
    rng: &mut R,
    init: &[f64],
    burn_in: usize,
) -> Result<TimeSeries> {
    if init.len() != fit.order {
        return Err(Error::InvalidArgument(format!(
            "AR({}) simulation needs {} initial values, got {}",
            fit.order,
            fit.order,
            init.len()
        )));
    }
    let sd = fit.noise_variance.sqrt();
    let mut history: Vec<f64> = init.to_vec();
    history.reserve(burn_in + n);
    for _ in 0..burn_in + n {
        let next = fit.predict(&history) + sd * standard_normal(rng);
        history.push(next);
    }
    TimeSeries::new(history.split_off(fit.order + burn_in))
}

/// Sample autocorrelations at lags `1..=max_lag`.
pub fn autocorrelations(series: &TimeSeries, max_lag: usize) -> Vec<f64> {
    let z = series.values();
    let n = z.len();
    let mean = z.iter().sum::<f64>() / n as f64;
    let c0: f64 = z.iter().map(|v| (v - mean).powi(2)).sum();
    (1..=max_lag.min(n - 1))
        .map(|k| {
            (k..n)
                .map(|t| (z[t] - mean) * (z[t - k] - mean))
                .sum::<f64>()
                / c0
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::replicate_stream;

    fn exact_ar1(n: usize) -> TimeSeries {
        let mut v = vec![4.0];
        for _ in 1..n {
            let last = *v.last().unwrap();
            v.push(1.0 + 0.5 * last);
        }
        TimeSeries::new(v).unwrap()
    }

    #[test]
    fn recovers_noise_free_ar1() {
        let s = exact_ar1(30);
        let fit = fit_ar(&s, 1).unwrap();
        assert!((fit.coefficients[0] - 0.5).abs() < 1e-8);
        assert!((fit.intercept - 1.0).abs() < 1e-8);
        assert!(fit.noise_variance < 1e-8);
        assert!(residuals(&fit, &s).unwrap().iter().all(|e| e.abs() < 1e-8));
    }

    #[test]
    fn residuals_satisfy_normal_equations() {
        let s = TimeSeries::new(vec![
            3.0, 5.0, 4.0, 6.0, 2.0, 7.0, 5.0, 4.0, 8.0, 3.0, 6.0, 5.0,
        ])
        .unwrap();
        for p in 1..=2 {
            let fit = fit_ar(&s, p).unwrap();
            let e = residuals(&fit, &s).unwrap();
            assert!(e.iter().sum::<f64>().abs() / (e.len() as f64) < 1e-10);
            for k in 1..=p {
                let dot: f64 = e
                    .iter()
                    .enumerate()
                    .map(|(i, r)| r * s.values()[p + i - k])
                    .sum();
                assert!(dot.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn degenerate_and_short_inputs() {
        let s = TimeSeries::new(vec![2.0; 10]).unwrap();
        assert!(matches!(fit_ar(&s, 1), Err(Error::DegenerateDesign(_))));
        let s = TimeSeries::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(fit_ar(&s, 1), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn zero_variance_simulation_is_deterministic_recursion() {
        let fit = LinearArFit::new(vec![0.5], 1.0, 0.0).unwrap();
        let s = simulate_ar(&fit, 5, &mut replicate_stream(0, 0), &[4.0], 0).unwrap();
        assert_eq!(s.values(), &[3.0, 2.5, 2.25, 2.125, 2.0625]);
    }

    #[test]
    fn seeded_simulation_is_reproducible() {
        let fit = LinearArFit::new(vec![1.3, -0.7], 13.8, 79.0).unwrap();
        let a = simulate_ar(&fit, 50, &mut replicate_stream(1, 2), &[30.0, 40.0], 50).unwrap();
        let b = simulate_ar(&fit, 50, &mut replicate_stream(1, 2), &[30.0, 40.0], 50).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn long_run_mean() {
        let fit = LinearArFit::new(vec![0.2692], 12.59, 16.56).unwrap();
        let n = 100_000;
        let s = simulate_ar(&fit, n, &mut replicate_stream(8, 0), &[17.0], 100).unwrap();
        let mean = s.values().iter().sum::<f64>() / n as f64;
        let target: f64 = 12.59 / (1.0 - 0.2692);
        assert!((target - 17.23).abs() < 0.01);
        // Long-run standard error of an AR(1) mean: σ / ((1 - φ) √n).
        let se = 16.56f64.sqrt() / ((1.0 - 0.2692) * (n as f64).sqrt());
        assert!((mean - target).abs() < 4.0 * se, "{mean} vs {target}");
    }

    #[test]
    fn refit_recovers_parameters() {
        let truth = LinearArFit::new(vec![0.6, -0.3], 2.0, 1.0).unwrap();
        let s = simulate_ar(
            &truth,
            10_000,
            &mut replicate_stream(99, 0),
            &[2.0, 2.0],
            200,
        )
        .unwrap();
        let fit = fit_ar(&s, 2).unwrap();
        // Asymptotic sd of each φ is about sqrt((1 - φ₂²)/n) ≈ 0.0095 here.
        for (est, tru) in fit.coefficients.iter().zip(&truth.coefficients) {
            assert!((est - tru).abs() < 4.0 * 0.0096);
        }
        assert!((fit.noise_variance - 1.0).abs() < 4.0 * (2.0f64 / 10_000.0).sqrt());
    }

    #[test]
    fn acf_of_alternating_series() {
        let s = TimeSeries::new(
            (0..20)
                .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
                .collect(),
        )
        .unwrap();
        let r = autocorrelations(&s, 2);
        assert!((r[0] + 19.0 / 20.0).abs() < 1e-12);
        assert!((r[1] - 18.0 / 20.0).abs() < 1e-12);
    }
}
