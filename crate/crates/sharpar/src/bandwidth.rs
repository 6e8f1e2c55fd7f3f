//! Bandwidth selection.
//!
//! The data-driven rule is the Fan–Gijbels rule of thumb for local linear
//! smoothing: a global quartic pilot supplies the residual variance and the
//! curvature, and
//!
//! ```text
//! h = [ R(K) σ̂² (x_max - x_min) / ( μ₂(K)² Σ m̂''(x_i)² ) ]^(1/5)
//! ```
//!
//! Sharpened estimators may inflate this by `n^(4/45)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Bandwidth, KernelFamily};
use crate::linalg::least_squares;
use crate::localreg::{LagPairs, Method};

const PILOT_TERMS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotDiagnostics {
    /// Pilot residual variance `RSS / (N - 5)`.
    pub sigma2_hat: f64,
    /// `Σ m̂''(x_i)²` over the observed predictors.
    pub curvature_sum: f64,
    pub h: Bandwidth,
    /// The pilot had no curvature; `h` is `(x_max - x_min) / 4`.
    pub fallback: bool,
}

pub fn rule_of_thumb(pairs: &LagPairs, kernel: KernelFamily) -> Result<RotDiagnostics> {
    let n = pairs.len();
    if n < PILOT_TERMS + 1 {
        return Err(Error::SeriesTooShort {
            len: n + 1,
            min: PILOT_TERMS + 2,
        });
    }
    let xs = &pairs.predictors;
    let ys = &pairs.responses;
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let range = hi - lo;
    if !(range > 0.0) {
        return Err(Error::DegenerateDesign("predictors have zero range".into()));
    }

    // Fit in u = (x - centre) / half so the quartic design stays well conditioned.
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * range;
    let us: Vec<f64> = xs.iter().map(|x| (x - centre) / half).collect();
    let design = DMatrix::from_fn(n, PILOT_TERMS, |i, j| us[i].powi(j as i32));
    let fit = least_squares(&design, ys)?;
    let b = &fit.coefficients;
    let sigma2_hat = fit.rss / (n - PILOT_TERMS) as f64;

    let curvature_sum: f64 = us
        .iter()
        .map(|u| {
            let d2 = (2.0 * b[2] + 6.0 * b[3] * u + 12.0 * b[4] * u * u) / (half * half);
            d2 * d2
        })
        .sum();

    let y_mean = ys.iter().sum::<f64>() / n as f64;
    let y_spread = ys.iter().map(|y| (y - y_mean).abs()).fold(0.0, f64::max);
    let flat = 1e-10 * y_spread / (range * range);
    if curvature_sum <= n as f64 * flat * flat {
        return Ok(RotDiagnostics {
            sigma2_hat,
            curvature_sum,
            h: Bandwidth::new(range / 4.0)?,
            fallback: true,
        });
    }
    if !(sigma2_hat > 0.0) {
        return Err(Error::DegenerateDesign(
            "quartic pilot fits the data exactly; residual variance is zero".into(),
        ));
    }
    let mu2 = kernel.second_moment();
    let h = (kernel.roughness() * sigma2_hat * range / (mu2 * mu2 * curvature_sum)).powf(0.2);
    Ok(RotDiagnostics {
        sigma2_hat,
        curvature_sum,
        h: Bandwidth::new(h)?,
        fallback: false,
    })
}

/// `h · n^(4/45)`.
pub fn sharpen_adjust(h: Bandwidth, n: usize) -> Result<Bandwidth> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sample size must be positive".into(),
        ));
    }
    Bandwidth::new(h.get() * (n as f64).powf(4.0 / 45.0))
}

/// Fixed bandwidths of the bias-decomposition design.
pub fn fixed_bandwidth_preset(n: usize) -> Result<Bandwidth> {
    let h = match n {
        50 => 0.3,
        100 => 0.25,
        200 => 0.2,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "no fixed bandwidth preset for n = {n}; expected 50, 100 or 200"
            )))
        }
    };
    Bandwidth::new(h)
}

/// How each estimation method gets its bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthMode {
    /// Same bandwidth for every method.
    Fixed(Bandwidth),
    /// Rule of thumb on the series at hand, for every method.
    RuleOfThumb,
    /// Rule of thumb for raw and ladder methods; the sharpened estimator uses
    /// it inflated by `n^(4/45)`.
    RuleOfThumbSharpAdjusted,
}

impl BandwidthMode {
    /// Resolve the bandwidth for `method` on a series with the given pairs
    /// (`n` is the series length).
    pub fn resolve(
        &self,
        method: Method,
        pairs: &LagPairs,
        kernel: KernelFamily,
    ) -> Result<Bandwidth> {
        match *self {
            BandwidthMode::Fixed(h) => Ok(h),
            BandwidthMode::RuleOfThumb => Ok(rule_of_thumb(pairs, kernel)?.h),
            BandwidthMode::RuleOfThumbSharpAdjusted => {
                let h = rule_of_thumb(pairs, kernel)?.h;
                if method == Method::Sharpened {
                    sharpen_adjust(h, pairs.len() + 1)
                } else {
                    Ok(h)
                }
            }
        }
    }
}

impl fmt::Display for BandwidthMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandwidthMode::Fixed(h) => write!(f, "{h}"),
            BandwidthMode::RuleOfThumb => f.write_str("auto"),
            BandwidthMode::RuleOfThumbSharpAdjusted => f.write_str("auto-sharp"),
        }
    }
}

impl FromStr for BandwidthMode {
    type Err = Error;

    /// `auto`, `auto-sharp`, or a positive number.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(BandwidthMode::RuleOfThumb),
            "auto-sharp" => Ok(BandwidthMode::RuleOfThumbSharpAdjusted),
            other => {
                let h: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("invalid bandwidth `{other}`")))?;
                Ok(BandwidthMode::Fixed(Bandwidth::new(h)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Pilot quartic solved by Gaussian elimination on the normal equations in
    // the raw predictor, then the plug-in formula evaluated directly.
    fn rot_oracle(xs: &[f64], ys: &[f64], kernel: KernelFamily) -> f64 {
        let n = xs.len();
        let mut a = [[0.0f64; 6]; 5];
        for (x, y) in xs.iter().zip(ys) {
            let p: Vec<f64> = (0..5).map(|k| x.powi(k)).collect();
            for r in 0..5 {
                for c in 0..5 {
                    a[r][c] += p[r] * p[c];
                }
                a[r][5] += p[r] * y;
            }
        }
        for col in 0..5 {
            let piv = (col..5)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, piv);
            for r in 0..5 {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    let pivot_row = a[col];
                    for (x, p) in a[r].iter_mut().zip(pivot_row).skip(col) {
                        *x -= f * p;
                    }
                }
            }
        }
        let b: Vec<f64> = (0..5).map(|k| a[k][5] / a[k][k]).collect();
        let fitted = |x: f64| (0..5).map(|k| b[k] * x.powi(k as i32)).sum::<f64>();
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - fitted(*x)).powi(2))
            .sum();
        let sigma2 = rss / (n - 5) as f64;
        let curv: f64 = xs
            .iter()
            .map(|x| (2.0 * b[2] + 6.0 * b[3] * x + 12.0 * b[4] * x * x).powi(2))
            .sum();
        let range = xs.iter().cloned().fold(f64::MIN, f64::max)
            - xs.iter().cloned().fold(f64::MAX, f64::min);
        (kernel.roughness() * sigma2 * range / (kernel.second_moment().powi(2) * curv)).powf(0.2)
    }

    fn perturbed_quartic(scale: f64) -> LagPairs {
        let xs: Vec<f64> = (0..40).map(|i| scale * (-1.0 + i as f64 * 0.05)).collect();
        let ys = xs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let u = x / scale;
                0.5 - u + 1.5 * u * u + 0.3 * u.powi(3) - 0.8 * u.powi(4)
                    + 0.05 * (((i * 37) % 11) as f64 - 5.0)
            })
            .collect();
        LagPairs {
            predictors: xs,
            responses: ys,
        }
    }

    #[test]
    fn matches_plug_in_oracle() {
        let pairs = perturbed_quartic(1.0);
        for kernel in KernelFamily::ALL {
            let d = rule_of_thumb(&pairs, kernel).unwrap();
            let expected = rot_oracle(&pairs.predictors, &pairs.responses, kernel);
            assert!(!d.fallback);
            assert!((d.h.get() - expected).abs() < 1e-9 * expected, "{kernel}");
        }
    }

    #[test]
    fn scales_with_predictors() {
        let a = rule_of_thumb(&perturbed_quartic(1.0), KernelFamily::Epanechnikov).unwrap();
        let b = rule_of_thumb(&perturbed_quartic(2.0), KernelFamily::Epanechnikov).unwrap();
        assert!((b.h.get() / a.h.get() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn straight_line_falls_back() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let ys = xs.iter().map(|x| 1.0 + 2.0 * x).collect();
        let d = rule_of_thumb(
            &LagPairs {
                predictors: xs,
                responses: ys,
            },
            KernelFamily::Gaussian,
        )
        .unwrap();
        assert!(d.fallback);
        assert!((d.h.get() - 1.9 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn needs_six_pairs() {
        let p = LagPairs {
            predictors: vec![0.0, 1.0, 2.0, 3.0, 4.0],
            responses: vec![1.0, 0.0, 2.0, 1.0, 3.0],
        };
        assert!(rule_of_thumb(&p, KernelFamily::Gaussian).is_err());
    }

    #[test]
    fn inflation_factor() {
        let h = Bandwidth::new(0.2).unwrap();
        assert_eq!(sharpen_adjust(h, 1).unwrap(), h);
        let expected = 0.2 * 100f64.powf(4.0 / 45.0);
        assert!((sharpen_adjust(h, 100).unwrap().get() - expected).abs() < 1e-15);
        assert!((100f64.powf(4.0 / 45.0) - 1.5058).abs() < 1e-4);
        let mut last = 0.0;
        for n in 1..500 {
            let v = sharpen_adjust(h, n).unwrap().get();
            assert!(v >= last);
            last = v;
        }
        // Pure multiplicative factor.
        let h2 = Bandwidth::new(0.7).unwrap();
        let r1 = sharpen_adjust(h, 73).unwrap().get() / 0.2;
        let r2 = sharpen_adjust(h2, 73).unwrap().get() / 0.7;
        assert!((r1 - r2).abs() < 1e-14);
    }

    #[test]
    fn presets() {
        assert_eq!(fixed_bandwidth_preset(50).unwrap().get(), 0.3);
        assert_eq!(fixed_bandwidth_preset(100).unwrap().get(), 0.25);
        assert_eq!(fixed_bandwidth_preset(200).unwrap().get(), 0.2);
        assert!(fixed_bandwidth_preset(75).is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!(
            "auto".parse::<BandwidthMode>().unwrap(),
            BandwidthMode::RuleOfThumb
        );
        assert_eq!(
            "auto-sharp".parse::<BandwidthMode>().unwrap(),
            BandwidthMode::RuleOfThumbSharpAdjusted
        );
        assert!(
            matches!("0.4".parse::<BandwidthMode>().unwrap(), BandwidthMode::Fixed(h) if h.get() == 0.4)
        );
        assert!("-1".parse::<BandwidthMode>().is_err());
    }
}
