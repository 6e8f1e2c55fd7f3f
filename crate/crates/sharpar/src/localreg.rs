//! Local constant and local linear autoregression.
//!
//! Both estimators are linear in the responses: `ĝ(z) = Σ A_i(z) z_i` where the
//! sum runs over lagged pairs `(z_{i-1}, z_i)`. [`weights`] exposes `A(z)`
//! directly; the sharpening and bias-decomposition code is built on it.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Bandwidth, KernelFamily};

/// Default number of evaluation points for curves over the data range.
pub const DEFAULT_GRID_POINTS: usize = 401;

/// An observed or simulated series `z_1..z_n`, `n >= 3`, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries(Vec<f64>);

impl TimeSeries {
    pub const MIN_LEN: usize = 3;

    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < Self::MIN_LEN {
            return Err(Error::SeriesTooShort {
                len: values.len(),
                min: Self::MIN_LEN,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(TimeSeries(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `(min, max)` of the values.
    pub fn range(&self) -> (f64, f64) {
        self.0
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<TimeSeries> {
        TimeSeries::new(self.0.iter().map(|&v| f(v)).collect())
    }
}

/// Lagged (predictor, response) pairs `(z_{i-1}, z_i)`, `i = 2..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagPairs {
    pub predictors: Vec<f64>,
    pub responses: Vec<f64>,
}

impl LagPairs {
    pub fn len(&self) -> usize {
        self.predictors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictors.is_empty()
    }

    /// Same predictors, different responses.
    pub fn with_responses(&self, responses: Vec<f64>) -> Result<LagPairs> {
        if responses.len() != self.predictors.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} responses, got {}",
                self.predictors.len(),
                responses.len()
            )));
        }
        Ok(LagPairs {
            predictors: self.predictors.clone(),
            responses,
        })
    }
}

pub fn lag_pairs(series: &TimeSeries) -> LagPairs {
    let v = series.values();
    LagPairs {
        predictors: v[..v.len() - 1].to_vec(),
        responses: v[1..].to_vec(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    LocalConstant,
    LocalLinear,
}

impl EstimatorKind {
    pub fn short_name(self) -> &'static str {
        match self {
            EstimatorKind::LocalConstant => "lc",
            EstimatorKind::LocalLinear => "ll",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lc" | "local-constant" | "local_constant" => Ok(EstimatorKind::LocalConstant),
            "ll" | "local-linear" | "local_linear" => Ok(EstimatorKind::LocalLinear),
            other => Err(Error::InvalidArgument(format!(
                "unknown estimator kind `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    pub kernel: KernelFamily,
    pub h: Bandwidth,
}

impl EstimatorSpec {
    pub fn new(kind: EstimatorKind, kernel: KernelFamily, h: f64) -> Result<Self> {
        Ok(EstimatorSpec {
            kind,
            kernel,
            h: Bandwidth::new(h)?,
        })
    }

    pub fn with_bandwidth(self, h: Bandwidth) -> Self {
        EstimatorSpec { h, ..self }
    }
}

/// `A_h(z_{i-1} - z)` for every pair, at one evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub evaluation_point: f64,
}

impl WeightVector {
    pub fn apply(&self, responses: &[f64]) -> f64 {
        self.weights.iter().zip(responses).map(|(a, y)| a * y).sum()
    }
}

/// Kernel weights and the local moments `S_k = Σ K_i (z_{i-1} - z)^k`.
struct LocalMoments {
    kernel_weights: Vec<f64>,
    s0: f64,
    s1: f64,
    s2: f64,
}

fn local_moments(predictors: &[f64], z: f64, spec: &EstimatorSpec) -> Result<LocalMoments> {
    let mut kernel_weights = Vec::with_capacity(predictors.len());
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for &x in predictors {
        let d = x - z;
        let k = spec.kernel.scaled(spec.h, d);
        kernel_weights.push(k);
        s0 += k;
        s1 += k * d;
        s2 += k * d * d;
    }
    if !(s0 > 0.0) {
        return Err(Error::NoLocalData { z });
    }
    Ok(LocalMoments {
        kernel_weights,
        s0,
        s1,
        s2,
    })
}

fn linear_denominator(m: &LocalMoments, z: f64) -> Result<f64> {
    let denom = m.s0 * m.s2 - m.s1 * m.s1;
    if denom.abs() < 1e-12 * (m.s0 * m.s2).max(1.0) {
        return Err(Error::DegenerateDesign(format!(
            "local linear design is singular at z = {z}"
        )));
    }
    Ok(denom)
}

/// Weight vector `A(z)` such that `ĝ(z) = Σ A_i z_i`.
pub fn weights(pairs: &LagPairs, z: f64, spec: &EstimatorSpec) -> Result<WeightVector> {
    let m = local_moments(&pairs.predictors, z, spec)?;
    let weights = match spec.kind {
        EstimatorKind::LocalConstant => m.kernel_weights.iter().map(|k| k / m.s0).collect(),
        EstimatorKind::LocalLinear => {
            let denom = linear_denominator(&m, z)?;
            m.kernel_weights
                .iter()
                .zip(&pairs.predictors)
                .map(|(k, x)| k * (m.s2 - (x - z) * m.s1) / denom)
                .collect()
        }
    };
    Ok(WeightVector {
        weights,
        evaluation_point: z,
    })
}

/// `ĝ(z)` by the ratio formulas.
pub fn estimate_point(pairs: &LagPairs, z: f64, spec: &EstimatorSpec) -> Result<f64> {
    let m = local_moments(&pairs.predictors, z, spec)?;
    let mut t0 = 0.0;
    let mut t1 = 0.0;
    for ((k, x), y) in m
        .kernel_weights
        .iter()
        .zip(&pairs.predictors)
        .zip(&pairs.responses)
    {
        t0 += k * y;
        t1 += k * (x - z) * y;
    }
    match spec.kind {
        EstimatorKind::LocalConstant => Ok(t0 / m.s0),
        EstimatorKind::LocalLinear => {
            let denom = linear_denominator(&m, z)?;
            Ok((t0 * m.s2 - m.s1 * t1) / denom)
        }
    }
}

/// Strictly increasing, finite, nonempty list of evaluation points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::UnorderedGrid);
        }
        Ok(Grid(points))
    }

    /// `n` equally spaced points from `lo` to `hi` inclusive.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Self> {
        match n {
            0 => Err(Error::EmptyGrid),
            1 => Grid::new(vec![lo]),
            _ => {
                let step = (hi - lo) / (n - 1) as f64;
                let mut pts: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
                pts[n - 1] = hi;
                Grid::new(pts)
            }
        }
    }

    /// `n` points spanning the observed range of the series.
    pub fn over_range(series: &TimeSeries, n: usize) -> Result<Self> {
        let (lo, hi) = series.range();
        Grid::linspace(lo, hi, n)
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for Grid {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Grid::new(v)
    }
}

impl From<Grid> for Vec<f64> {
    fn from(g: Grid) -> Vec<f64> {
        g.0
    }
}

/// Which estimator produced a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Raw,
    Sharpened,
    Cheng,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Raw, Method::Sharpened, Method::Cheng];

    pub fn name(self) -> &'static str {
        match self {
            Method::Raw => "raw",
            Method::Sharpened => "sharp",
            Method::Cheng => "cheng",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Method::Raw),
            "sharp" | "sharpened" => Ok(Method::Sharpened),
            "cheng" => Ok(Method::Cheng),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// Estimates over a grid. `None` marks points where the estimator was
/// undefined (no local data or a singular local design).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveEstimate {
    pub grid: Grid,
    pub estimates: Vec<Option<f64>>,
    pub spec: EstimatorSpec,
    pub method: Method,
}

impl CurveEstimate {
    pub fn undefined_positions(&self) -> Vec<usize> {
        self.estimates
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.is_none().then_some(i))
            .collect()
    }

    pub fn defined_count(&self) -> usize {
        self.estimates.iter().filter(|e| e.is_some()).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Option<f64>)> + '_ {
        self.grid
            .points()
            .iter()
            .copied()
            .zip(self.estimates.iter().copied())
    }
}

/// Evaluate `f` at every grid point in parallel, keeping grid order.
/// Numerical failures become `None`; anything else is propagated.
pub(crate) fn map_grid(
    grid: &Grid,
    f: impl Fn(f64) -> Result<f64> + Sync,
) -> Result<Vec<Option<f64>>> {
    grid.points()
        .par_iter()
        .map(|&z| match f(z) {
            Ok(v) => Ok(Some(v)),
            Err(e) if e.is_numerical() => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

pub fn estimate_curve(
    series: &TimeSeries,
    grid: &Grid,
    spec: &EstimatorSpec,
) -> Result<CurveEstimate> {
    let pairs = lag_pairs(series);
    let estimates = map_grid(grid, |z| estimate_point(&pairs, z, spec))?;
    Ok(CurveEstimate {
        grid: grid.clone(),
        estimates,
        spec: *spec,
        method: Method::Raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: EstimatorKind, kernel: KernelFamily, h: f64) -> EstimatorSpec {
        EstimatorSpec::new(kind, kernel, h).unwrap()
    }

    fn series(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    // Kernel-weighted least squares line through the pairs, solved from the
    // explicit 2x2 normal equations in (intercept at z, slope).
    fn wls_line(pairs: &LagPairs, z: f64, kernel: KernelFamily, h: f64) -> (f64, Vec<f64>) {
        let k: Vec<f64> = pairs
            .predictors
            .iter()
            .map(|x| kernel.value((x - z) / h) / h)
            .collect();
        let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((w, x), y) in k.iter().zip(&pairs.predictors).zip(&pairs.responses) {
            let d = x - z;
            a11 += w;
            a12 += w * d;
            a22 += w * d * d;
            b1 += w * y;
            b2 += w * d * y;
        }
        let det = a11 * a22 - a12 * a12;
        let intercept = (a22 * b1 - a12 * b2) / det;
        // Row of the hat matrix for the intercept: e1' (X'WX)^{-1} X'W.
        let row = k
            .iter()
            .zip(&pairs.predictors)
            .map(|(w, x)| (a22 - a12 * (x - z)) * w / det)
            .collect();
        (intercept, row)
    }

    #[test]
    fn lag_pairs_unrolled() {
        let p = lag_pairs(&series(&[1.0, 2.0, 3.0]));
        assert_eq!(p.predictors, vec![1.0, 2.0]);
        assert_eq!(p.responses, vec![2.0, 3.0]);

        let p = lag_pairs(&series(&[0.1, -0.4, 0.9, 0.2]));
        assert_eq!(p.predictors, vec![0.1, -0.4, 0.9]);
        assert_eq!(p.responses, vec![-0.4, 0.9, 0.2]);

        let p = lag_pairs(&series(&[2.5; 4]));
        assert_eq!(p.predictors, vec![2.5; 3]);
        assert_eq!(p.responses, vec![2.5; 3]);
    }

    #[test]
    fn series_validation() {
        assert!(matches!(
            TimeSeries::new(vec![1.0, 2.0]),
            Err(Error::SeriesTooShort { len: 2, .. })
        ));
        assert!(matches!(
            TimeSeries::new(vec![1.0, f64::NAN, 2.0]),
            Err(Error::NonFiniteValue { index: 1 })
        ));
    }

    #[test]
    fn single_local_point_gets_full_weight() {
        let pairs = lag_pairs(&series(&[0.0, 5.0, 10.0, 1.0]));
        let w = weights(
            &pairs,
            0.1,
            &spec(
                EstimatorKind::LocalConstant,
                KernelFamily::Epanechnikov,
                1.0,
            ),
        )
        .unwrap();
        assert_eq!(w.weights, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn local_linear_weights_match_wls_oracle() {
        let pairs = lag_pairs(&series(&[0.0, 0.5, 1.0, 0.3]));
        let w = weights(
            &pairs,
            0.5,
            &spec(EstimatorKind::LocalLinear, KernelFamily::Gaussian, 1.0),
        )
        .unwrap();
        let (_, row) = wls_line(&pairs, 0.5, KernelFamily::Gaussian, 1.0);
        for (a, b) in w.weights.iter().zip(&row) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((w.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn nadaraya_watson_matches_direct_sum() {
        let s = series(&[0.0, 1.0, 0.5, 0.8]);
        let pairs = lag_pairs(&s);
        let got = estimate_point(
            &pairs,
            0.5,
            &spec(EstimatorKind::LocalConstant, KernelFamily::Gaussian, 1.0),
        )
        .unwrap();
        let k = |x: f64| (-(x - 0.5f64).powi(2) / 2.0).exp();
        let expected = (k(0.0) * 1.0 + k(1.0) * 0.5 + k(0.5) * 0.8) / (k(0.0) + k(1.0) + k(0.5));
        assert!((got - expected).abs() < 1e-14);
    }

    #[test]
    fn constant_series_gives_constant() {
        let s = series(&[1.7; 6]);
        let grid = Grid::linspace(1.5, 1.9, 5).unwrap();
        let c = estimate_curve(
            &s,
            &grid,
            &spec(EstimatorKind::LocalConstant, KernelFamily::Uniform, 0.5),
        )
        .unwrap();
        assert!(c.estimates.iter().all(|e| (e.unwrap() - 1.7).abs() < 1e-12));
        // All predictors identical: local linear is singular everywhere.
        let c = estimate_curve(
            &s,
            &grid,
            &spec(EstimatorKind::LocalLinear, KernelFamily::Uniform, 0.5),
        )
        .unwrap();
        assert_eq!(c.defined_count(), 0);
    }

    #[test]
    fn linear_responses_reproduced() {
        let pairs = LagPairs {
            predictors: vec![-1.0, -0.2, 0.3, 0.8, 1.5],
            responses: [-1.0, -0.2, 0.3, 0.8, 1.5]
                .iter()
                .map(|x| 2.0 - 0.7 * x)
                .collect(),
        };
        let sp = spec(EstimatorKind::LocalLinear, KernelFamily::Epanechnikov, 1.0);
        for z in [-0.9, 0.0, 0.5, 1.2] {
            let g = estimate_point(&pairs, z, &sp).unwrap();
            assert!((g - (2.0 - 0.7 * z)).abs() < 1e-8);
        }
    }

    #[test]
    fn outside_support_is_flagged() {
        let s = series(&[0.0, 0.1, 0.2, 0.3, 0.15]);
        let grid = Grid::new(vec![0.1, 50.0]).unwrap();
        let sp = spec(
            EstimatorKind::LocalConstant,
            KernelFamily::Epanechnikov,
            0.3,
        );
        let c = estimate_curve(&s, &grid, &sp).unwrap();
        assert!(c.estimates[0].is_some());
        assert_eq!(c.undefined_positions(), vec![1]);
        assert!(matches!(
            estimate_point(&lag_pairs(&s), 50.0, &sp),
            Err(Error::NoLocalData { .. })
        ));
    }

    #[test]
    fn singleton_grid_matches_point() {
        let s = series(&[0.3, -0.1, 0.4, 0.2, -0.3, 0.0]);
        let sp = spec(EstimatorKind::LocalLinear, KernelFamily::Gaussian, 0.4);
        let c = estimate_curve(&s, &Grid::new(vec![0.05]).unwrap(), &sp).unwrap();
        assert_eq!(
            c.estimates[0].unwrap(),
            estimate_point(&lag_pairs(&s), 0.05, &sp).unwrap()
        );
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(Grid::new(vec![]), Err(Error::EmptyGrid)));
        assert!(matches!(
            Grid::new(vec![0.0, 0.0]),
            Err(Error::UnorderedGrid)
        ));
        let g = Grid::linspace(-1.0, 1.0, 401).unwrap();
        assert_eq!(g.points()[0], -1.0);
        assert_eq!(g.points()[400], 1.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn kernel() -> impl Strategy<Value = KernelFamily> {
            prop_oneof![
                Just(KernelFamily::Epanechnikov),
                Just(KernelFamily::Gaussian),
                Just(KernelFamily::Uniform)
            ]
        }

        proptest! {
            #[test]
            fn weight_identities(
                values in prop::collection::vec(-3.0f64..3.0, 5..20),
                h in 0.2f64..3.0,
                zi in 0usize..100,
                kernel in kernel(),
                linear in any::<bool>(),
            ) {
                let s = TimeSeries::new(values).unwrap();
                let pairs = lag_pairs(&s);
                let z = pairs.predictors[zi % pairs.len()] + 0.01;
                let kind = if linear { EstimatorKind::LocalLinear } else { EstimatorKind::LocalConstant };
                let sp = EstimatorSpec::new(kind, kernel, h).unwrap();
                if let Ok(w) = weights(&pairs, z, &sp) {
                    prop_assert!((w.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                    if linear {
                        let m: f64 = w.weights.iter().zip(&pairs.predictors).map(|(a, x)| a * (x - z)).sum();
                        prop_assert!(m.abs() < 1e-10);
                    } else {
                        prop_assert!(w.weights.iter().all(|a| *a >= 0.0));
                    }
                    let direct = estimate_point(&pairs, z, &sp).unwrap();
                    prop_assert!((w.apply(&pairs.responses) - direct).abs() < 1e-9);
                }
            }

            #[test]
            fn local_linear_equals_wls_intercept(
                values in prop::collection::vec(-2.0f64..2.0, 4..10),
                h in 0.3f64..2.0,
                z in -1.5f64..1.5,
            ) {
                let s = TimeSeries::new(values).unwrap();
                let pairs = lag_pairs(&s);
                let sp = EstimatorSpec::new(EstimatorKind::LocalLinear, KernelFamily::Gaussian, h).unwrap();
                if let Ok(g) = estimate_point(&pairs, z, &sp) {
                    let (oracle, _) = wls_line(&pairs, z, KernelFamily::Gaussian, h);
                    prop_assert!((g - oracle).abs() < 1e-8 * (1.0 + oracle.abs()));
                }
            }
        }
    }
}
