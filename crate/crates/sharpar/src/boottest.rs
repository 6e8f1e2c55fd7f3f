//! Pointwise parametric-bootstrap bands for testing linearity.
//!
//! *Direct* mode fits an AR(1) to the series, simulates from it and
//! re-estimates `g` on every simulated series. *Residual* mode fits an AR(p),
//! and for every simulated series refits the AR(p) and estimates `g` on the
//! refit residuals, whose true autoregression function is zero.
//!
//! Quantiles use the inverse empirical CDF: the `⌈q·k⌉`-th smallest of `k`
//! defined replicate values.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arfit::{fit_ar, residual_series, simulate_ar, LinearArFit, BOOTSTRAP_BURN_IN};
use crate::error::{Error, Result};
use crate::localreg::{CurveEstimate, Grid, Method, TimeSeries};
use crate::procedure::Procedure;
use crate::simulate::replicate_stream;

pub const LOWER_QUANTILE: f64 = 0.025;
pub const UPPER_QUANTILE: f64 = 0.975;
pub const DEFAULT_REPLICATES: usize = 500;
/// Points defined in fewer replicates than this share are left without bands.
pub const MIN_DEFINED_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BootMode {
    Direct,
    Residual,
}

impl fmt::Display for BootMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BootMode::Direct => "direct",
            BootMode::Residual => "residual",
        })
    }
}

impl FromStr for BootMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(BootMode::Direct),
            "residual" => Ok(BootMode::Residual),
            other => Err(Error::InvalidArgument(format!(
                "unknown bootstrap mode `{other}`"
            ))),
        }
    }
}

/// Curve estimates of every bootstrap replicate; rows are replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateMatrix {
    pub grid: Grid,
    pub rows: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestBands {
    pub grid: Grid,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
    pub defined_count: Vec<usize>,
    pub method: Method,
    pub mode: BootMode,
    pub replicates: usize,
}

impl TestBands {
    pub fn midpoint(&self, i: usize) -> Option<f64> {
        Some(0.5 * (self.lower[i]? + self.upper[i]?))
    }

    pub fn half_width(&self, i: usize) -> Option<f64> {
        Some(0.5 * (self.upper[i]? - self.lower[i]?))
    }
}

/// `⌈q·k⌉`-th smallest of the sorted values (1-based, at least the first).
pub fn empirical_quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Some(sorted[rank - 1])
}

pub fn bands_from_matrix(matrix: &ReplicateMatrix, method: Method, mode: BootMode) -> TestBands {
    let b = matrix.rows.len();
    let npts = matrix.grid.len();
    let mut lower = Vec::with_capacity(npts);
    let mut upper = Vec::with_capacity(npts);
    let mut defined_count = Vec::with_capacity(npts);
    for j in 0..npts {
        let mut column: Vec<f64> = matrix.rows.iter().filter_map(|row| row[j]).collect();
        column.sort_by(f64::total_cmp);
        defined_count.push(column.len());
        if (column.len() as f64) < MIN_DEFINED_FRACTION * b as f64 {
            lower.push(None);
            upper.push(None);
        } else {
            lower.push(empirical_quantile(&column, LOWER_QUANTILE));
            upper.push(empirical_quantile(&column, UPPER_QUANTILE));
        }
    }
    TestBands {
        grid: matrix.grid.clone(),
        lower,
        upper,
        defined_count,
        method,
        mode,
        replicates: b,
    }
}

fn curve_or_undefined(
    procedure: &Procedure,
    series: &TimeSeries,
    grid: &Grid,
) -> Result<Vec<Option<f64>>> {
    match procedure.estimate(series, grid) {
        Ok(c) => Ok(c.estimates),
        Err(e) if e.is_numerical() => Ok(vec![None; grid.len()]),
        Err(e) => Err(e),
    }
}

fn null_fit(series: &TimeSeries, p: usize) -> Result<LinearArFit> {
    let fit = fit_ar(series, p)?;
    let z = series.values();
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / z.len() as f64;
    if fit.noise_variance <= 1e-20 * var.max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateDesign(format!(
            "AR({p}) fit leaves no residual variation; the null model is deterministic"
        )));
    }
    Ok(fit)
}

fn simulate_from(
    fit: &LinearArFit,
    series: &TimeSeries,
    seed: u64,
    index: u64,
) -> Result<TimeSeries> {
    let z = series.values();
    let init = &z[z.len() - fit.order..];
    simulate_ar(
        fit,
        z.len(),
        &mut replicate_stream(seed, index),
        init,
        BOOTSTRAP_BURN_IN,
    )
}

/// Replicate curves under the fitted AR(1) null.
pub fn direct_replicates(
    series: &TimeSeries,
    procedure: &Procedure,
    grid: &Grid,
    replicates: usize,
    seed: u64,
) -> Result<(LinearArFit, ReplicateMatrix)> {
    if replicates == 0 {
        return Err(Error::InvalidArgument(
            "at least one bootstrap replicate is required".into(),
        ));
    }
    let fit = null_fit(series, 1)?;
    let rows = (0..replicates as u64)
        .into_par_iter()
        .map(|b| {
            let sim = simulate_from(&fit, series, seed, b)?;
            curve_or_undefined(procedure, &sim, grid)
        })
        .collect::<Result<_>>()?;
    Ok((
        fit,
        ReplicateMatrix {
            grid: grid.clone(),
            rows,
        },
    ))
}

/// Replicate curves of refit AR(p) residuals under the fitted AR(p) null.
pub fn residual_replicates(
    series: &TimeSeries,
    p: usize,
    procedure: &Procedure,
    grid: &Grid,
    replicates: usize,
    seed: u64,
) -> Result<(LinearArFit, ReplicateMatrix)> {
    if replicates == 0 {
        return Err(Error::InvalidArgument(
            "at least one bootstrap replicate is required".into(),
        ));
    }
    let fit = null_fit(series, p)?;
    let rows = (0..replicates as u64)
        .into_par_iter()
        .map(|b| {
            let sim = simulate_from(&fit, series, seed, b)?;
            let refit = match fit_ar(&sim, p) {
                Ok(f) => f,
                Err(e) if e.is_numerical() => return Ok(vec![None; grid.len()]),
                Err(e) => return Err(e),
            };
            curve_or_undefined(procedure, &residual_series(&refit, &sim)?, grid)
        })
        .collect::<Result<_>>()?;
    Ok((
        fit,
        ReplicateMatrix {
            grid: grid.clone(),
            rows,
        },
    ))
}

pub fn direct_bands(
    series: &TimeSeries,
    procedure: &Procedure,
    grid: &Grid,
    replicates: usize,
    seed: u64,
) -> Result<TestBands> {
    let (_, m) = direct_replicates(series, procedure, grid, replicates, seed)?;
    Ok(bands_from_matrix(&m, procedure.method, BootMode::Direct))
}

pub fn residual_bands(
    series: &TimeSeries,
    p: usize,
    procedure: &Procedure,
    grid: &Grid,
    replicates: usize,
    seed: u64,
) -> Result<TestBands> {
    let (_, m) = residual_replicates(series, p, procedure, grid, replicates, seed)?;
    Ok(bands_from_matrix(&m, procedure.method, BootMode::Residual))
}

/// Observed curve, its bands and the fitted null model.
#[derive(Debug, Clone)]
pub struct BootstrapTest {
    pub null_fit: LinearArFit,
    pub observed: CurveEstimate,
    pub bands: TestBands,
    pub report: ExceedanceReport,
}

/// Full test in either mode. The grid defaults to `grid_n` points over the
/// range of the series the curve is estimated on.
pub fn run_test(
    series: &TimeSeries,
    mode: BootMode,
    order: usize,
    procedure: &Procedure,
    grid_n: usize,
    replicates: usize,
    seed: u64,
) -> Result<BootstrapTest> {
    let (null_fit, target) = match mode {
        BootMode::Direct => {
            if order != 1 {
                return Err(Error::InvalidArgument(
                    "direct mode tests against an AR(1) null".into(),
                ));
            }
            (null_fit(series, 1)?, series.clone())
        }
        BootMode::Residual => {
            let fit = null_fit(series, order)?;
            let resid = residual_series(&fit, series)?;
            (fit, resid)
        }
    };
    let grid = Grid::over_range(&target, grid_n)?;
    let observed = procedure.estimate(&target, &grid)?;
    let bands = match mode {
        BootMode::Direct => direct_bands(series, procedure, &grid, replicates, seed)?,
        BootMode::Residual => residual_bands(series, order, procedure, &grid, replicates, seed)?,
    };
    let report = exceedance(&observed, &bands)?;
    Ok(BootstrapTest {
        null_fit,
        observed,
        bands,
        report,
    })
}

/// Maximal run of consecutive grid points where the observed curve is
/// outside its band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExceedanceRegion {
    pub start: usize,
    pub end: usize,
    pub z_start: f64,
    pub z_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceReport {
    pub regions: Vec<ExceedanceRegion>,
    /// Share of grid points lying in some region.
    pub fraction_outside: f64,
    pub outside: Vec<bool>,
}

pub fn exceedance(observed: &CurveEstimate, bands: &TestBands) -> Result<ExceedanceReport> {
    if observed.grid != bands.grid {
        return Err(Error::GridMismatch);
    }
    let outside: Vec<bool> = (0..bands.grid.len())
        .map(
            |j| match (observed.estimates[j], bands.lower[j], bands.upper[j]) {
                (Some(v), Some(lo), Some(hi)) => v < lo || v > hi,
                _ => false,
            },
        )
        .collect();
    let pts = bands.grid.points();
    let mut regions = Vec::new();
    let mut start = None;
    for (j, &out) in outside.iter().chain(std::iter::once(&false)).enumerate() {
        match (out, start) {
            (true, None) => start = Some(j),
            (false, Some(s)) => {
                regions.push(ExceedanceRegion {
                    start: s,
                    end: j - 1,
                    z_start: pts[s],
                    z_end: pts[j - 1],
                });
                start = None;
            }
            _ => {}
        }
    }
    let count = outside.iter().filter(|&&o| o).count();
    Ok(ExceedanceReport {
        regions,
        fraction_outside: count as f64 / pts.len() as f64,
        outside,
    })
}
