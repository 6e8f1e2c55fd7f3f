//! Monte Carlo bias, mean absolute error and sharpening-bias decomposition.
//!
//! For a single simulated path with smoother weights `A` and the smoother
//! matrix `S_it = A_t(z_{i-1})` at the design points, the sharpened error splits
//! exactly as
//!
//! ```text
//! ĝ*(z) - g(z) = (ĝ(z) - g(z)) - Bĝ(z) - Err(z)
//! Bĝ(z)  = Σ_i A_i(z) [ Σ_t S_it g(z_{t-1}) - g(z_{i-1}) ]
//! Err(z) = Σ_i A_i(z) [ Σ_t S_it σε_t      - σε_i       ]
//! ```
//!
//! Averaging the realized terms over replicates estimates the expectations.
//! Replicates are computed in parallel and reduced in index order, so every
//! curve is a deterministic function of the configuration and seed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandwidth::{fixed_bandwidth_preset, BandwidthMode};
use crate::cheng::DEFAULT_LADDER_LEN;
use crate::error::{Error, Result};
use crate::kernels::KernelFamily;
use crate::localreg::{
    lag_pairs, weights, EstimatorKind, EstimatorSpec, Grid, Method, WeightVector,
};
use crate::procedure::Procedure;
use crate::simulate::{simulate_replicate, SimulatedPath, SimulationConfig, TrueFunction};

/// Share of replicates in which a grid point must be defined before it is
/// reported.
pub const REPORTABLE_FRACTION: f64 = 0.95;

pub const DESK_REPLICATES: usize = 500;

pub const PRESET_NAMES: [&str; 6] = [
    "decomp-xsin",
    "decomp-cos",
    "compare-cos",
    "compare-xcos",
    "compare-sin",
    "compare-xsin",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub sim: SimulationConfig,
    pub kind: EstimatorKind,
    pub kernel: KernelFamily,
    pub methods: Vec<Method>,
    pub grid: Grid,
    pub replicates: usize,
    pub bandwidth: BandwidthMode,
    pub ladder_len: usize,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        if self.replicates == 0 {
            return Err(Error::InvalidArgument(
                "at least one replicate is required".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument(
                "no estimation method selected".into(),
            ));
        }
        for &m in &self.methods {
            self.procedure(m)?;
        }
        Ok(())
    }

    pub fn procedure(&self, method: Method) -> Result<Procedure> {
        let mut p = Procedure::new(method, self.kind, self.kernel, self.bandwidth)?;
        p.ladder_len = self.ladder_len;
        Ok(p)
    }
}

/// Named study designs. Decomposition presets need `n ∈ {50, 100, 200}`.
pub fn study_preset(name: &str, n: usize) -> Result<StudyConfig> {
    let (g, decomp) = match name {
        "decomp-xsin" => (TrueFunction::XSin, true),
        "decomp-cos" => (TrueFunction::Cos, true),
        "compare-cos" => (TrueFunction::Cos, false),
        "compare-xcos" => (TrueFunction::XCos, false),
        "compare-sin" => (TrueFunction::Sin, false),
        "compare-xsin" => (TrueFunction::XSin, false),
        _ => {
            return Err(Error::UnknownPreset {
                name: name.to_string(),
                available: PRESET_NAMES.join(", "),
            })
        }
    };
    let sim = SimulationConfig::new(g, 0.5, n, 0)?;
    let config = if decomp {
        StudyConfig {
            sim,
            kind: EstimatorKind::LocalConstant,
            kernel: KernelFamily::Epanechnikov,
            methods: vec![Method::Raw, Method::Sharpened],
            grid: Grid::linspace(-1.0, 1.0, 81)?,
            replicates: 500,
            bandwidth: BandwidthMode::Fixed(fixed_bandwidth_preset(n)?),
            ladder_len: DEFAULT_LADDER_LEN,
        }
    } else {
        StudyConfig {
            sim,
            kind: EstimatorKind::LocalLinear,
            kernel: KernelFamily::Epanechnikov,
            methods: Method::ALL.to_vec(),
            grid: Grid::linspace(-0.5, 0.5, 41)?,
            replicates: DESK_REPLICATES,
            bandwidth: BandwidthMode::RuleOfThumbSharpAdjusted,
            ladder_len: DEFAULT_LADDER_LEN,
        }
    };
    Ok(config)
}

/// A Monte Carlo average over replicates, per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct McCurve {
    pub grid: Grid,
    /// `None` where no replicate was defined.
    pub values: Vec<Option<f64>>,
    /// Standard error of each average.
    pub std_errors: Vec<Option<f64>>,
    pub defined_count: Vec<usize>,
    pub replicates: usize,
}

impl McCurve {
    pub fn reportable(&self, i: usize) -> bool {
        self.defined_count[i] as f64 >= REPORTABLE_FRACTION * self.replicates as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub bias: McCurve,
    pub mae: McCurve,
}

/// Realized decomposition terms for one replicate at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizedDecomposition {
    pub raw_error: f64,
    pub sharp_error: f64,
    pub b_ghat: f64,
    pub err: f64,
}

/// Replicate averages of the decomposition terms. Every field at a grid
/// point averages over the same replicates, so `combination` equals
/// `b_sharp` up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionCurves {
    pub grid: Grid,
    pub b_raw: Vec<Option<f64>>,
    pub b_sharp: Vec<Option<f64>>,
    pub b_ghat: Vec<Option<f64>>,
    pub err: Vec<Option<f64>>,
    pub combination: Vec<Option<f64>>,
    pub defined_count: Vec<usize>,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub methods: Vec<MethodSummary>,
    pub decomposition: Option<DecompositionCurves>,
}

impl StudyResult {
    pub fn method(&self, method: Method) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == method)
    }
}

/// Running sums for a mean and its standard error.
#[derive(Clone, Copy, Default)]
struct Moments {
    count: usize,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / self.count as f64)
    }

    fn std_error(&self) -> Option<f64> {
        if self.count < 2 {
            return None;
        }
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        Some((var / n).sqrt())
    }
}

fn mc_curve(grid: &Grid, acc: &[Moments], replicates: usize) -> McCurve {
    McCurve {
        grid: grid.clone(),
        values: acc.iter().map(Moments::mean).collect(),
        std_errors: acc.iter().map(Moments::std_error).collect(),
        defined_count: acc.iter().map(|m| m.count).collect(),
        replicates,
    }
}

/// Estimation errors `ĝ(z) - g(z)` of one method on one path.
fn method_errors(
    procedure: &Procedure,
    path: &SimulatedPath,
    grid: &Grid,
    g: TrueFunction,
) -> Result<Vec<Option<f64>>> {
    match procedure.estimate(&path.series, grid) {
        Ok(curve) => Ok(curve
            .iter()
            .map(|(z, e)| e.map(|e| e - g.eval(z)))
            .collect()),
        Err(e) if e.is_numerical() => Ok(vec![None; grid.len()]),
        Err(e) => Err(e),
    }
}

fn optional_weights(
    pairs: &crate::localreg::LagPairs,
    z: f64,
    spec: &EstimatorSpec,
) -> Result<Option<WeightVector>> {
    match weights(pairs, z, spec) {
        Ok(w) => Ok(Some(w)),
        Err(e) if e.is_numerical() => Ok(None),
        Err(e) => Err(e),
    }
}

/// Realized decomposition on one path with a shared estimator spec.
///
/// `path.innovations[t]` must be the scaled noise that produced
/// `path.series[t]`.
pub fn decompose_replicate(
    path: &SimulatedPath,
    spec: &EstimatorSpec,
    g: TrueFunction,
    grid: &Grid,
) -> Result<Vec<Option<RealizedDecomposition>>> {
    let pairs = lag_pairs(&path.series);
    let noise = &path.innovations[1..];
    let g_design: Vec<f64> = pairs.predictors.iter().map(|&x| g.eval(x)).collect();

    // Row i: smoother weights at design point z_{i-1}, applied to g, noise and
    // the responses themselves.
    struct Row {
        d_g: f64,
        d_noise: f64,
        fitted: f64,
    }
    let rows: Vec<Option<Row>> = pairs
        .predictors
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            Ok(optional_weights(&pairs, x, spec)?.map(|w| Row {
                d_g: w.apply(&g_design) - g_design[i],
                d_noise: w.apply(noise) - noise[i],
                fitted: w.apply(&pairs.responses),
            }))
        })
        .collect::<Result<_>>()?;

    grid.points()
        .par_iter()
        .map(|&z| {
            let Some(w) = optional_weights(&pairs, z, spec)? else {
                return Ok(None);
            };
            let (mut raw, mut sharp, mut b_ghat, mut err) = (0.0, 0.0, 0.0, 0.0);
            for ((a, row), y) in w.weights.iter().zip(&rows).zip(&pairs.responses) {
                if *a == 0.0 {
                    continue;
                }
                let Some(row) = row else {
                    return Ok(None);
                };
                raw += a * y;
                sharp += a * (2.0 * y - row.fitted);
                b_ghat += a * row.d_g;
                err += a * row.d_noise;
            }
            let truth = g.eval(z);
            Ok(Some(RealizedDecomposition {
                raw_error: raw - truth,
                sharp_error: sharp - truth,
                b_ghat,
                err,
            }))
        })
        .collect()
}

struct ReplicateOutcome {
    errors: Vec<Vec<Option<f64>>>,
    decomposition: Option<Vec<Option<RealizedDecomposition>>>,
}

fn shares_bandwidth(mode: &BandwidthMode) -> bool {
    !matches!(mode, BandwidthMode::RuleOfThumbSharpAdjusted)
}

fn run_replicate(
    config: &StudyConfig,
    procedures: &[Procedure],
    with_decomposition: bool,
    index: u64,
) -> Result<ReplicateOutcome> {
    let path = simulate_replicate(&config.sim, index)?;
    let errors = procedures
        .iter()
        .map(|p| method_errors(p, &path, &config.grid, config.sim.g))
        .collect::<Result<Vec<_>>>()?;
    let decomposition = if with_decomposition {
        let spec = config.procedure(Method::Sharpened)?.resolve(&path.series);
        Some(match spec {
            Ok(spec) => decompose_replicate(&path, &spec, config.sim.g, &config.grid)?,
            Err(e) if e.is_numerical() => vec![None; config.grid.len()],
            Err(e) => return Err(e),
        })
    } else {
        None
    };
    Ok(ReplicateOutcome {
        errors,
        decomposition,
    })
}

fn run(config: &StudyConfig, with_decomposition: bool) -> Result<StudyResult> {
    config.validate()?;
    if with_decomposition && !shares_bandwidth(&config.bandwidth) {
        return Err(Error::InvalidArgument(
            "bias decomposition needs raw and sharpened estimators to share one bandwidth".into(),
        ));
    }
    let procedures = config
        .methods
        .iter()
        .map(|&m| config.procedure(m))
        .collect::<Result<Vec<_>>>()?;

    let outcomes: Vec<ReplicateOutcome> = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| run_replicate(config, &procedures, with_decomposition, r))
        .collect::<Result<_>>()?;

    let npts = config.grid.len();
    let mut bias_acc = vec![vec![Moments::default(); npts]; procedures.len()];
    let mut abs_acc = bias_acc.clone();
    let mut dec_acc = vec![[Moments::default(); 4]; npts];
    for outcome in &outcomes {
        for (m, errs) in outcome.errors.iter().enumerate() {
            for (j, e) in errs.iter().enumerate() {
                if let Some(e) = e {
                    bias_acc[m][j].push(*e);
                    abs_acc[m][j].push(e.abs());
                }
            }
        }
        if let Some(dec) = &outcome.decomposition {
            for (j, d) in dec.iter().enumerate() {
                if let Some(d) = d {
                    let acc = &mut dec_acc[j];
                    acc[0].push(d.raw_error);
                    acc[1].push(d.sharp_error);
                    acc[2].push(d.b_ghat);
                    acc[3].push(d.err);
                }
            }
        }
    }

    let methods = config
        .methods
        .iter()
        .enumerate()
        .map(|(m, &method)| MethodSummary {
            method,
            bias: mc_curve(&config.grid, &bias_acc[m], config.replicates),
            mae: mc_curve(&config.grid, &abs_acc[m], config.replicates),
        })
        .collect();

    let decomposition = with_decomposition.then(|| {
        let col = |k: usize| -> Vec<Option<f64>> { dec_acc.iter().map(|a| a[k].mean()).collect() };
        let (b_raw, b_sharp, b_ghat, err) = (col(0), col(1), col(2), col(3));
        let combination = (0..npts)
            .map(|j| Some(b_raw[j]? - b_ghat[j]? - err[j]?))
            .collect();
        DecompositionCurves {
            grid: config.grid.clone(),
            b_raw,
            b_sharp,
            b_ghat,
            err,
            combination,
            defined_count: dec_acc.iter().map(|a| a[0].count).collect(),
            replicates: config.replicates,
        }
    });

    Ok(StudyResult {
        config: config.clone(),
        methods,
        decomposition,
    })
}

/// Bias and MAE curves for every configured method; the decomposition is
/// included when raw and sharpened estimators share a bandwidth.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    let decompose =
        config.methods.contains(&Method::Sharpened) && shares_bandwidth(&config.bandwidth);
    run(config, decompose)
}

fn single_method(config: &StudyConfig, method: Method) -> Result<MethodSummary> {
    if !config.methods.contains(&method) {
        return Err(Error::InvalidArgument(format!(
            "method `{method}` is not part of this study"
        )));
    }
    let single = StudyConfig {
        methods: vec![method],
        ..config.clone()
    };
    let mut result = run(&single, false)?;
    Ok(result.methods.remove(0))
}

/// Monte Carlo mean of `ĝ(z) - g(z)` for one method.
pub fn bias_curve(config: &StudyConfig, method: Method) -> Result<McCurve> {
    Ok(single_method(config, method)?.bias)
}

/// Monte Carlo mean of `|ĝ(z) - g(z)|` for one method.
pub fn mae_curve(config: &StudyConfig, method: Method) -> Result<McCurve> {
    Ok(single_method(config, method)?.mae)
}

pub fn decomposition_study(config: &StudyConfig) -> Result<DecompositionCurves> {
    let config = StudyConfig {
        methods: vec![Method::Raw, Method::Sharpened],
        ..config.clone()
    };
    let result = run(&config, true)?;
    Ok(result.decomposition.expect("decomposition requested"))
}
