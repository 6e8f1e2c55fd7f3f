//! Simulation of `z_t = g(z_{t-1}) + σ ε_t` with standard normal `ε_t`.
//!
//! Every replicate draws from its own ChaCha stream selected by
//! `(seed, replicate_index)`, so results do not depend on thread scheduling.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localreg::TimeSeries;

pub type ReplicateRng = ChaCha8Rng;

pub const DEFAULT_BURN_IN: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrueFunction {
    Cos,
    XCos,
    Sin,
    XSin,
    Linear { a: f64, b: f64 },
    Zero,
}

impl TrueFunction {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            TrueFunction::Cos => x.cos(),
            TrueFunction::XCos => x * x.cos(),
            TrueFunction::Sin => x.sin(),
            TrueFunction::XSin => x * x.sin(),
            TrueFunction::Linear { a, b } => a + b * x,
            TrueFunction::Zero => 0.0,
        }
    }
}

impl fmt::Display for TrueFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrueFunction::Cos => f.write_str("cos"),
            TrueFunction::XCos => f.write_str("xcos"),
            TrueFunction::Sin => f.write_str("sin"),
            TrueFunction::XSin => f.write_str("xsin"),
            TrueFunction::Linear { a, b } => write!(f, "linear:{a},{b}"),
            TrueFunction::Zero => f.write_str("zero"),
        }
    }
}

impl FromStr for TrueFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let g = match s {
            "cos" => TrueFunction::Cos,
            "xcos" => TrueFunction::XCos,
            "sin" => TrueFunction::Sin,
            "xsin" => TrueFunction::XSin,
            "zero" => TrueFunction::Zero,
            other => {
                let bad = || Error::InvalidArgument(format!("unknown function `{other}`"));
                let coeffs = other.strip_prefix("linear:").ok_or_else(bad)?;
                let (a, b) = coeffs.split_once(',').ok_or_else(bad)?;
                let a: f64 = a.trim().parse().map_err(|_| bad())?;
                let b: f64 = b.trim().parse().map_err(|_| bad())?;
                if !(a.is_finite() && b.is_finite()) {
                    return Err(bad());
                }
                TrueFunction::Linear { a, b }
            }
        };
        Ok(g)
    }
}

pub fn eval_true(g: TrueFunction, x: f64) -> f64 {
    g.eval(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub g: TrueFunction,
    pub sigma: f64,
    pub n: usize,
    pub burn_in: usize,
    pub z0: f64,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn new(g: TrueFunction, sigma: f64, n: usize, seed: u64) -> Result<Self> {
        let cfg = SimulationConfig {
            g,
            sigma,
            n,
            burn_in: DEFAULT_BURN_IN,
            z0: 0.0,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise scale must be positive, got {}",
                self.sigma
            )));
        }
        if self.n < TimeSeries::MIN_LEN {
            return Err(Error::SeriesTooShort {
                len: self.n,
                min: TimeSeries::MIN_LEN,
            });
        }
        if !self.z0.is_finite() {
            return Err(Error::InvalidArgument(
                "initial state must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// A simulated path together with the scaled innovations `σ ε_t` that
/// produced each retained value.
#[derive(Debug, Clone)]
pub struct SimulatedPath {
    pub series: TimeSeries,
    pub innovations: Vec<f64>,
}

/// Independent stream for one replicate.
pub fn replicate_stream(seed: u64, replicate_index: u64) -> ReplicateRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate_index);
    rng
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn simulate_path_with_noise<R: Rng + ?Sized>(
    config: &SimulationConfig,
    rng: &mut R,
) -> Result<SimulatedPath> {
    config.validate()?;
    let mut z = config.z0;
    for _ in 0..config.burn_in {
        z = config.g.eval(z) + config.sigma * standard_normal(rng);
    }
    let mut values = Vec::with_capacity(config.n);
    let mut innovations = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let e = config.sigma * standard_normal(rng);
        z = config.g.eval(z) + e;
        values.push(z);
        innovations.push(e);
    }
    Ok(SimulatedPath {
        series: TimeSeries::new(values)?,
        innovations,
    })
}

pub fn simulate_path<R: Rng + ?Sized>(
    config: &SimulationConfig,
    rng: &mut R,
) -> Result<TimeSeries> {
    Ok(simulate_path_with_noise(config, rng)?.series)
}

/// Path for replicate `index` of `config`.
pub fn simulate_replicate(config: &SimulationConfig, index: u64) -> Result<SimulatedPath> {
    simulate_path_with_noise(config, &mut replicate_stream(config.seed, index))
}
