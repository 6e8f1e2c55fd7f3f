//! Kernel functions used as local weights.
//!
//! Each family is a symmetric probability density `K` with scaled form
//! `K_h(u) = K(u / h) / h`. Bounded families return exactly `0.0` outside
//! `[-1, 1]`, so weight vectors built from them are exactly sparse.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    #[default]
    Epanechnikov,
    Gaussian,
    Uniform,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 3] = [
        KernelFamily::Epanechnikov,
        KernelFamily::Gaussian,
        KernelFamily::Uniform,
    ];

    /// Base density `K(u)`.
    pub fn value(self, u: f64) -> f64 {
        match self {
            KernelFamily::Epanechnikov => {
                if u.abs() <= 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
            KernelFamily::Gaussian => INV_SQRT_2PI * (-0.5 * u * u).exp(),
            KernelFamily::Uniform => {
                if u.abs() <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
        }
    }

    /// `K_h(u) = K(u/h)/h`.
    pub fn scaled(self, h: Bandwidth, u: f64) -> f64 {
        let h = h.get();
        self.value(u / h) / h
    }

    /// Roughness `R(K) = ∫ K(u)² du`.
    pub fn roughness(self) -> f64 {
        match self {
            KernelFamily::Epanechnikov => 0.6,
            KernelFamily::Gaussian => 1.0 / (2.0 * PI.sqrt()),
            KernelFamily::Uniform => 0.5,
        }
    }

    /// Second moment `μ₂(K) = ∫ u² K(u) du`.
    pub fn second_moment(self) -> f64 {
        match self {
            KernelFamily::Epanechnikov => 0.2,
            KernelFamily::Gaussian => 1.0,
            KernelFamily::Uniform => 1.0 / 3.0,
        }
    }

    /// Half-width of the support, `None` for unbounded families.
    pub fn support_radius(self) -> Option<f64> {
        match self {
            KernelFamily::Gaussian => None,
            _ => Some(1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Epanechnikov => "epanechnikov",
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Uniform => "uniform",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "epanechnikov" | "epa" => Ok(KernelFamily::Epanechnikov),
            "gaussian" | "normal" => Ok(KernelFamily::Gaussian),
            "uniform" | "box" => Ok(KernelFamily::Uniform),
            other => Err(Error::InvalidArgument(format!("unknown kernel `{other}`"))),
        }
    }
}

/// Smoothing bandwidth; always positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(h: f64) -> Result<Self> {
        if h.is_finite() && h > 0.0 {
            Ok(Bandwidth(h))
        } else {
            Err(Error::InvalidBandwidth(h))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Bandwidth {
    type Error = Error;

    fn try_from(h: f64) -> Result<Self> {
        Bandwidth::new(h)
    }
}

impl From<Bandwidth> for f64 {
    fn from(h: Bandwidth) -> f64 {
        h.0
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `K(u)` for the given family.
pub fn kernel_value(family: KernelFamily, u: f64) -> f64 {
    family.value(u)
}

/// `K_h(u)`; rejects non-positive bandwidths.
pub fn scaled_kernel(family: KernelFamily, h: f64, u: f64) -> Result<f64> {
    Ok(family.scaled(Bandwidth::new(h)?, u))
}
