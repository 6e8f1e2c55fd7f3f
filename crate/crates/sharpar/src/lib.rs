//! Nonparametric first-order autoregression with bias reduction.
//!
//! The model is `z_t = g(z_{t-1}) + σ ε_t`. This crate estimates `g` with
//! local constant or local linear smoothers of the lagged pairs and offers two
//! bias-reduction schemes on top:
//!
//! * **data sharpening** ([`sharpen`]): responses become
//!   `z*_t = 2 z_t - ĝ(z_{t-1})` and are smoothed again against the original
//!   design points;
//! * **bandwidth regression** ([`cheng`]): local linear estimates on a ladder
//!   of bandwidths are regressed on `h²` and the intercept is kept.
//!
//! Around them sit the tools to study and use the estimators: a seeded
//! parallel simulator ([`simulate`]), Monte Carlo bias and decomposition
//! studies ([`biasstudy`]), linear AR fitting ([`arfit`]) and parametric
//! bootstrap bands for linearity tests ([`boottest`]).
//!
//! ```
//! use sharpar::prelude::*;
//!
//! let cfg = SimulationConfig::new(TrueFunction::XSin, 0.5, 200, 7).unwrap();
//! let series = simulate_replicate(&cfg, 0).unwrap().series;
//! let spec = EstimatorSpec::new(EstimatorKind::LocalLinear, KernelFamily::Epanechnikov, 0.3).unwrap();
//! let grid = Grid::linspace(-0.5, 0.5, 11).unwrap();
//! let raw = estimate_curve(&series, &grid, &spec).unwrap();
//! let sharp = sharpened_curve(&series, &grid, &spec).unwrap();
//! assert_eq!(raw.grid, sharp.grid);
//! ```
//!
//! Runnable examples for every capability live in `examples/`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arfit;
pub mod bandwidth;
pub mod biasstudy;
pub mod boottest;
pub mod cheng;
pub mod error;
pub mod io;
pub mod kernels;
mod linalg;
pub mod localreg;
pub mod procedure;
pub mod sharpen;
pub mod simulate;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::arfit::{fit_ar, residual_series, residuals, simulate_ar, LinearArFit};
    pub use crate::bandwidth::{
        fixed_bandwidth_preset, rule_of_thumb, sharpen_adjust, BandwidthMode,
    };
    pub use crate::biasstudy::{run_study, study_preset, StudyConfig, StudyResult};
    pub use crate::boottest::{
        direct_bands, exceedance, residual_bands, run_test, BootMode, TestBands,
    };
    pub use crate::cheng::{bandwidth_sequence, cheng_curve, fit_h2_regression};
    pub use crate::error::{Error, Result};
    pub use crate::io::bundled_dataset;
    pub use crate::kernels::{Bandwidth, KernelFamily};
    pub use crate::localreg::{
        estimate_curve, estimate_point, lag_pairs, weights, CurveEstimate, EstimatorKind,
        EstimatorSpec, Grid, Method, TimeSeries,
    };
    pub use crate::procedure::Procedure;
    pub use crate::sharpen::{fitted_values, sharpen_responses, sharpened_curve};
    pub use crate::simulate::{
        replicate_stream, simulate_path, simulate_replicate, SimulationConfig, TrueFunction,
    };
}
