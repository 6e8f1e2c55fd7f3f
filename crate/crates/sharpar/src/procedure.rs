//! A complete estimation recipe: method, estimator kind, kernel and how the
//! bandwidth is chosen. The bias studies and bootstrap tests apply the same
//! recipe to every simulated series.

use serde::{Deserialize, Serialize};

use crate::bandwidth::BandwidthMode;
use crate::cheng::{cheng_curve, DEFAULT_LADDER_LEN};
use crate::error::{Error, Result};
use crate::kernels::KernelFamily;
use crate::localreg::{
    estimate_curve, lag_pairs, CurveEstimate, EstimatorKind, EstimatorSpec, Grid, Method,
    TimeSeries,
};
use crate::sharpen::sharpened_curve;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Procedure {
    pub method: Method,
    pub kind: EstimatorKind,
    pub kernel: KernelFamily,
    pub bandwidth: BandwidthMode,
    /// Ladder length for the bandwidth-regression method.
    pub ladder_len: usize,
}

impl Procedure {
    pub fn new(
        method: Method,
        kind: EstimatorKind,
        kernel: KernelFamily,
        bandwidth: BandwidthMode,
    ) -> Result<Self> {
        if method == Method::Cheng && kind != EstimatorKind::LocalLinear {
            return Err(Error::InvalidArgument(
                "bandwidth-regression bias reduction applies to local linear only".into(),
            ));
        }
        Ok(Procedure {
            method,
            kind,
            kernel,
            bandwidth,
            ladder_len: DEFAULT_LADDER_LEN,
        })
    }

    /// Local linear with the given method.
    pub fn local_linear(method: Method, kernel: KernelFamily, bandwidth: BandwidthMode) -> Self {
        Procedure {
            method,
            kind: EstimatorKind::LocalLinear,
            kernel,
            bandwidth,
            ladder_len: DEFAULT_LADDER_LEN,
        }
    }

    /// Estimator spec with the bandwidth resolved for `series`.
    pub fn resolve(&self, series: &TimeSeries) -> Result<EstimatorSpec> {
        let h = self
            .bandwidth
            .resolve(self.method, &lag_pairs(series), self.kernel)?;
        Ok(EstimatorSpec {
            kind: self.kind,
            kernel: self.kernel,
            h,
        })
    }

    pub fn estimate(&self, series: &TimeSeries, grid: &Grid) -> Result<CurveEstimate> {
        let spec = self.resolve(series)?;
        match self.method {
            Method::Raw => estimate_curve(series, grid, &spec),
            Method::Sharpened => sharpened_curve(series, grid, &spec),
            Method::Cheng => cheng_curve(series, grid, spec.h, spec.kernel, self.ladder_len),
        }
    }
}
