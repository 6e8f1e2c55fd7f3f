use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Ordinary least squares solution and residual sum of squares.
pub(crate) struct OlsFit {
    pub coefficients: Vec<f64>,
    pub rss: f64,
}

/// Least squares via SVD; fails if the design is numerically rank deficient.
pub(crate) fn least_squares(design: &DMatrix<f64>, y: &[f64]) -> Result<OlsFit> {
    let y = DVector::from_column_slice(y);
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin <= smax * 1e-12 {
        return Err(Error::DegenerateDesign(
            "least squares design matrix is rank deficient".into(),
        ));
    }
    let beta = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::DegenerateDesign(e.to_string()))?;
    let resid = &y - design * &beta;
    Ok(OlsFit {
        coefficients: beta.iter().copied().collect(),
        rss: resid.norm_squared(),
    })
}
