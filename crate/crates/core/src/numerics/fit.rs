use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Least-squares line through `(log x, log y)` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residuals.
    pub width: f64,
}

/// Fits `log y = slope·log x + intercept` to points given as `(x, y)`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::Fit(format!("non-positive data point ({}, {})", p.0, p.1)));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx < 1e-14 {
        return Err(Error::Fit("degenerate abscissae".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let width = if points.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(SlopeFit { slope, intercept, width })
}

/// Fits `value(N) = Σ_{k<terms} c_k N^{-k}` by least squares and returns the
/// coefficients `c_0, c_1, …`.
pub fn richardson(ns: &[f64], values: &[f64], terms: usize) -> Result<Vec<f64>> {
    if ns.len() != values.len() || ns.len() < terms || terms == 0 {
        return Err(Error::Fit(format!(
            "{} samples cannot determine {} coefficients",
            ns.len(),
            terms
        )));
    }
    // Scale columns by the smallest N so the design matrix stays well conditioned.
    let scale = ns.iter().copied().fold(f64::INFINITY, f64::min);
    let a = DMatrix::from_fn(ns.len(), terms, |i, k| (scale / ns[i]).powi(k as i32));
    let b = DVector::from_column_slice(values);
    let svd = a.svd(true, true);
    let c = svd.solve(&b, 1e-14).map_err(|e| Error::Fit(e.to_string()))?;
    Ok((0..terms).map(|k| c[k] * scale.powi(k as i32)).collect())
}
