//! Extrapolation of `delta^2` gap coefficients from parameter sweeps.

use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares fit of `gap / delta^2 = coefficient + slope delta^order`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaSquaredFit {
    pub coefficient: f64,
    pub slope: f64,
    pub order: f64,
    /// Root-mean-square residual of the scaled gaps.
    pub residual: f64,
    pub points: usize,
}

/// Fits the scaled gaps `(threshold - quotient) / delta^2` of `(delta,
/// quotient)` pairs, with the leading correction of relative size
/// `delta^order`.
pub fn fit_scaled_gaps(sweep: &[(f64, f64)], threshold: f64, order: f64) -> Result<DeltaSquaredFit> {
    if sweep.len() < 4 {
        return Err(Error::Data(format!("need at least 4 sweep points, got {}", sweep.len())));
    }
    let mut pts: Vec<(f64, f64)> = sweep.iter().map(|&(d, q)| (d, threshold - q)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
    if !(lo > 0.0 && hi >= 10.0 * lo * (1.0 - 1e-12)) {
        return Err(Error::Data(format!("sweep [{lo:e}, {hi:e}] must be positive and span a decade")));
    }
    if let Some(&(d, g)) = pts.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::Data(format!("non-positive gap {g:e} at delta = {d:e}")));
    }
    if pts.windows(2).any(|w| w[1].1 <= w[0].1) {
        return Err(Error::Data("gaps are not increasing in delta".into()));
    }
    let xy: Vec<(f64, f64)> = pts.iter().map(|&(d, g)| (d.powf(order), g / (d * d))).collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let coefficient = my - slope * mx;
    let residual = (xy.iter().map(|p| (p.1 - coefficient - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(DeltaSquaredFit { coefficient, slope, order, residual, points: xy.len() })
}
