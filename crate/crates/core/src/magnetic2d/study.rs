use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::domain::{DomainKind, TruncatedDomain, DEFAULT_DEPTH};
use super::eigen::{lowest_eigenvalues, MeshExtrapolation, RadiusExtrapolation, SpectralReport, DEFAULT_SHIFT};
use super::operator::{assemble, fiber_eigenvalue, Gauge};
use crate::corner::CornerBound;
use crate::curved::CurvedBound;
use crate::error::{Error, Result};

/// Largest problem size attempted.
pub const MAX_UNKNOWNS: usize = 400_000;
/// Coarsest mesh accepted by the solver front end.
pub const MAX_H: f64 = 0.1;
/// Slack allowed on monotonicity in the radius before the mesh is blamed.
pub const MONOTONE_SLACK: f64 = 1e-9;

/// Assembles and solves one truncated domain.
pub fn solve(domain: &TruncatedDomain, gauge: &Gauge, k: usize, shift: f64) -> Result<SpectralReport> {
    if domain.mesh.len() > MAX_UNKNOWNS {
        return Err(Error::Config(format!(
            "{} nodes exceed the budget of {MAX_UNKNOWNS}; raise h or lower the radius",
            domain.mesh.len()
        )));
    }
    let op = assemble(domain, gauge)?;
    let mut report = lowest_eigenvalues(&op, k, shift)?;
    report.kind = domain.kind.name().to_string();
    report.delta = domain.kind.delta();
    report.h = domain.h;
    report.radius = domain.radius;
    report.depth = domain.depth;
    Ok(report)
}

/// Lowest eigenvalues of a domain kind cut at `radius` with the default
/// depth and gauge.
pub fn solve_kind(kind: &Arc<dyn DomainKind>, radius: f64, h: f64, k: usize) -> Result<SpectralReport> {
    if !(h > 0.0 && h <= MAX_H) {
        return Err(Error::Config(format!("mesh size h = {h} must lie in (0, {MAX_H}]")));
    }
    let domain = TruncatedDomain::new(kind.clone(), radius, DEFAULT_DEPTH, h)?;
    solve(&domain, &Gauge::default(), k, DEFAULT_SHIFT)
}

/// Richardson extrapolation of `lambda(h) = lambda + c h^2 (+ d h^4)` from
/// two or three levels.
pub fn richardson(h: &[f64], lambda: &[f64]) -> Result<MeshExtrapolation> {
    if h.len() != lambda.len() || !(2..=3).contains(&h.len()) {
        return Err(Error::Data(format!("Richardson needs 2 or 3 levels, got {} sizes and {} values", h.len(), lambda.len())));
    }
    if h.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Data("mesh sizes must decrease".into()));
    }
    // Polynomial in h^2 through the levels, evaluated at h = 0.
    let x: Vec<f64> = h.iter().map(|v| v * v).collect();
    let at_zero = |idx: &[usize]| -> f64 {
        idx.iter()
            .map(|&i| lambda[i] * idx.iter().filter(|&&j| j != i).map(|&j| x[j] / (x[j] - x[i])).product::<f64>())
            .sum()
    };
    let n = h.len();
    let extrapolated = at_zero(&(0..n).collect::<Vec<_>>());
    let lower = if n == 2 { lambda[1] } else { at_zero(&[1, 2]) };
    let error = (extrapolated - lower).abs();
    Ok(MeshExtrapolation { h: h.to_vec(), lambda: lambda.to_vec(), extrapolated, error })
}

/// Fits `lambda(R) = L + C exp(-a R)` through the last three radii.
pub fn fit_radius(radius: &[f64], lambda: &[f64]) -> Result<RadiusExtrapolation> {
    let n = radius.len();
    if n < 3 || lambda.len() != n {
        return Err(Error::Data(format!("truncation study needs at least 3 radii, got {n}")));
    }
    if radius.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Data("radii must increase".into()));
    }
    let monotone = lambda.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);
    let (r, l) = (&radius[n - 3..], &lambda[n - 3..]);
    let (d1, d2) = (l[1] - l[0], l[2] - l[1]);
    let last = l[2];
    let contracting = d1 != 0.0 && d2 * d1 > 0.0 && d2.abs() < d1.abs();
    if !contracting {
        let error = if d2.abs() <= MONOTONE_SLACK { d2.abs() } else { f64::INFINITY };
        return Ok(RadiusExtrapolation {
            radius: radius.to_vec(),
            lambda: lambda.to_vec(),
            extrapolated: last,
            error,
            rate: None,
            monotone,
        });
    }
    let ratio = |a: f64| ((-a * r[0]).exp() - (-a * r[1]).exp()) / ((-a * r[1]).exp() - (-a * r[2]).exp());
    let target = d1 / d2;
    // ratio(a) increases from its a -> 0 limit; bisect in a.
    let (mut lo, mut hi) = (1e-8, 1.0);
    while ratio(hi) < target && hi < 1e3 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    let c = d2 / ((-a * r[2]).exp() - (-a * r[1]).exp());
    let extrapolated = last - c * (-a * r[2]).exp();
    Ok(RadiusExtrapolation {
        radius: radius.to_vec(),
        lambda: lambda.to_vec(),
        extrapolated,
        error: (extrapolated - last).abs(),
        rate: Some(a),
        monotone,
    })
}

/// Lowest eigenvalue against the truncation radius at fixed `h`.
pub fn domain_truncation_study(kind: &Arc<dyn DomainKind>, radii: &[f64], h: f64) -> Result<RadiusExtrapolation> {
    if radii.len() < 3 {
        return Err(Error::Config(format!("truncation study needs at least 3 radii, got {}", radii.len())));
    }
    let lambda = radii.iter().map(|&r| solve_kind(kind, r, h, 1).map(|rep| rep.lowest())).collect::<Result<Vec<_>>>()?;
    let fit = fit_radius(radii, &lambda)?;
    if !fit.monotone {
        return Err(Error::Consistency(format!(
            "lowest eigenvalue is not monotone in the radius ({lambda:?}); the mesh h = {h} is under-resolved"
        )));
    }
    Ok(fit)
}

/// Runs a truncation study at `hs[0]` and a Richardson study over `hs` at
/// the largest radius; returns the finest run with both records attached.
pub fn extrapolated_lowest(kind: &Arc<dyn DomainKind>, radii: &[f64], hs: &[f64], k: usize) -> Result<SpectralReport> {
    let radius = domain_truncation_study(kind, radii, hs[0])?;
    let r_max = *radii.last().unwrap();
    let mut lambda = vec![*radius.lambda.last().unwrap()];
    let mut finest = None;
    for &h in &hs[1..] {
        let rep = solve_kind(kind, r_max, h, k)?;
        lambda.push(rep.lowest());
        finest = Some(rep);
    }
    let mut report = match finest {
        Some(r) => r,
        None => solve_kind(kind, r_max, hs[0], k)?,
    };
    if hs.len() > 1 {
        report.extrapolation.mesh = Some(richardson(hs, &lambda)?);
    }
    report.extrapolation.radius = Some(radius);
    Ok(report)
}

impl SpectralReport {
    /// Continuum estimate of the lowest eigenvalue with its error bar,
    /// adding the mesh and radius corrections.
    pub fn extrapolated(&self) -> (f64, f64) {
        let mut value = self.lowest();
        let mut error = 0.0;
        if let Some(m) = &self.extrapolation.mesh {
            value = m.extrapolated;
            error += m.error;
        }
        if let Some(r) = &self.extrapolation.radius {
            value += r.extrapolated - r.lambda.last().copied().unwrap_or(r.extrapolated);
            error += r.error;
        }
        (value, error)
    }
}

/// Discrete bottom of the essential spectrum: infimum over the Bloch
/// frequency of the flat-strip fiber eigenvalue.
pub fn discrete_threshold(hs: f64, ht: f64, depth: f64) -> Result<(f64, f64)> {
    let f = |xi: f64| fiber_eigenvalue(xi, hs, ht, depth);
    // Golden section on a bracket around the continuum minimizer.
    let (mut a, mut b) = (0.6, 0.95);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-7 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let xi = 0.5 * (a + b);
    if xi - 0.6 < 1e-5 || 0.95 - xi < 1e-5 {
        return Err(Error::Bracket { xi });
    }
    Ok((xi, f(xi)?))
}

/// A quasi-mode Rayleigh quotient from the trial-state modules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiModeBound {
    pub source: String,
    pub delta: f64,
    pub quotient: f64,
    /// Absolute quadrature tolerance of the quotient.
    pub tolerance: f64,
}

/// Relative quadrature target of the trial-state integrals.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;

impl From<&CornerBound> for QuasiModeBound {
    fn from(b: &CornerBound) -> Self {
        Self {
            source: "corner".into(),
            delta: b.delta,
            quotient: b.quotient,
            tolerance: QUADRATURE_TOLERANCE * b.quotient.abs(),
        }
    }
}

impl TryFrom<&CurvedBound> for QuasiModeBound {
    type Error = Error;

    fn try_from(b: &CurvedBound) -> Result<Self> {
        let quotient = b.quotient.ok_or_else(|| {
            Error::Consistency(format!("curved bound at delta = {} carries no certificate", b.delta))
        })?;
        Ok(Self { source: "curved".into(), delta: b.delta, quotient, tolerance: QUADRATURE_TOLERANCE * quotient.abs() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyVerdict {
    pub pass: bool,
    pub lambda: f64,
    pub quotient: f64,
    /// `quotient - lambda`.
    pub margin: f64,
    /// `quotient + tol_total - lambda`.
    pub tolerant_margin: f64,
    pub tol_total: f64,
    pub discretization_error: f64,
    pub quadrature_tolerance: f64,
    /// Side whose error estimate dominates `tol_total`.
    pub dominant: String,
}

/// Min-max check: the extrapolated lowest eigenvalue may not exceed the
/// quasi-mode quotient beyond the combined error estimates.
pub fn verify_bound_consistency(report: &SpectralReport, bound: &QuasiModeBound) -> Result<ConsistencyVerdict> {
    if report.kind != bound.source || (report.delta - bound.delta).abs() > 1e-12 * bound.delta.abs().max(1.0) {
        return Err(Error::Config(format!(
            "geometry mismatch: spectral report for {} at delta = {}, bound for {} at delta = {}",
            report.kind, report.delta, bound.source, bound.delta
        )));
    }
    let (lambda, discretization_error) = report.extrapolated();
    let tol_total = discretization_error + bound.tolerance;
    let margin = bound.quotient - lambda;
    let dominant = if discretization_error >= bound.tolerance { "spectral discretization" } else { "quasi-mode quadrature" };
    Ok(ConsistencyVerdict {
        pass: margin + tol_total >= 0.0,
        lambda,
        quotient: bound.quotient,
        margin,
        tolerant_margin: margin + tol_total,
        tol_total,
        discretization_error,
        quadrature_tolerance: bound.tolerance,
        dominant: dominant.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_quadratic_and_quartic_terms() {
        let f = |h: f64| 0.5 + 0.3 * h * h - 2.0 * h.powi(4);
        let h = [0.1, 0.07, 0.05];
        let two = richardson(&h[1..], &[f(0.07), f(0.05)]).unwrap();
        assert!((two.extrapolated - 0.5).abs() < 2.0 * 0.07f64.powi(2) * 0.05f64.powi(2) + 1e-15);
        let three = richardson(&h, &h.map(f)).unwrap();
        assert!((three.extrapolated - 0.5).abs() < 1e-14, "{}", three.extrapolated - 0.5);
    }

    #[test]
    fn exponential_radius_fit_is_exact() {
        let r = [10.0, 13.0, 19.0, 30.0];
        let l: Vec<f64> = r.iter().map(|x: &f64| 0.58 + 0.02 * (-0.2 * x).exp()).collect();
        let fit = fit_radius(&r, &l).unwrap();
        assert!((fit.extrapolated - 0.58).abs() < 1e-13);
        assert!((fit.rate.unwrap() - 0.2).abs() < 1e-7);
        assert!(fit.monotone);
    }

    #[test]
    fn stalled_radius_sequence_has_no_error_bar() {
        let fit = fit_radius(&[1.0, 2.0, 3.0], &[0.6, 0.59, 0.58]).unwrap();
        assert!(fit.rate.is_none() && fit.error.is_infinite());
    }
}
