use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::envelope::{Envelope, ExponentialEnvelope};
use super::form::{effective_form, norm_inverse_expansion, tubular_form, TubularForm, TubularTrialState};
use super::profile::CurvatureProfile;
use crate::degennes::{DeGennesSolution, UniversalConstants};
use crate::error::{Error, Result};
use crate::gapfit::{fit_scaled_gaps, DeltaSquaredFit};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvedBoundConfig {
    /// `ell = delta^-rho`.
    pub rho: f64,
    pub zeta: String,
    /// Constant multiplying the `delta` corrections of the effective form.
    pub c_hat: f64,
    /// Terms kept in the norm expansion.
    pub norm_terms: usize,
}

impl Default for CurvedBoundConfig {
    fn default() -> Self {
        Self { rho: 0.5, zeta: "mollifier".into(), c_hat: 1.0, norm_terms: 6 }
    }
}

/// The tubular upper bound at one `delta`. Without positive mean curvature
/// no certificate is produced and the numeric fields are absent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvedBound {
    pub delta: f64,
    pub mean_curvature: f64,
    pub certified: bool,
    pub reason: Option<String>,
    /// Decay rate of the exponential envelope, `delta c1 mean / 2`.
    pub envelope_rate: Option<f64>,
    pub form: Option<TubularForm>,
    pub quotient: Option<f64>,
    pub gap: Option<f64>,
    /// `F_delta(g)` of the effective one-dimensional form.
    pub effective: Option<f64>,
    /// `theta0 + F_delta(g)` times the expanded inverse norm.
    pub model_quotient: Option<f64>,
    /// Closed-form target `c1^2 mean^2 / 4` of `gap / delta^2`.
    pub leading: f64,
}

pub fn curved_upper_bound(
    profile: &CurvatureProfile,
    delta: f64,
    config: &CurvedBoundConfig,
    constants: &UniversalConstants,
    ground: &DeGennesSolution,
) -> Result<CurvedBound> {
    if !(delta > 0.0 && config.rho > 0.0) {
        return Err(Error::Config(format!("need delta, rho > 0 (got {delta}, {})", config.rho)));
    }
    let mean = profile.mean;
    let c1 = constants.c1;
    let mut out = CurvedBound {
        delta,
        mean_curvature: mean,
        certified: false,
        reason: None,
        envelope_rate: None,
        form: None,
        quotient: None,
        gap: None,
        effective: None,
        model_quotient: None,
        leading: 0.25 * c1 * c1 * mean * mean,
    };
    if !(mean > 0.0) {
        out.reason = Some(format!("mean curvature {mean:e} is not positive; no bound below theta0"));
        out.leading = 0.0;
        return Ok(out);
    }
    let rate = 0.5 * delta * c1 * mean;
    let envelope: Arc<dyn Envelope> = Arc::new(ExponentialEnvelope { rate });
    let state = TubularTrialState::new(delta, delta.powf(-config.rho), &config.zeta, envelope.clone(), constants, ground)?;
    let form = tubular_form(profile, &state)?;
    let effective = effective_form(profile, envelope.as_ref(), delta, config.c_hat, c1);
    let inverse = norm_inverse_expansion(delta, constants.xi0, form.kappa_moment, config.norm_terms)?;
    out.certified = form.quotient < constants.theta0;
    if !out.certified {
        out.reason = Some(format!("quotient {:.12} is not below theta0", form.quotient));
    }
    out.envelope_rate = Some(rate);
    out.quotient = Some(form.quotient);
    out.gap = Some(constants.theta0 - form.quotient);
    out.effective = Some(effective);
    out.model_quotient = Some(constants.theta0 + effective * inverse);
    out.form = Some(form);
    Ok(out)
}

/// Bounds over a list of `delta`, computed in parallel in input order.
pub fn curved_sweep(
    profile: &CurvatureProfile,
    deltas: &[f64],
    config: &CurvedBoundConfig,
    constants: &UniversalConstants,
    ground: &DeGennesSolution,
) -> Result<Vec<CurvedBound>> {
    if deltas.is_empty() {
        return Err(Error::Config("empty delta sweep".into()));
    }
    deltas.par_iter().map(|&d| curved_upper_bound(profile, d, config, constants, ground)).collect()
}

/// Fit of `gap / delta^2` against `delta` over the certified points.
pub fn fit_curved_sweep(bounds: &[CurvedBound], theta0: f64) -> Result<DeltaSquaredFit> {
    let pts: Vec<(f64, f64)> = bounds.iter().filter_map(|b| b.quotient.filter(|_| b.certified).map(|q| (b.delta, q))).collect();
    fit_scaled_gaps(&pts, theta0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degennes::reference;
    use crate::registry::Args;

    #[test]
    fn negative_mean_gives_no_certificate() {
        let (c, sol) = reference();
        let p = CurvatureProfile::build("bump", &Args::new().with("mean", -1.0)).unwrap();
        let b = curved_upper_bound(&p, 1e-2, &CurvedBoundConfig::default(), c, sol).unwrap();
        assert!(!b.certified && b.quotient.is_none() && b.reason.is_some());
    }
}
