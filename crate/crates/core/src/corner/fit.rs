use rayon::prelude::*;
use serde::Serialize;

use super::energy::{corner_upper_bound, CornerBound};
use super::geometry::CornerTrialConfig;
use super::profiles::exponential;
use super::trial::assemble_trial_state;
use crate::degennes::{DeGennesSolution, UniversalConstants};
use crate::error::{Error, Result};
use crate::gapfit::{fit_scaled_gaps, DeltaSquaredFit};

/// `(a^2 - d a) / (1 + 2 epsilon a)`: the leading quotient shift of the
/// exponential cutoff with rate `a`.
pub fn exponential_functional(alpha: f64, epsilon: f64, d: f64) -> f64 {
    (alpha * alpha - d * alpha) / (1.0 + 2.0 * epsilon * alpha)
}

/// Best exponential cutoff and the simplified rate `C1 delta / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaOptimum {
    pub d: f64,
    pub epsilon: f64,
    pub best_rate: f64,
    pub best_value: f64,
    pub simple_rate: f64,
    pub simple_value: f64,
    pub simple_norm_sq: f64,
    pub simple_slope_norm_sq: f64,
}

pub fn optimize_eta(delta: f64, epsilon: f64, c1: f64) -> Result<EtaOptimum> {
    if !(delta > 0.0 && epsilon > 0.0 && c1 > 0.0) {
        return Err(Error::Config(format!("need delta, epsilon, c1 > 0 (got {delta}, {epsilon}, {c1})")));
    }
    let d = c1 * delta;
    // Rationalized form of (sqrt(1 + 2 eps d) - 1) / (2 eps), stable as d -> 0.
    let best_rate = d / (1.0 + (1.0 + 2.0 * epsilon * d).sqrt());
    let simple_rate = 0.5 * d;
    Ok(EtaOptimum {
        d,
        epsilon,
        best_rate,
        best_value: exponential_functional(best_rate, epsilon, d),
        simple_rate,
        simple_value: exponential_functional(simple_rate, epsilon, d),
        simple_norm_sq: epsilon + 1.0 / d,
        simple_slope_norm_sq: 0.25 * d,
    })
}

/// Upper bound at one `delta` with the default scalings and the best
/// exponential cutoff.
pub fn corner_bound_at(config: &CornerTrialConfig, constants: &UniversalConstants, ground: &DeGennesSolution) -> Result<CornerBound> {
    let trial = assemble_trial_state(config, constants, ground)?;
    let eta = optimize_eta(config.delta, config.epsilon, constants.c1)?;
    corner_upper_bound(&trial, exponential(config.epsilon, eta.best_rate)?.as_ref())
}

/// Bounds over a list of configurations, computed in parallel and returned
/// in input order.
pub fn corner_sweep(
    configs: &[CornerTrialConfig],
    constants: &UniversalConstants,
    ground: &DeGennesSolution,
) -> Result<Vec<CornerBound>> {
    if configs.is_empty() {
        return Err(Error::Config("empty delta sweep".into()));
    }
    configs.par_iter().map(|c| corner_bound_at(c, constants, ground)).collect()
}

/// Fits the scaled gaps `(theta0 - quotient) / delta^2` of a sweep given as
/// `(delta, quotient)` pairs against `delta^(1/2)`.
pub fn fit_delta_squared_coefficient(sweep: &[(f64, f64)], theta0: f64) -> Result<DeltaSquaredFit> {
    fit_scaled_gaps(sweep, theta0, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn best_rate_is_stationary() {
        let o = optimize_eta(1e-2, 1.0, 0.25).unwrap();
        let h = 1e-7;
        let f = |a| exponential_functional(a, 1.0, o.d);
        assert!(f(o.best_rate) <= f(o.best_rate + h) && f(o.best_rate) <= f(o.best_rate - h));
        assert!(o.best_value <= o.simple_value);
    }

    #[test]
    fn fit_rejects_bad_sweeps() {
        let short = [(1e-3, 0.5), (1e-2, 0.4), (2e-2, 0.3)];
        assert!(matches!(fit_delta_squared_coefficient(&short, 0.6), Err(Error::Data(_))));
        let narrow = [(1e-3, 0.59), (2e-3, 0.58), (3e-3, 0.57), (4e-3, 0.56)];
        assert!(matches!(fit_delta_squared_coefficient(&narrow, 0.6), Err(Error::Data(_))));
        let above = [(1e-3, 0.61), (3e-3, 0.58), (1e-2, 0.57), (3e-2, 0.56)];
        assert!(matches!(fit_delta_squared_coefficient(&above, 0.6), Err(Error::Data(_))));
    }
}
