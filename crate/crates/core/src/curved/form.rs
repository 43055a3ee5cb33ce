use std::sync::Arc;

use serde::Serialize;

use super::envelope::Envelope;
use super::profile::CurvatureProfile;
use crate::degennes::{moment, weighted_energy_identity, CutGroundState, CutoffProfile, DeGennesSolution, GroundState, UniversalConstants};
use crate::error::{Error, Result};
use crate::quad::{gauss20, uniform_breaks};

/// Largest admissible `delta ell max|kappa|`: the tube stays well inside the
/// focal set.
pub const TUBE_LIMIT: f64 = 0.5;

/// `psi(s, t) = f_ell(t) g(s)` in tubular coordinates around a boundary with
/// curvature `delta kappa`.
#[derive(Debug, Clone)]
pub struct TubularTrialState {
    pub delta: f64,
    pub ell: f64,
    pub envelope: Arc<dyn Envelope>,
    pub profile: CutGroundState,
    pub xi0: f64,
    pub theta0: f64,
}

impl TubularTrialState {
    pub fn new(
        delta: f64,
        ell: f64,
        zeta: &str,
        envelope: Arc<dyn Envelope>,
        constants: &UniversalConstants,
        ground: &DeGennesSolution,
    ) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::Config(format!("delta = {delta} must be positive")));
        }
        let profile = CutGroundState::new(GroundState::new(ground), CutoffProfile::new(ell, zeta)?);
        Ok(Self { delta, ell, envelope, profile, xi0: constants.xi0, theta0: constants.theta0 })
    }
}

/// Samples of the cut and uncut profiles on the transverse quadrature nodes.
struct Transverse {
    t: Vec<f64>,
    w: Vec<f64>,
    f: Vec<f64>,
    df: Vec<f64>,
    fs: Vec<f64>,
    dfs: Vec<f64>,
}

impl Transverse {
    fn new(p: &CutGroundState) -> Self {
        let mut out = Self { t: vec![], w: vec![], f: vec![], df: vec![], fs: vec![], dfs: vec![] };
        let breaks = uniform_breaks(0.0, p.support(), 0.125);
        for (t, w) in breaks.windows(2).flat_map(|ab| gauss20().mapped(ab[0], ab[1])) {
            let (f, df) = p.eval(t);
            let (fs, dfs) = p.ground.eval(t);
            out.t.push(t);
            out.w.push(w);
            out.f.push(f);
            out.df.push(df);
            out.fs.push(fs);
            out.dfs.push(dfs);
        }
        out
    }

    fn sum<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        (0..self.t.len()).map(|i| self.w[i] * f(i)).sum()
    }
}

/// Exact value of the tubular form on `psi` with its bounding terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubularForm {
    pub delta: f64,
    pub ell: f64,
    /// `int kappa g^2`.
    pub kappa_moment: f64,
    /// `int kappa^2 g^2`.
    pub kappa_square_moment: f64,
    pub envelope_norm_sq: f64,
    pub envelope_slope_norm_sq: f64,
    /// `int (1 - t delta kappa) |psi|^2`.
    pub norm_sq: f64,
    /// `int (1 - t delta kappa) |d_t psi|^2`.
    pub transverse: f64,
    /// `int (1 - t delta kappa)^-1 |(d_s - i A) psi|^2`.
    pub longitudinal: f64,
    /// `transverse + longitudinal - theta0 norm_sq`, accumulated directly.
    pub excess: f64,
    pub quotient: f64,
    /// `|f*'|^2 |g|^2 - delta int t f*'^2 int kappa g^2`.
    pub transverse_bound: f64,
    /// `|g'|^2 + |(t - xi0) f*|^2 |g|^2 + delta int kappa g^2 int ((xi0 - t) t^2 + t (t - xi0)^2) f*^2`.
    pub longitudinal_leading: f64,
    /// `|g|^2 - delta xi0 int kappa g^2`.
    pub norm_model: f64,
    /// `|g'|^2 + A delta int kappa g^2`.
    pub excess_model: f64,
    pub a_coefficient: f64,
    /// `int zeta_ell'^2 f*^2`.
    pub leak: f64,
}

impl TubularForm {
    pub fn transverse_slack(&self) -> f64 {
        self.transverse_bound - self.transverse
    }

    pub fn longitudinal_remainder(&self) -> f64 {
        self.longitudinal - self.longitudinal_leading
    }

    pub fn excess_remainder(&self) -> f64 {
        self.excess - self.excess_model
    }

    pub fn gap(&self) -> f64 {
        -self.excess / self.norm_sq
    }
}

/// Evaluates the tubular form by separating the transverse integrals: for each
/// curvature value on the longitudinal nodes the `t` integrals are summed
/// against the precomputed profile samples, and the flat part is added in
/// closed form.
pub fn tubular_form(profile: &CurvatureProfile, state: &TubularTrialState) -> Result<TubularForm> {
    let (delta, xi0, theta0) = (state.delta, state.xi0, state.theta0);
    let width = delta * state.ell * profile.max_abs();
    if width > TUBE_LIMIT {
        return Err(Error::Domain(format!(
            "tube too wide: delta ell max|kappa| = {width:.3} exceeds {TUBE_LIMIT}"
        )));
    }
    let tr = Transverse::new(&state.profile);
    let (t, f, df) = (&tr.t, &tr.f, &tr.df);

    let norm0 = tr.sum(|i| f[i] * f[i]);
    let kin0 = tr.sum(|i| df[i] * df[i]);
    let pot0 = tr.sum(|i| (t[i] - xi0).powi(2) * f[i] * f[i]);
    // Deviations from the flat integrands at curvature k.
    let curved = |k: f64| -> [f64; 3] {
        let dk = delta * k;
        let mut out = [0.0; 3];
        for i in 0..t.len() {
            let j = 1.0 - t[i] * dk;
            let ff = f[i] * f[i];
            let pot = (xi0 - t[i] + 0.5 * dk * t[i] * t[i]).powi(2) / j - (t[i] - xi0).powi(2);
            let e = -t[i] * dk * df[i] * df[i] + pot * ff;
            out[0] += tr.w[i] * (e + theta0 * t[i] * dk * ff);
            out[1] += tr.w[i] * (1.0 / j - 1.0) * ff;
            out[2] += tr.w[i] * (-t[i] * dk * df[i] * df[i]);
        }
        out
    };

    let env = &state.envelope;
    let (gn, gs) = (env.norm_sq(), env.slope_norm_sq());
    let (mut excess_dev, mut slope_dev, mut trans_dev) = (0.0, 0.0, 0.0);
    let (mut g_kappa, mut g_kappa2, mut norm_dev) = (0.0, 0.0, 0.0);
    for (s, w) in profile.nodes() {
        let k = profile.value(s);
        if k == 0.0 {
            continue;
        }
        let (g, dg) = env.eval(s);
        let [a, b, c] = curved(k);
        excess_dev += w * g * g * a;
        slope_dev += w * dg * dg * b;
        trans_dev += w * g * g * c;
        g_kappa += w * k * g * g;
        g_kappa2 += w * k * k * g * g;
        norm_dev += w * k * g * g;
    }
    let first_moment = tr.sum(|i| t[i] * f[i] * f[i]);
    let norm_sq = norm0 * gn - delta * first_moment * norm_dev;
    let transverse = kin0 * gn + trans_dev;
    let excess = (kin0 + pot0 - theta0 * norm0) * gn + norm0 * gs + excess_dev + slope_dev;
    let longitudinal = excess + theta0 * norm_sq - transverse;

    let (fs, dfs) = (&tr.fs, &tr.dfs);
    let star_slope = tr.sum(|i| dfs[i] * dfs[i]);
    let star_slope_t = tr.sum(|i| t[i] * dfs[i] * dfs[i]);
    let star_pot = tr.sum(|i| (t[i] - xi0).powi(2) * fs[i] * fs[i]);
    let star_mixed = tr.sum(|i| ((xi0 - t[i]) * t[i] * t[i] + t[i] * (t[i] - xi0).powi(2)) * fs[i] * fs[i]);
    let star_first = tr.sum(|i| t[i] * fs[i] * fs[i]);
    let a_coefficient = star_mixed - star_slope_t + theta0 * star_first;
    let leak = tr.sum(|i| (state.profile.cutoff.derivative(t[i]) * state.profile.ground.value(t[i])).powi(2));

    Ok(TubularForm {
        delta,
        ell: state.ell,
        kappa_moment: g_kappa,
        kappa_square_moment: g_kappa2,
        envelope_norm_sq: gn,
        envelope_slope_norm_sq: gs,
        norm_sq,
        transverse,
        longitudinal,
        excess,
        quotient: theta0 + excess / norm_sq,
        transverse_bound: star_slope * gn - delta * star_slope_t * g_kappa,
        longitudinal_leading: gs + star_pot * gn + delta * g_kappa * star_mixed,
        norm_model: gn - delta * xi0 * g_kappa,
        excess_model: gs + a_coefficient * delta * g_kappa,
        a_coefficient,
        leak,
    })
}

/// The coefficient `A` of `delta int kappa g^2` in the expanded excess, with
/// its two groupings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ACoefficient {
    /// Direct quadrature of `int ((xi0 - t) t^2 + t (t - xi0)^2) f^2 - t f'^2 + theta0 t f^2`.
    pub direct: f64,
    /// `-int (f'^2 + (xi0 - t)^2 f^2 - theta0 f^2) t`.
    pub first_grouping: f64,
    /// `int t (t - xi0)(t - 2 xi0) f^2`.
    pub second_grouping: f64,
}

impl ACoefficient {
    pub fn value(&self) -> f64 {
        self.first_grouping + self.second_grouping
    }
}

pub fn compute_a(ground: &DeGennesSolution) -> ACoefficient {
    let (xi, mu) = (ground.xi, ground.mu);
    let df = ground.derivative(4);
    let direct = ground
        .weights()
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let (t, f) = (ground.grid.node(i), ground.eigenfunction[i]);
            let pot = (xi - t) * t * t + t * (t - xi).powi(2) + mu * t;
            w * (pot * f * f - t * df[i] * df[i])
        })
        .sum();
    ACoefficient {
        direct,
        first_grouping: -weighted_energy_identity(ground),
        second_grouping: moment(ground, 1, Some(&[0.0, -2.0 * xi, 1.0])),
    }
}

/// `1 / (1 - x)` for `x = xi0 delta int kappa g^2`, summed to `x^terms`.
/// The series is only accepted while `2 |x| < 1`.
pub fn norm_inverse_expansion(delta: f64, xi0: f64, kappa_moment: f64, terms: usize) -> Result<f64> {
    let x = xi0 * delta * kappa_moment;
    if 2.0 * x.abs() >= 1.0 {
        return Err(Error::Domain(format!("norm expansion diverges: 2 xi0 delta int kappa g^2 = {:.3}", 2.0 * x)));
    }
    Ok((0..=terms).rev().fold(0.0, |acc, _| acc * x + 1.0))
}

/// `(1 + c delta) |g'|^2 + delta int (-c1 kappa + c delta kappa^2) g^2`.
pub fn effective_form(profile: &CurvatureProfile, envelope: &dyn Envelope, delta: f64, c_hat: f64, c1: f64) -> f64 {
    let curved = profile.integrate(|s, k| {
        let g = envelope.eval(s).0;
        (-c1 * k + c_hat * delta * k * k) * g * g
    });
    (1.0 + c_hat * delta) * envelope.slope_norm_sq() + delta * curved
}
