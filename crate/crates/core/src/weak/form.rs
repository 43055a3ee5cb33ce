use serde::Serialize;

use super::potential::PotentialProfile;
use crate::quad::{gauss20, uniform_breaks, with_splits};

/// Finest dyadic split toward a cusp at the origin.
const GRADING_DEPTH: i32 = 40;

/// `exp(-(y - center)^2 / (2 width^2)) (1 + weight |y|^exponent)`.
///
/// For `1/2 < exponent < 1` the cusp at the origin makes the function only
/// Hölder continuous of that order there, while it stays in `H^1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuspedGaussian {
    pub center: f64,
    pub width: f64,
    pub exponent: f64,
    pub weight: f64,
}

impl CuspedGaussian {
    pub fn eval(&self, y: f64) -> (f64, f64) {
        self.eval_with(y, true)
    }

    fn eval_with(&self, y: f64, cusp_slope: bool) -> (f64, f64) {
        let z = (y - self.center) / self.width;
        let g = (-0.5 * z * z).exp();
        let dg = -z / self.width * g;
        let a = y.abs();
        let cusp = 1.0 + self.weight * a.powf(self.exponent);
        let dcusp = if a > 0.0 && cusp_slope { self.weight * self.exponent * a.powf(self.exponent - 1.0) * y.signum() } else { 0.0 };
        (g * cusp, dg * cusp + g * dcusp)
    }

    pub fn value(&self, y: f64) -> f64 {
        self.eval(y).0
    }

    fn extent(&self) -> (f64, f64) {
        (self.center - 12.0 * self.width, self.center + 12.0 * self.width)
    }

    /// `int_{|y| < eps} |y|^(2p - 2)` weighted by the squared cusp
    /// coefficient: the part of `|psi'|^2` the graded rule leaves out.
    fn slope_tail(&self, eps: f64) -> f64 {
        let p = self.exponent;
        if p >= 1.0 || self.weight == 0.0 {
            return 0.0;
        }
        let c = self.value(0.0) * self.weight * p;
        2.0 * c * c * eps.powf(2.0 * p - 1.0) / (2.0 * p - 1.0)
    }

    /// Inside `|y| < eps` the singular slope is dropped; [`Self::slope_tail`]
    /// accounts for it.
    fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let (a, b) = self.extent();
        let eps = cusp_eps();
        graded(a, b, |y| {
            let (v, d) = self.eval_with(y, y.abs() >= eps);
            f(v, d)
        })
    }

    /// `|psi|^2_{H^1}`.
    pub fn h1_norm_sq(&self) -> f64 {
        self.integrate(|v, d| v * v + d * d) + self.slope_tail(cusp_eps())
    }

    /// `|psi psi'|_{L^2}`.
    pub fn product_norm(&self) -> f64 {
        let v0 = self.value(0.0);
        (self.integrate(|v, d| v * v * d * d) + v0 * v0 * self.slope_tail(cusp_eps())).sqrt()
    }
}

fn cusp_eps() -> f64 {
    2f64.powi(-GRADING_DEPTH)
}

/// Composite Gauss over `[a, b]` with dyadic splits accumulating at 0.
fn graded(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut splits = vec![0.0];
    for k in 0..=GRADING_DEPTH {
        let s = 2f64.powi(-k);
        splits.extend([s, -s]);
    }
    let breaks = with_splits(uniform_breaks(a, b, (b - a) / 256.0), &splits);
    gauss20().composite(&breaks, 1, f)
}

/// `int V(y) (|psi(delta y)|^2 - |psi(0)|^2) dy`, which equals
/// `p_delta(psi) - p_eff(psi)`.
pub fn form_difference(profile: &PotentialProfile, psi: &CuspedGaussian, delta: f64) -> f64 {
    let (a, b) = profile.support();
    let v0 = psi.value(0.0);
    let breaks = {
        let mut splits = vec![0.0];
        for k in 0..=GRADING_DEPTH {
            let s = 2f64.powi(-k) * (b - a);
            splits.extend([s, -s]);
        }
        with_splits(profile.breaks(a, b, 64), &splits)
    };
    gauss20().composite(&breaks, 1, |y| {
        let v = psi.value(delta * y);
        profile.value(y) * (v * v - v0 * v0)
    })
}

/// Worst ratio `|p_delta - p_eff| / |psi|^2_{H^1}` over a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormComparison {
    pub delta: f64,
    pub ratios: Vec<f64>,
    pub max: f64,
    pub worst: usize,
    /// `max / delta^(1/2)`.
    pub constant: f64,
}

pub fn form_comparison(profile: &PotentialProfile, delta: f64, family: &[CuspedGaussian]) -> FormComparison {
    let ratios: Vec<f64> = family.iter().map(|psi| form_difference(profile, psi, delta).abs() / psi.h1_norm_sq()).collect();
    let (worst, max) = ratios.iter().copied().enumerate().fold((0, 0.0), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    FormComparison { delta, max, worst, constant: max / delta.sqrt(), ratios }
}

/// Twenty Gaussian profiles with cusp exponents from 0.55 to 1.5 at the
/// origin, varied centres and widths.
pub fn default_family() -> Vec<CuspedGaussian> {
    (0..20)
        .map(|k| {
            let k = k as f64;
            CuspedGaussian { center: 0.4 * k.sin(), width: 0.6 + 0.1 * k, exponent: 0.55 + 0.05 * k, weight: 1.0 + 0.1 * k }
        })
        .collect()
}

/// Largest excess of `|psi(delta y)^2 - psi(0)^2|` over
/// `2 delta^(1/2) |psi psi'| |y|^(1/2)` on the samples; non-positive when
/// the pointwise estimate holds.
pub fn pointwise_estimate_excess(psi: &CuspedGaussian, delta: f64, samples: &[f64]) -> f64 {
    let v0 = psi.value(0.0);
    let bound = 2.0 * delta.sqrt() * psi.product_norm();
    samples
        .iter()
        .map(|&y| (psi.value(delta * y).powi(2) - v0 * v0).abs() - bound * y.abs().sqrt())
        .fold(f64::NEG_INFINITY, f64::max)
}
