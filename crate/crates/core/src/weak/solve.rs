use rayon::prelude::*;
use serde::Serialize;

use super::potential::PotentialProfile;
use crate::error::{Error, Result};
use crate::quad::gauss20;
use crate::tridiag::{lowest_symmetric, Tridiag};

/// Mass fraction allowed on the outer quarter of the window.
pub const TAIL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakCouplingConfig {
    /// Half-width `Y` of the window; defaults to `40 / |mean|`.
    pub window: Option<f64>,
    /// Number of uniform background nodes, ends included. A graded patch
    /// over the scaled support of the potential is added to them.
    pub n: usize,
}

impl Default for WeakCouplingConfig {
    fn default() -> Self {
        Self { window: None, n: 16001 }
    }
}

impl WeakCouplingConfig {
    pub fn window_for(&self, profile: &PotentialProfile) -> f64 {
        self.window.unwrap_or_else(|| if profile.mean != 0.0 { 40.0 / profile.mean.abs() } else { 40.0 })
    }
}

/// Lowest eigenvalue of the rescaled operator `-d^2 + delta^-1 V(y / delta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakCouplingResult {
    pub delta: f64,
    pub window: f64,
    /// `None` when there is no negative eigenvalue.
    pub nu: Option<f64>,
    /// `delta^2 nu`, the eigenvalue of `-d^2 + delta V`.
    pub unscaled: Option<f64>,
    /// `-mean^2 / 4` when the mean is negative.
    pub effective: Option<f64>,
    /// Nodal values normalized in `L^2`, zero at both ends; empty without binding.
    #[serde(skip)]
    pub ground_state: Vec<f64>,
    #[serde(skip)]
    pub nodes: Vec<f64>,
}

impl WeakCouplingResult {
    pub fn gap(&self) -> Option<f64> {
        Some(self.nu? - self.effective?)
    }
}

/// Panels across the rescaled support of the potential.
const SUPPORT_PANELS: f64 = 64.0;
/// Growth factor of the spacing between the support and the background.
const GRADING: f64 = 1.1;

/// Uniform background nodes on `[-window, window]` with a graded patch
/// resolving `[lo, hi]`, the support of the scaled potential.
pub fn graded_mesh(window: f64, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let background = 2.0 * window / (n - 1) as f64;
    let fine = ((hi - lo) / SUPPORT_PANELS).min(background);
    let mut inner: Vec<f64> = (0..=SUPPORT_PANELS as usize).map(|k| lo + (hi - lo) * k as f64 / SUPPORT_PANELS).collect();
    let (mut left, mut right) = (vec![], vec![]);
    let (mut step, mut a, mut b) = (fine, lo, hi);
    while step < background {
        step = (step * GRADING).min(background);
        a -= step;
        b += step;
        left.push(a);
        right.push(b);
    }
    let mut nodes: Vec<f64> = (0..n).map(|i| -window + background * i as f64).filter(|&y| y < a - 0.5 * background || y > b + 0.5 * background).collect();
    nodes.extend(left.into_iter().filter(|&y| y > -window));
    nodes.extend(right.into_iter().filter(|&y| y < window));
    nodes.append(&mut inner);
    nodes.push(window);
    nodes.push(-window);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    nodes
}

/// P1 pencil of `-d^2 + amplitude V(y / scale)` on the given nodes with
/// Dirichlet ends. Only interior nodes are unknowns.
fn assemble(profile: &PotentialProfile, scale: f64, amplitude: f64, nodes: &[f64]) -> (Tridiag, Tridiag) {
    let m = nodes.len() - 2;
    let (mut a, mut b) = (Tridiag::zeros(m), Tridiag::zeros(m));
    let (sa, sb) = profile.support();
    let (lo, hi) = (scale * sa, scale * sb);
    let rule = gauss20();
    for e in 0..nodes.len() - 1 {
        let (y0, y1) = (nodes[e], nodes[e + 1]);
        let h = y1 - y0;
        let mut local = [1.0 / h, -1.0 / h, 1.0 / h];
        let mass = [h / 3.0, h / 6.0, h / 3.0];
        let (x0, x1) = (y0.max(lo) / scale, y1.min(hi) / scale);
        if x1 > x0 {
            for w in profile.breaks(x0, x1, 4).windows(2) {
                for (x, wt) in rule.mapped(w[0], w[1]) {
                    let u = (scale * x - y0) / h;
                    let v = amplitude * profile.value(x) * scale * wt;
                    local[0] += v * (1.0 - u) * (1.0 - u);
                    local[1] += v * (1.0 - u) * u;
                    local[2] += v * u * u;
                }
            }
        }
        // Element e joins nodes e and e + 1, i.e. unknowns e - 1 and e.
        if e >= 1 {
            a.diag[e - 1] += local[0];
            b.diag[e - 1] += mass[0];
        }
        if e < m {
            a.diag[e] += local[2];
            b.diag[e] += mass[2];
        }
        if e >= 1 && e < m {
            a.upper[e - 1] += local[1];
            a.lower[e - 1] += local[1];
            b.upper[e - 1] += mass[1];
            b.lower[e - 1] += mass[1];
        }
    }
    (a, b)
}

fn lowest(profile: &PotentialProfile, scale: f64, amplitude: f64, nodes: &[f64]) -> Result<Option<(f64, Vec<f64>)>> {
    if nodes.len() < 5 {
        return Err(Error::Config(format!("need at least 5 nodes, got {}", nodes.len())));
    }
    let (a, b) = assemble(profile, scale, amplitude, nodes);
    let floor = amplitude * profile.min_value().min(0.0) - 1.0;
    let Some(pair) = lowest_symmetric(&a, &b, floor, 0.0)? else {
        return Ok(None);
    };
    let bv = b.matvec(&pair.vector);
    let norm: f64 = pair.vector.iter().zip(&bv).map(|(p, q)| p * q).sum::<f64>().sqrt();
    let mut psi = vec![0.0; nodes.len()];
    for (i, v) in pair.vector.iter().enumerate() {
        psi[i + 1] = v / norm;
    }
    let window = nodes[nodes.len() - 1];
    let outer: f64 = (0..nodes.len() - 1)
        .filter(|&i| nodes[i].abs() > 0.75 * window)
        .map(|i| 0.5 * (nodes[i + 1] - nodes[i]) * (psi[i] * psi[i] + psi[i + 1] * psi[i + 1]))
        .sum();
    if outer > TAIL_LIMIT {
        return Err(Error::Truncation { tail_mass: outer, limit: TAIL_LIMIT });
    }
    Ok(Some((pair.value, psi)))
}

fn mesh_for(profile: &PotentialProfile, delta: f64, config: &WeakCouplingConfig) -> Result<Vec<f64>> {
    if !(delta > 0.0) {
        return Err(Error::Config(format!("delta = {delta} must be positive")));
    }
    if config.n < 5 {
        return Err(Error::Config(format!("need at least 5 nodes, got {}", config.n)));
    }
    let (a, b) = profile.support();
    Ok(graded_mesh(config.window_for(profile), config.n, delta * a, delta * b))
}

pub fn solve_m_delta(profile: &PotentialProfile, delta: f64, config: &WeakCouplingConfig) -> Result<WeakCouplingResult> {
    let nodes = mesh_for(profile, delta, config)?;
    let found = lowest(profile, delta, 1.0 / delta, &nodes)?;
    let (nu, ground_state) = match found {
        Some((nu, psi)) => (Some(nu), psi),
        None => (None, Vec::new()),
    };
    Ok(WeakCouplingResult {
        delta,
        window: config.window_for(profile),
        nu,
        unscaled: nu.map(|v| delta * delta * v),
        effective: (profile.mean < 0.0).then(|| -0.25 * profile.mean * profile.mean),
        ground_state,
        nodes,
    })
}

/// Lowest eigenvalue of `-d^2 + delta V` solved directly on the window
/// `[-Y / delta, Y / delta]` matched to the rescaled problem.
pub fn solve_l_delta(profile: &PotentialProfile, delta: f64, config: &WeakCouplingConfig) -> Result<Option<f64>> {
    let nodes: Vec<f64> = mesh_for(profile, delta, config)?.iter().map(|y| y / delta).collect();
    Ok(lowest(profile, 1.0, delta, &nodes)?.map(|(v, _)| v))
}

pub fn weak_sweep(profile: &PotentialProfile, deltas: &[f64], config: &WeakCouplingConfig) -> Result<Vec<WeakCouplingResult>> {
    if deltas.is_empty() {
        return Err(Error::Config("empty delta sweep".into()));
    }
    deltas.par_iter().map(|&d| solve_m_delta(profile, d, config)).collect()
}

/// Least-squares slope of `log |nu - effective|` against `log delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Whether `nu` decreases monotonically as `delta` decreases.
    pub monotone: bool,
}

pub fn fit_convergence(results: &[WeakCouplingResult]) -> Result<ConvergenceFit> {
    let mut pts: Vec<(f64, f64)> = results.iter().filter_map(|r| Some((r.delta, r.gap()?, r.nu?))).map(|(d, g, _)| (d, g)).collect();
    if pts.len() < 3 {
        return Err(Error::Data(format!("need at least 3 bound states, got {}", pts.len())));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.iter().any(|p| p.1 == 0.0) {
        return Err(Error::Data("zero gap cannot be fitted on a log scale".into()));
    }
    let monotone = pts.windows(2).all(|w| w[0].1 < w[1].1);
    let xy: Vec<(f64, f64)> = pts.iter().map(|&(d, g)| (d.ln(), g.abs().ln())).collect();
    let k = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    Ok(ConvergenceFit { exponent, prefactor: (my - exponent * mx).exp(), monotone })
}

/// The delta-interaction limit: eigenvalue `-mean^2 / 4` with ground state
/// `sqrt(|mean| / 2) exp(mean |y| / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveSpectrum {
    pub mean: f64,
    /// `None` when the mean is not negative: the spectrum is `[0, inf)`.
    pub eigenvalue: Option<f64>,
}

impl EffectiveSpectrum {
    pub fn ground_state(&self, y: f64) -> Option<f64> {
        self.eigenvalue?;
        Some((0.5 * self.mean.abs()).sqrt() * (0.5 * self.mean * y.abs()).exp())
    }
}

pub fn effective_spectrum(profile: &PotentialProfile) -> EffectiveSpectrum {
    EffectiveSpectrum { mean: profile.mean, eigenvalue: (profile.mean < 0.0).then(|| -0.25 * profile.mean * profile.mean) }
}
