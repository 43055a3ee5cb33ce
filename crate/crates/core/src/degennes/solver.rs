use serde::{Deserialize, Serialize};

use super::grid::{derivative, HalfLineGrid};
use crate::error::{Error, Result};
use crate::quad::simpson_weights;
use crate::tridiag::lowest_eigenpair;

/// Tail mass above which a solution is considered truncated.
pub const TAIL_LIMIT: f64 = 1e-10;

/// Ground state of the half-line oscillator at one value of `xi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeGennesSolution {
    pub xi: f64,
    pub mu: f64,
    /// Samples on every grid node, the last one being the Dirichlet zero.
    pub eigenfunction: Vec<f64>,
    pub grid: HalfLineGrid,
    pub iterations: usize,
}

impl DeGennesSolution {
    pub fn spacing(&self) -> f64 {
        self.grid.spacing()
    }

    pub fn weights(&self) -> Vec<f64> {
        simpson_weights(self.grid.n, self.spacing())
    }

    /// Integral of `w(t) f(t)^2` by composite Simpson.
    pub fn integrate_squared<W: Fn(f64) -> f64>(&self, w: W) -> f64 {
        self.weights()
            .iter()
            .zip(&self.eigenfunction)
            .enumerate()
            .map(|(i, (q, f))| q * w(self.grid.node(i)) * f * f)
            .sum()
    }

    /// Derivative samples at the requested order (2 or 4).
    pub fn derivative(&self, order: u32) -> Vec<f64> {
        derivative(&self.eigenfunction, self.spacing(), self.xi, order)
    }

    /// Derivative samples at the order of the generating scheme.
    pub fn scheme_derivative(&self) -> Vec<f64> {
        self.derivative(self.grid.scheme().order())
    }

    /// Mass of the normalized ground state on `[t_max / 2, t_max]`, by the
    /// trapezoid rule.
    pub fn tail_mass(&self) -> f64 {
        let h = self.spacing();
        let start = (self.grid.t_max / 2.0 / h).ceil() as usize;
        let f = &self.eigenfunction[start..];
        let sq: f64 = f.iter().map(|v| v * v).sum();
        h * (sq - 0.5 * (f[0] * f[0] + f[f.len() - 1] * f[f.len() - 1]))
    }
}

/// Lowest eigenpair of the Neumann oscillator `-d^2/dt^2 + (t - xi)^2` on
/// the grid, checked for truncation.
pub fn solve_h_xi(xi: f64, grid: &HalfLineGrid) -> Result<DeGennesSolution> {
    let sol = solve_untruncated(xi, grid)?;
    let tail = sol.tail_mass();
    if tail > TAIL_LIMIT {
        return Err(Error::Truncation { tail_mass: tail, limit: TAIL_LIMIT });
    }
    Ok(sol)
}

/// As [`solve_h_xi`] without the truncation check.
pub fn solve_untruncated(xi: f64, grid: &HalfLineGrid) -> Result<DeGennesSolution> {
    if !xi.is_finite() {
        return Err(Error::Config(format!("non-finite xi {xi}")));
    }
    let scheme = grid.scheme();
    let (a, b) = scheme.pencil(grid, xi);
    // The spectrum is bounded below by 0, and the ground level never exceeds 1.
    let pair = lowest_eigenpair(&a, &b, 0.0)?;
    // Forming A - sigma B rounds at the scale of 1/h^2; a residual correction
    // with the operator in difference form restores the eigenvalue.
    let mut mu = pair.value;
    for _ in 0..2 {
        let (au, bu) = scheme.apply(grid, xi, &pair.vector);
        let num: f64 = pair.vector.iter().zip(au.iter().zip(&bu)).map(|(y, (p, q))| y * (p - mu * q)).sum();
        let den: f64 = pair.vector.iter().zip(&bu).map(|(y, q)| y * q).sum();
        mu += num / den;
    }
    let mut f = pair.vector;
    f.push(0.0);
    let w = simpson_weights(grid.n, grid.spacing());
    let norm: f64 = w.iter().zip(&f).map(|(q, v)| q * v * v).sum::<f64>().sqrt();
    f.iter_mut().for_each(|v| *v /= norm);
    Ok(DeGennesSolution { xi, mu, eigenfunction: f, grid: grid.clone(), iterations: pair.iterations })
}

/// Relative size below which grid samples of a ground state are not trusted
/// for decay-rate estimates.
pub const DECAY_FLOOR: f64 = 1e-30;

/// Diagnostics on the far tail of a ground state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub tail_mass: f64,
    /// `(t, -d log f / dt)` samples on `[t_max / 2, t_max)`.
    pub rates: Vec<(f64, f64)>,
    pub rate_increasing: bool,
    pub truncation_warning: bool,
}

impl DecayReport {
    /// Local decay rate at `t`, interpolated from the sampled rates.
    pub fn rate_at(&self, t: f64) -> Option<f64> {
        self.rates.windows(2).find(|w| w[0].0 <= t && t <= w[1].0).map(|w| {
            let s = (t - w[0].0) / (w[1].0 - w[0].0);
            w[0].1 + s * (w[1].1 - w[0].1)
        })
    }
}

/// Local decay rates of `log f` and the tail mass. Rates are sampled from
/// `t = 1` until the samples fall below [`DECAY_FLOOR`] times the peak or
/// come within one unit of `t_max`, past which the computed tail is rounding
/// noise or feels the Dirichlet end. Monotonicity is assessed on the part of
/// that range inside `[t_max / 2, t_max)`.
pub fn verify_tail_decay(solution: &DeGennesSolution) -> DecayReport {
    let grid = &solution.grid;
    let h = grid.spacing();
    let f = &solution.eigenfunction;
    let floor = DECAY_FLOOR * f.iter().cloned().fold(0.0, f64::max);
    let stride = ((0.25 / h).round() as usize).max(1);
    let stop = grid.t_max - 1.0;
    let mut rates = Vec::new();
    let mut i = ((1.0 / h).round() as usize).max(stride);
    while grid.node(i + stride) < stop {
        let (lo, hi) = (f[i - stride], f[i + stride]);
        if lo <= floor || hi <= floor {
            break;
        }
        rates.push((grid.node(i), -(hi.ln() - lo.ln()) / (2.0 * stride as f64 * h)));
        i += stride;
    }
    let half = grid.t_max / 2.0;
    let upper: Vec<f64> = rates.iter().filter(|(t, _)| *t >= half).map(|r| r.1).collect();
    let rate_increasing = upper.len() >= 2 && upper.windows(2).all(|w| w[1] > w[0]);
    let tail_mass = solution.tail_mass();
    DecayReport { tail_mass, rates, rate_increasing, truncation_warning: tail_mass > TAIL_LIMIT }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> HalfLineGrid {
        HalfLineGrid::new(20.0, n, "fd4").unwrap()
    }

    #[test]
    fn harmonic_level_at_zero() {
        let s = solve_h_xi(0.0, &grid(2001)).unwrap();
        assert!((s.mu - 1.0).abs() < 1e-9, "mu(0) = {}", s.mu);
        // Even extension of the Gaussian: f(0)^2 = 2 / sqrt(pi).
        let exact = (2.0 / std::f64::consts::PI.sqrt()).sqrt();
        assert!((s.eigenfunction[0] - exact).abs() < 1e-8);
    }

    #[test]
    fn normalized_and_positive() {
        let s = solve_h_xi(0.8, &grid(1001)).unwrap();
        assert!((s.integrate_squared(|_| 1.0) - 1.0).abs() < 1e-13);
        let n = s.eigenfunction.len();
        assert!(s.eigenfunction[..n - 1].iter().all(|v| *v > 0.0));
    }

    #[test]
    fn fourth_order_beats_second_order() {
        let exact = solve_h_xi(0.6, &grid(8001)).unwrap().mu;
        let g2 = HalfLineGrid::new(20.0, 401, "fd2").unwrap();
        let e2 = (solve_h_xi(0.6, &g2).unwrap().mu - exact).abs();
        let e4 = (solve_h_xi(0.6, &grid(401)).unwrap().mu - exact).abs();
        assert!(e4 < 1e-3 * e2, "fd2 {e2:e}, fd4 {e4:e}");
    }

    #[test]
    fn short_domain_is_flagged() {
        let g = HalfLineGrid::unchecked(6.0, 301, "fd4").unwrap();
        assert!(matches!(solve_h_xi(0.77, &g), Err(Error::Truncation { .. })));
        let s = solve_untruncated(0.77, &g).unwrap();
        assert!(verify_tail_decay(&s).truncation_warning);
    }
}
