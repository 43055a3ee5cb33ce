use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::cutoff::CutoffProfile;
use super::grid::HalfLineGrid;
use super::solver::{solve_h_xi, DeGennesSolution};
use crate::error::{Error, Result};

/// Default search interval for the minimizer of `mu`.
pub const DEFAULT_BRACKET: (f64, f64) = (0.5, 1.2);

/// Step for the finite-difference derivatives of `mu` in `xi`.
const XI_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalConstants {
    pub theta0: f64,
    pub xi0: f64,
    pub c1: f64,
    pub mu_second: f64,
    /// Residual first derivative of `mu` at the computed minimizer.
    pub mu_first: f64,
    /// `int (t - xi0)^k f^2` for `k = 1, 2, 3`.
    pub moments: [f64; 3],
    /// `int (f'^2 + (xi0 - t)^2 f^2 - theta0 f^2) t`.
    pub weighted_energy: f64,
    /// `int (t - xi0) t (t - 2 xi0) f^2`.
    pub weighted_moment: f64,
    pub grid: HalfLineGrid,
}

/// Ground-state energy as a function of `xi` on a fixed grid.
fn mu_at(xi: f64, grid: &HalfLineGrid) -> Result<f64> {
    Ok(solve_h_xi(xi, grid)?.mu)
}

/// First and second derivatives of `mu` by five-point central stencils.
pub fn mu_derivatives(xi: f64, grid: &HalfLineGrid) -> Result<(f64, f64)> {
    let s = XI_STEP;
    let m: Vec<f64> = [-2.0, -1.0, 0.0, 1.0, 2.0]
        .iter()
        .map(|k| mu_at(xi + k * s, grid))
        .collect::<Result<_>>()?;
    let first = (m[0] - 8.0 * m[1] + 8.0 * m[3] - m[4]) / (12.0 * s);
    let second = (-m[0] + 16.0 * m[1] - 30.0 * m[2] + 16.0 * m[3] - m[4]) / (12.0 * s * s);
    Ok((first, second))
}

/// Minimizer of `mu` over the bracket: golden section down to a narrow
/// interval, then Newton steps on finite-difference derivatives.
pub fn locate_minimizer(grid: &HalfLineGrid, bracket: (f64, f64)) -> Result<f64> {
    let (a0, b0) = bracket;
    if !(a0 < b0) || a0 < 0.0 {
        return Err(Error::Config(format!("invalid bracket [{a0}, {b0}]")));
    }
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a0, b0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (mu_at(c, grid)?, mu_at(d, grid)?);
    while b - a > 1e-4 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = mu_at(c, grid)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = mu_at(d, grid)?;
        }
    }
    let mut x = 0.5 * (a + b);
    let margin = 1e-3 * (b0 - a0);
    if x - a0 < margin || b0 - x < margin {
        return Err(Error::Bracket { xi: x });
    }
    for _ in 0..8 {
        let (d1, d2) = mu_derivatives(x, grid)?;
        if d2 <= 0.0 {
            return Err(Error::Consistency(format!("mu'' = {d2} is not positive near xi = {x}")));
        }
        let step = d1 / d2;
        x -= step;
        if step.abs() < 1e-12 {
            break;
        }
    }
    if x - a0 < margin || b0 - x < margin {
        return Err(Error::Bracket { xi: x });
    }
    Ok(x)
}

/// `int (t - xi)^k w(t) f^2`, with `w` given by ascending polynomial
/// coefficients (`None` means `w = 1`).
pub fn moment(solution: &DeGennesSolution, k: i32, weight: Option<&[f64]>) -> f64 {
    let xi = solution.xi;
    solution.integrate_squared(|t| {
        let w = weight.map_or(1.0, |c| c.iter().rev().fold(0.0, |acc, a| acc * t + a));
        (t - xi).powi(k) * w
    })
}

/// `int (f'^2 + (xi - t)^2 f^2 - mu f^2) t` with the derivative taken at the
/// scheme's order.
pub fn weighted_energy_identity(solution: &DeGennesSolution) -> f64 {
    weighted_energy_with_order(solution, solution.grid.scheme().order())
}

/// As [`weighted_energy_identity`] with an explicit difference order.
///
/// At order 2 the kinetic term uses one-sided differences at cell midpoints
/// with the midpoint rule, the discrete energy of the three-point Laplacian;
/// the remaining terms use Simpson in both cases.
pub fn weighted_energy_with_order(solution: &DeGennesSolution, order: u32) -> f64 {
    let w = solution.weights();
    let (xi, mu) = (solution.xi, solution.mu);
    let f = &solution.eigenfunction;
    let grid = &solution.grid;
    let potential: f64 = (0..grid.n)
        .map(|i| {
            let t = grid.node(i);
            w[i] * t * ((xi - t).powi(2) - mu) * f[i] * f[i]
        })
        .sum();
    let kinetic: f64 = if order >= 4 {
        let df = solution.derivative(order);
        (0..grid.n).map(|i| w[i] * grid.node(i) * df[i] * df[i]).sum()
    } else {
        let h = grid.spacing();
        f.windows(2)
            .enumerate()
            .map(|(i, p)| {
                let slope = (p[1] - p[0]) / h;
                h * (grid.node(i) + 0.5 * h) * slope * slope
            })
            .sum()
    };
    potential + kinetic
}

/// Fills every constant from a ground state at the minimizer.
pub fn constants_from(solution: &DeGennesSolution) -> Result<UniversalConstants> {
    let (mu_first, mu_second) = mu_derivatives(solution.xi, &solution.grid)?;
    if mu_second <= 0.0 {
        return Err(Error::Consistency(format!("mu'' = {mu_second} is not positive")));
    }
    let xi0 = solution.xi;
    let f0 = solution.eigenfunction[0];
    Ok(UniversalConstants {
        theta0: solution.mu,
        xi0,
        c1: f0 * f0 / 3.0,
        mu_second,
        mu_first,
        moments: [moment(solution, 1, None), moment(solution, 2, None), moment(solution, 3, None)],
        weighted_energy: weighted_energy_identity(solution),
        weighted_moment: moment(solution, 1, Some(&[0.0, -2.0 * xi0, 1.0])),
        grid: solution.grid.clone(),
    })
}

/// Minimizer, constants and ground state in one pass.
pub fn calibrate(grid: &HalfLineGrid, bracket: (f64, f64)) -> Result<(UniversalConstants, DeGennesSolution)> {
    let xi0 = locate_minimizer(grid, bracket)?;
    let solution = solve_h_xi(xi0, grid)?;
    Ok((constants_from(&solution)?, solution))
}

pub fn find_theta0(grid: &HalfLineGrid, bracket: (f64, f64)) -> Result<UniversalConstants> {
    Ok(calibrate(grid, bracket)?.0)
}

/// Calibration on the reference grid, computed once per process.
pub fn reference() -> &'static (UniversalConstants, DeGennesSolution) {
    static REF: OnceLock<(UniversalConstants, DeGennesSolution)> = OnceLock::new();
    REF.get_or_init(|| calibrate(&HalfLineGrid::reference(), DEFAULT_BRACKET).expect("reference calibration"))
}

/// The cut-off ground state sampled on the grid, with its energy and moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutProfileSamples {
    pub ell: f64,
    pub values: Vec<f64>,
    pub norm_sq: f64,
    /// `int f_ell'^2 + (t - xi)^2 f_ell^2`.
    pub energy: f64,
    /// `energy - mu norm_sq`, computed as `int (zeta'(t / ell) / ell)^2 f^2`.
    pub excess: f64,
    /// `int (t - xi)^k f_ell^2`, `k = 1, 2, 3`.
    pub moments: [f64; 3],
    pub weighted_energy: f64,
    pub weighted_moment: f64,
}

pub fn build_f_ell(solution: &DeGennesSolution, cutoff: &CutoffProfile) -> Result<CutProfileSamples> {
    let grid = &solution.grid;
    if cutoff.ell > grid.t_max {
        return Err(Error::Domain(format!("cutoff scale {} exceeds t_max = {}", cutoff.ell, grid.t_max)));
    }
    let (xi, mu) = (solution.xi, solution.mu);
    let w = solution.weights();
    let df = solution.scheme_derivative();
    let mut out = CutProfileSamples {
        ell: cutoff.ell,
        values: Vec::with_capacity(grid.n),
        norm_sq: 0.0,
        energy: 0.0,
        excess: 0.0,
        moments: [0.0; 3],
        weighted_energy: 0.0,
        weighted_moment: 0.0,
    };
    for i in 0..grid.n {
        let t = grid.node(i);
        let f = solution.eigenfunction[i];
        let (z, dz) = (cutoff.value(t), cutoff.derivative(t));
        let v = z * f;
        let dv = z * df[i] + dz * f;
        let sq = w[i] * v * v;
        let kinetic = w[i] * (dv * dv + (t - xi).powi(2) * v * v);
        out.values.push(v);
        out.norm_sq += sq;
        out.energy += kinetic;
        out.excess += w[i] * dz * dz * f * f;
        for (k, m) in out.moments.iter_mut().enumerate() {
            *m += sq * (t - xi).powi(k as i32 + 1);
        }
        out.weighted_energy += t * (kinetic - mu * sq);
        out.weighted_moment += sq * (t - xi) * t * (t - 2.0 * xi);
    }
    Ok(out)
}
