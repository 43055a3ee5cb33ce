//! Uniform half-line grid and the finite-difference schemes for
//! `-u'' + (t - xi)^2 u` with a Neumann condition at `t = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::registry::{Args, Registry};
use crate::tridiag::Tridiag;

/// Smallest truncation length accepted by [`HalfLineGrid::new`].
pub const MIN_TMAX: f64 = 15.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfLineGrid {
    pub t_max: f64,
    pub n: usize,
    pub scheme: String,
}

impl HalfLineGrid {
    /// Validated grid. `n` must be odd (composite Simpson) and `t_max >= 15`.
    pub fn new(t_max: f64, n: usize, scheme: &str) -> Result<Self> {
        if t_max < MIN_TMAX {
            return Err(Error::Config(format!("t_max = {t_max} is below the minimum {MIN_TMAX}")));
        }
        Self::unchecked(t_max, n, scheme)
    }

    /// Grid without the truncation-length floor, for diagnostics on short
    /// domains.
    pub fn unchecked(t_max: f64, n: usize, scheme: &str) -> Result<Self> {
        if n < 5 || n % 2 == 0 {
            return Err(Error::Config(format!("node count {n} must be odd and at least 5")));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::Config(format!("invalid t_max {t_max}")));
        }
        if !schemes().contains(scheme) {
            return Err(Error::UnknownStrategy {
                kind: "half-line scheme",
                name: scheme.to_string(),
                available: schemes().names().join(", "),
            });
        }
        Ok(Self { t_max, n, scheme: scheme.to_string() })
    }

    /// Default reference grid: `t_max = 20`, 4001 nodes, fourth order.
    pub fn reference() -> Self {
        Self { t_max: 20.0, n: 4001, scheme: "fd4".into() }
    }

    pub fn spacing(&self) -> f64 {
        self.t_max / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.t_max
        } else {
            i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Same spacing, longer domain. The node count is rounded up to keep it odd.
    pub fn extended_to(&self, t_max: f64) -> Self {
        if t_max <= self.t_max {
            return self.clone();
        }
        let h = self.spacing();
        let mut intervals = (t_max / h).ceil() as usize;
        if intervals % 2 == 1 {
            intervals += 1;
        }
        Self { t_max: h * intervals as f64, n: intervals + 1, scheme: self.scheme.clone() }
    }

    pub fn scheme(&self) -> Box<dyn HalfLineScheme> {
        schemes().build(&self.scheme, &Args::new()).expect("validated at construction")
    }
}

/// A discretization of the half-line oscillator. Unknowns are the nodes
/// `0..n-1`; the last node carries a homogeneous Dirichlet value.
pub trait HalfLineScheme: Send + Sync {
    fn name(&self) -> &'static str;

    /// Formal convergence order of eigenvalues.
    fn order(&self) -> u32;

    /// Pencil `(A, B)` with `A u = mu B u` on the `n - 1` free nodes.
    fn pencil(&self, grid: &HalfLineGrid, xi: f64) -> (Tridiag, Tridiag);

    /// `(A u, B u)` for the pencil of [`HalfLineScheme::pencil`], with the
    /// Laplacian taken in difference form so no large terms cancel.
    fn apply(&self, grid: &HalfLineGrid, xi: f64, u: &[f64]) -> (Vec<f64>, Vec<f64>);
}

/// Second difference `u[i-1] - 2 u[i] + u[i+1]` built from first differences,
/// with `u = 0` past the end and `left` as the value at `i = -1`.
fn second_difference(u: &[f64], i: usize, left: f64) -> f64 {
    let prev = if i == 0 { left } else { u[i - 1] };
    let next = u.get(i + 1).copied().unwrap_or(0.0);
    (next - u[i]) - (u[i] - prev)
}

/// Three-point Laplacian with the reflected ghost node, symmetrized by
/// halving the boundary row.
#[derive(Debug, Clone, Copy)]
pub struct SecondOrder;

impl HalfLineScheme for SecondOrder {
    fn name(&self) -> &'static str {
        "fd2"
    }

    fn order(&self) -> u32 {
        2
    }

    fn pencil(&self, grid: &HalfLineGrid, xi: f64) -> (Tridiag, Tridiag) {
        let m = grid.n - 1;
        let h = grid.spacing();
        let ih2 = 1.0 / (h * h);
        let mut a = Tridiag::zeros(m);
        let mut b = Tridiag::identity(m);
        for i in 0..m {
            let t = grid.node(i);
            a.diag[i] = 2.0 * ih2 + (t - xi).powi(2);
            if i + 1 < m {
                a.upper[i] = -ih2;
                a.lower[i] = -ih2;
            }
        }
        a.diag[0] = ih2 + 0.5 * xi * xi;
        b.diag[0] = 0.5;
        (a, b)
    }

    fn apply(&self, grid: &HalfLineGrid, xi: f64, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let h = grid.spacing();
        let ih2 = 1.0 / (h * h);
        let mut au: Vec<f64> = (0..u.len())
            .map(|i| -second_difference(u, i, u.get(1).copied().unwrap_or(0.0)) * ih2 + (grid.node(i) - xi).powi(2) * u[i])
            .collect();
        let mut bu = u.to_vec();
        au[0] *= 0.5;
        bu[0] *= 0.5;
        (au, bu)
    }
}

/// Numerov scheme. The ghost value at `-h` uses the Neumann Taylor
/// expansion `u(-h) = u(h) + (2 xi h^3 / 3) u(0)`, which keeps the boundary
/// row consistent to the order of the interior.
#[derive(Debug, Clone, Copy)]
pub struct Numerov;

impl HalfLineScheme for Numerov {
    fn name(&self) -> &'static str {
        "fd4"
    }

    fn order(&self) -> u32 {
        4
    }

    fn pencil(&self, grid: &HalfLineGrid, xi: f64) -> (Tridiag, Tridiag) {
        let m = grid.n - 1;
        let h = grid.spacing();
        let ih2 = 1.0 / (h * h);
        let pot = |t: f64| (t - xi).powi(2);
        let mut a = Tridiag::zeros(m);
        let mut b = Tridiag::zeros(m);
        for i in 0..m {
            let t = grid.node(i);
            a.diag[i] = 2.0 * ih2 + 10.0 * pot(t) / 12.0;
            b.diag[i] = 10.0 / 12.0;
            if i + 1 < m {
                a.upper[i] = -ih2 + pot(t + h) / 12.0;
                b.upper[i] = 1.0 / 12.0;
            }
            if i > 0 {
                a.lower[i - 1] = -ih2 + pot(t - h) / 12.0;
                b.lower[i - 1] = 1.0 / 12.0;
            }
        }
        let ghost = 2.0 * xi * h.powi(3) / 3.0;
        let v_ghost = pot(-h);
        a.diag[0] = (2.0 - ghost) * ih2 + (v_ghost * ghost + 10.0 * pot(0.0)) / 12.0;
        b.diag[0] = (10.0 + ghost) / 12.0;
        if m > 1 {
            a.upper[0] = -2.0 * ih2 + (v_ghost + pot(h)) / 12.0;
            b.upper[0] = 2.0 / 12.0;
        }
        (a, b)
    }

    fn apply(&self, grid: &HalfLineGrid, xi: f64, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let h = grid.spacing();
        let ih2 = 1.0 / (h * h);
        let pot = |t: f64| (t - xi).powi(2);
        let at = |i: usize| u.get(i).copied().unwrap_or(0.0);
        let ghost = at(1) + 2.0 * xi * h.powi(3) / 3.0 * u[0];
        let n = u.len();
        let mut au = Vec::with_capacity(n);
        let mut bu = Vec::with_capacity(n);
        for i in 0..n {
            let t = grid.node(i);
            let prev = if i == 0 { ghost } else { u[i - 1] };
            let next = at(i + 1);
            let lap = -second_difference(u, i, ghost) * ih2;
            au.push(lap + (pot(t - h) * prev + 10.0 * pot(t) * u[i] + pot(t + h) * next) / 12.0);
            bu.push((prev + 10.0 * u[i] + next) / 12.0);
        }
        (au, bu)
    }
}

/// Registry of half-line schemes: `fd2`, `fd4`.
pub fn schemes() -> &'static Registry<dyn HalfLineScheme> {
    use std::sync::OnceLock;
    static REG: OnceLock<Registry<dyn HalfLineScheme>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn HalfLineScheme> = Registry::new("half-line scheme");
        r.register("fd2", "three-point Laplacian, second order", |_| Ok(Box::new(SecondOrder)));
        r.register("fd4", "Numerov, fourth order", |_| Ok(Box::new(Numerov)));
        r
    })
}

/// Finite-difference derivative of grid samples of a Neumann solution of the
/// oscillator at `xi`. Values beyond `t_max` are taken as zero.
///
/// `order = 4` uses the five-point stencil with ghost values
/// `u(-x) = u(x) + (2 xi x^3 / 3) u(0)`; `order = 2` uses central differences
/// with plain reflection.
pub fn derivative(values: &[f64], h: f64, xi: f64, order: u32) -> Vec<f64> {
    let n = values.len();
    let u0 = values[0];
    let at = |i: isize| -> f64 {
        if i < 0 {
            let k = (-i) as usize;
            let x = k as f64 * h;
            let mirrored = values.get(k).copied().unwrap_or(0.0);
            if order >= 4 {
                mirrored + 2.0 * xi * x.powi(3) / 3.0 * u0
            } else {
                mirrored
            }
        } else {
            values.get(i as usize).copied().unwrap_or(0.0)
        }
    };
    (0..n as isize)
        .map(|i| {
            if order >= 4 {
                (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h)
            } else {
                (at(i + 1) - at(i - 1)) / (2.0 * h)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(HalfLineGrid::new(10.0, 101, "fd4").is_err());
        assert!(HalfLineGrid::new(20.0, 100, "fd4").is_err());
        assert!(HalfLineGrid::new(20.0, 101, "fd6").is_err());
        let g = HalfLineGrid::new(20.0, 101, "fd2").unwrap();
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(100), 20.0);
        assert!((g.spacing() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn extension_keeps_spacing() {
        let g = HalfLineGrid::reference();
        let e = g.extended_to(31.7);
        assert_eq!(e.n % 2, 1);
        assert!((e.spacing() - g.spacing()).abs() < 1e-15);
        assert!(e.t_max >= 31.7);
    }

    #[test]
    fn fd2_pencil_is_symmetric() {
        let g = HalfLineGrid::new(15.0, 31, "fd2").unwrap();
        let (a, b) = SecondOrder.pencil(&g, 0.7);
        assert!(a.is_symmetric() && b.is_symmetric());
    }

    #[test]
    fn fourth_order_derivative_of_neumann_function() {
        // u(t) = exp(-(t - xi)^2 / 2) has u'(0) = xi e^{-xi^2/2} != 0, so use a
        // function with u'(0) = 0 and u'''(0) = -2 xi u(0) as the stencil assumes.
        let xi: f64 = 0.7;
        let u = |t: f64| (1.0 - xi * t.powi(3) / 3.0) * (-t * t).exp();
        let du = |t: f64| (-xi * t * t - 2.0 * t * (1.0 - xi * t.powi(3) / 3.0)) * (-t * t).exp();
        let max_err = |h: f64| {
            let vals: Vec<f64> = (0..=(12.0 / h) as usize).map(|i| u(i as f64 * h)).collect();
            let d = derivative(&vals, h, xi, 4);
            (0..(6.0 / h) as usize).map(|i| (d[i] - du(i as f64 * h)).abs()).fold(0.0, f64::max)
        };
        let (coarse, fine) = (max_err(0.01), max_err(0.005));
        assert!(coarse < 1e-7, "err = {coarse}");
        assert!(coarse / fine > 12.0, "ratio {}", coarse / fine);
    }
}
