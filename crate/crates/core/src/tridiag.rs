//! Tridiagonal pencils `A - sigma B` and the lowest-eigenpair solvers built on
//! them. Used by the half-line oscillator, the weak-coupling problem, and the
//! fiber checks of the 2D solver.

use crate::error::{Error, Result};

/// A real tridiagonal matrix stored by diagonals. `lower[i]` sits at
/// `(i + 1, i)` and `upper[i]` at `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiag {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiag {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            upper: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        m.diag.iter_mut().for_each(|d| *d = 1.0);
        m
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.lower == self.upper
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// `self - sigma * other`.
    pub fn shifted(&self, sigma: f64, other: &Tridiag) -> Tridiag {
        let comb = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - sigma * y).collect();
        Tridiag {
            lower: comb(&self.lower, &other.lower),
            diag: comb(&self.diag, &other.diag),
            upper: comb(&self.upper, &other.upper),
        }
    }

    /// Thomas algorithm without pivoting. Fails on an exactly vanishing pivot.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0];
        if pivot == 0.0 {
            return Err(Error::Factorization { index: 0, detail: "zero pivot".into() });
        }
        if n > 1 {
            c[0] = self.upper[0] / pivot;
        }
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i - 1] * c[i - 1];
            if pivot == 0.0 {
                return Err(Error::Factorization { index: i, detail: "zero pivot".into() });
            }
            if i + 1 < n {
                c[i] = self.upper[i] / pivot;
            }
            d[i] = (rhs[i] - self.lower[i - 1] * d[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }

    /// Number of negative pivots of the LDL^T factorization of the symmetric
    /// matrix `self - sigma * mass` (Sylvester inertia).
    pub fn count_below(&self, sigma: f64, mass: &Tridiag) -> usize {
        let m = self.shifted(sigma, mass);
        let mut count = 0;
        let mut d = m.diag[0];
        for i in 0..m.len() {
            if i > 0 {
                let e = m.lower[i - 1];
                d = m.diag[i] - e * e / d;
            }
            if d == 0.0 {
                d = -f64::EPSILON * (1.0 + m.diag[i].abs());
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// Converged lowest eigenpair of a pencil.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

const MAX_ITER: usize = 500;

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Lowest eigenpair of `A v = mu B v` by shift-invert iteration started from
/// the all-ones vector. `lower_bound` must lie below the lowest eigenvalue.
///
/// Once the fixed-shift phase settles, the shift moves to just below the
/// estimate and the iteration runs until the estimate stops improving.
/// The pencil does not have to be symmetric, which covers the Numerov
/// discretization. The returned vector is normalized in the Euclidean norm
/// and has a positive sum.
pub fn lowest_eigenpair(a: &Tridiag, b: &Tridiag, lower_bound: f64) -> Result<Eigenpair> {
    let n = a.len();
    let mut y = vec![1.0 / (n as f64).sqrt(); n];
    let mut sigma = lower_bound;
    let mut shifted = a.shifted(sigma, b);
    let mut mu = f64::NAN;
    let mut last_change = f64::INFINITY;
    let mut polishing = 0usize;
    for it in 1..=MAX_ITER {
        let rhs = b.matvec(&y);
        let x = shifted.solve(&rhs)?;
        let yx: f64 = y.iter().zip(&x).map(|(p, q)| p * q).sum();
        let estimate = sigma + 1.0 / yx;
        let nx = norm(&x);
        let sign = if x.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        y = x.iter().map(|v| sign * v / nx).collect();
        let change = (estimate - mu).abs();
        mu = estimate;
        // Relative tests, so small eigenvalues keep their significant digits.
        let scale = mu.abs().max(f64::MIN_POSITIVE);
        if polishing == 0 {
            last_change = change;
            if change < 1e-9 * scale {
                polishing = 1;
                sigma = mu - 1e-7 * scale;
                shifted = a.shifted(sigma, b);
            }
        } else {
            polishing += 1;
            let stalled = polishing > 3 && change >= last_change;
            last_change = change;
            if change <= 2.0 * f64::EPSILON * scale || stalled {
                return Ok(Eigenpair { value: mu, vector: y, iterations: it });
            }
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITER, last_change })
}

/// Lowest eigenpair of a symmetric pencil with positive definite `mass`,
/// located by inertia bisection on `[lo, hi]` and polished by shift-invert.
/// Returns `Ok(None)` when no eigenvalue lies below `hi`.
pub fn lowest_symmetric(a: &Tridiag, mass: &Tridiag, lo: f64, hi: f64) -> Result<Option<Eigenpair>> {
    if a.count_below(hi, mass) == 0 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (lo, hi);
    if a.count_below(lo, mass) > 0 {
        return Err(Error::Config(format!("lower bound {lo} is above the lowest eigenvalue")));
    }
    // Bisection down to a bracket that isolates the lowest eigenvalue well.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if a.count_below(mid, mass) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-6 * hi.abs().max(lo.abs()) {
            break;
        }
    }
    lowest_eigenpair(a, mass, lo).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> Tridiag {
        Tridiag {
            lower: vec![-1.0; n - 1],
            diag: vec![2.0; n],
            upper: vec![-1.0; n - 1],
        }
    }

    #[test]
    fn thomas_solves_exactly() {
        let m = laplacian(6);
        let x: Vec<f64> = (0..6).map(|i| (i as f64).sin()).collect();
        let b = m.matvec(&x);
        let y = m.solve(&b).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-13);
        }
    }

    #[test]
    fn lowest_dirichlet_laplacian_eigenvalue() {
        let n = 50;
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let pair = lowest_eigenpair(&laplacian(n), &Tridiag::identity(n), 0.0).unwrap();
        assert!((pair.value - exact).abs() < 1e-13);
        assert!(pair.vector.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn inertia_counts_eigenvalues() {
        let n = 20;
        let m = laplacian(n);
        let id = Tridiag::identity(n);
        let eig = |k: usize| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert_eq!(m.count_below(0.5 * (eig(3) + eig(4)), &id), 3);
        assert_eq!(m.count_below(-1.0, &id), 0);
    }

    #[test]
    fn symmetric_search_reports_absence() {
        let n = 10;
        let r = lowest_symmetric(&laplacian(n), &Tridiag::identity(n), -1.0, 0.0).unwrap();
        assert!(r.is_none());
    }
}
