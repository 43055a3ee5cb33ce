use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::band::BandCholesky;
use super::operator::SparseHermitianOperator;
use crate::error::{Error, Result};

/// Residual contract for every reported pair.
pub const RESIDUAL_LIMIT: f64 = 1e-8;
pub const DEFAULT_SHIFT: f64 = 0.5;
const MAX_STEPS: usize = 400;
const CHECK_EVERY: usize = 10;

/// Richardson extrapolation in the mesh size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshExtrapolation {
    pub h: Vec<f64>,
    pub lambda: Vec<f64>,
    pub extrapolated: f64,
    /// Difference between the two- and three-level extrapolants, or the
    /// last Richardson correction when only two levels were run.
    pub error: f64,
}

/// Exponential fit of the lowest eigenvalue against the truncation radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusExtrapolation {
    pub radius: Vec<f64>,
    pub lambda: Vec<f64>,
    pub extrapolated: f64,
    pub error: f64,
    /// Fitted decay rate of the truncation error, when the differences
    /// contract.
    pub rate: Option<f64>,
    pub monotone: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationRecord {
    pub mesh: Option<MeshExtrapolation>,
    pub radius: Option<RadiusExtrapolation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub kind: String,
    pub delta: f64,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub h: f64,
    pub radius: f64,
    pub depth: f64,
    pub dimension: usize,
    pub shift: f64,
    pub requested: usize,
    pub lanczos_steps: usize,
    pub extrapolation: ExtrapolationRecord,
    /// Eigenvectors on the unknowns, normalized in the mass inner product.
    #[serde(skip)]
    pub vectors: Vec<Vec<Complex64>>,
    /// Mesh node of each unknown.
    #[serde(skip)]
    pub unknowns: Vec<usize>,
}

impl SpectralReport {
    pub fn lowest(&self) -> f64 {
        self.eigenvalues[0]
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `k` lowest eigenpairs of `K v = lambda M v` above `shift`, by Lanczos
/// with full reorthogonalization on `M^{1/2} (K - shift M)^{-1} M^{1/2}`.
///
/// Pairs are reported in increasing order and only while they meet the
/// residual contract in the symmetrized operator `M^{-1/2} K M^{-1/2}`.
/// Returns `NoConvergence` when not even the lowest one does.
pub fn lowest_eigenvalues(op: &SparseHermitianOperator, k: usize, shift: f64) -> Result<SpectralReport> {
    if k == 0 {
        return Err(Error::Config("need at least one eigenpair".into()));
    }
    if !op.is_hermitian() {
        return Err(Error::Assembly("operator is not Hermitian".into()));
    }
    let n = op.dimension;
    let factor = BandCholesky::factor(op, shift)?;
    let root: Vec<f64> = op.mass.iter().map(|m| m.sqrt()).collect();
    let apply = |x: &[Complex64]| -> Vec<Complex64> {
        let mut y: Vec<Complex64> = x.iter().zip(&root).map(|(v, r)| v * r).collect();
        factor.solve(&mut y);
        y.iter_mut().zip(&root).for_each(|(v, r)| *v *= r);
        y
    };
    // Residual of the symmetrized operator for a unit vector.
    let residual = |v: &[Complex64], lambda: f64| -> f64 {
        let u: Vec<Complex64> = v.iter().zip(&root).map(|(x, r)| x / r).collect();
        let ku = op.matvec(&u);
        ku.iter().zip(v).zip(&root).map(|((a, b), r)| (a / r - lambda * b).norm_sqr()).sum::<f64>().sqrt()
    };

    let steps_cap = MAX_STEPS.min(n);
    let mut q: Vec<Vec<Complex64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let start: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + 0.1 * (i as f64).sin(), 0.0)).collect();
    let s0 = norm(&start);
    q.push(start.into_iter().map(|v| v / s0).collect());

    let mut best: Vec<(f64, f64, Vec<Complex64>)> = Vec::new();
    let mut last_change = f64::INFINITY;
    loop {
        let j = alpha.len();
        let mut w = apply(&q[j]);
        let a = dot(&q[j], &w).re;
        alpha.push(a);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for qi in &q {
                let c = dot(qi, &w);
                w.iter_mut().zip(qi).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);
        let exhausted = b <= 1e-14 * a.abs() || q.len() == steps_cap;
        let steps = alpha.len();
        if steps % CHECK_EVERY == 0 || exhausted {
            let m = steps;
            let mut t = DMatrix::<f64>::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alpha[i];
                if i + 1 < m {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&x, &y| eig.eigenvalues[y].partial_cmp(&eig.eigenvalues[x]).unwrap());
            let wanted = k.min(m);
            // Cheap estimates first; true residuals only when they all pass.
            let estimates_pass = order[..wanted].iter().all(|&c| {
                let tau = eig.eigenvalues[c];
                (b * eig.eigenvectors[(m - 1, c)]).abs() <= 1e-13 * tau.abs()
            });
            if estimates_pass || exhausted {
                let mut pairs = Vec::new();
                for &c in &order[..wanted] {
                    let tau = eig.eigenvalues[c];
                    if tau <= 0.0 {
                        break;
                    }
                    let mut v = vec![Complex64::new(0.0, 0.0); n];
                    for (i, qi) in q.iter().enumerate().take(m) {
                        let s = eig.eigenvectors[(i, c)];
                        v.iter_mut().zip(qi).for_each(|(x, y)| *x += s * y);
                    }
                    let nv = norm(&v);
                    v.iter_mut().for_each(|x| *x /= nv);
                    let lambda = shift + 1.0 / tau;
                    let r = residual(&v, lambda);
                    pairs.push((lambda, r, v));
                }
                let ok = pairs.iter().take_while(|p| p.1 < RESIDUAL_LIMIT).count();
                if let (Some(p), Some(b0)) = (pairs.first(), best.first()) {
                    last_change = (p.0 - b0.0).abs();
                }
                if ok == wanted || exhausted {
                    pairs.truncate(ok);
                    best = pairs;
                    if best.is_empty() {
                        return Err(Error::NoConvergence { iterations: steps, last_change });
                    }
                    let unknowns = op.unknowns.clone();
                    let vectors = best
                        .iter()
                        .map(|p| p.2.iter().zip(&root).map(|(x, r)| x / r).collect())
                        .collect();
                    return Ok(SpectralReport {
                        kind: String::new(),
                        delta: 0.0,
                        eigenvalues: best.iter().map(|p| p.0).collect(),
                        residuals: best.iter().map(|p| p.1).collect(),
                        h: 0.0,
                        radius: 0.0,
                        depth: 0.0,
                        dimension: n,
                        shift,
                        requested: k,
                        lanczos_steps: steps,
                        extrapolation: ExtrapolationRecord::default(),
                        vectors,
                        unknowns,
                    });
                }
                best = pairs;
            }
        }
        beta.push(b);
        q.push(w.into_iter().map(|v| v / b).collect());
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::magnetic2d::domain::{CurvedKind, TruncatedDomain};
    use crate::magnetic2d::operator::{assemble, Gauge};

    #[test]
    fn dirichlet_box_without_field() {
        // Flat strip with A = 0: Neumann at t = 0, Dirichlet elsewhere, so the
        // discrete spectrum is a tensor product of 1D Laplacians.
        let (r, d, h) = (2.0, 1.0, 0.1);
        let dom = TruncatedDomain::new(Arc::new(CurvedKind { profile: None, delta: 0.0 }), r, d, h).unwrap();
        let op = assemble(&dom, &Gauge::zero()).unwrap();
        let rep = lowest_eigenvalues(&op, 2, -1.0).unwrap();
        let ns = (2.0 * r / h).round();
        let along = |p: f64| (2.0 - 2.0 * (p * std::f64::consts::PI / ns).cos()) / (h * h);
        let nt = (d / h).round();
        let across = (2.0 - 2.0 * (std::f64::consts::PI / (2.0 * nt)).cos()) / (h * h);
        assert!((rep.eigenvalues[0] - along(1.0) - across).abs() < 1e-9, "{:?}", rep.eigenvalues);
        assert!((rep.eigenvalues[1] - along(2.0) - across).abs() < 1e-9);
        assert!(rep.residuals.iter().all(|r| *r < RESIDUAL_LIMIT));
    }
}
