use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::domain::{BoundaryTag, TruncatedDomain};
use crate::error::{Error, Result};
use crate::tridiag::Tridiag;

/// A smooth real function added to the vector potential as a gradient.
pub trait GaugeShift: Send + Sync + std::fmt::Debug {
    fn value(&self, x: [f64; 2]) -> f64;
}

/// `sum_k a_k sin(p_k . x + c_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveShift {
    pub terms: Vec<(f64, [f64; 2], f64)>,
}

impl GaugeShift for WaveShift {
    fn value(&self, x: [f64; 2]) -> f64 {
        self.terms.iter().map(|&(a, p, c)| a * (p[0] * x[0] + p[1] * x[1] + c).sin()).sum()
    }
}

/// Vector potential used in the assembly: `(-x2, 0)` or zero, optionally
/// plus the gradient of a shift.
#[derive(Debug, Clone)]
pub struct Gauge {
    pub field: bool,
    pub shift: Option<Arc<dyn GaugeShift>>,
}

impl Default for Gauge {
    fn default() -> Self {
        Self { field: true, shift: None }
    }
}

impl Gauge {
    pub fn zero() -> Self {
        Self { field: false, shift: None }
    }

    pub fn shifted(mut self, shift: Arc<dyn GaugeShift>) -> Self {
        self.shift = Some(shift);
        self
    }

    /// Line integral of the potential along the segment from `p` to `q`.
    pub fn phase(&self, p: [f64; 2], q: [f64; 2]) -> f64 {
        let mut theta = if self.field { -0.5 * (p[1] + q[1]) * (q[0] - p[0]) } else { 0.0 };
        if let Some(chi) = &self.shift {
            theta += chi.value(q) - chi.value(p);
        }
        theta
    }

    pub fn descriptor(&self) -> GaugeDescriptor {
        GaugeDescriptor {
            potential: if self.field { "(-x2, 0)".into() } else { "0".into() },
            shifted: self.shift.is_some(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeDescriptor {
    pub potential: String,
    pub shifted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRecord {
    /// Nodes on the true boundary, left free (natural Neumann condition).
    pub neumann_nodes: usize,
    /// Nodes on the truncation cut, removed from the unknowns.
    pub dirichlet_nodes: usize,
}

/// Stiffness matrix of the magnetic form on P1 elements with a lumped mass.
/// Rows are stored in full (both triangles) in CSR layout.
#[derive(Debug, Clone)]
pub struct SparseHermitianOperator {
    pub dimension: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub values: Vec<Complex64>,
    pub mass: Vec<f64>,
    /// Mesh node carried by each unknown.
    pub unknowns: Vec<usize>,
    pub gauge: GaugeDescriptor,
    pub boundary: BoundaryRecord,
}

/// Half-cotangent weights of the three edges of a triangle, in the order
/// (1,2), (2,0), (0,1).
fn cotangent_weights(p: [[f64; 2]; 3]) -> [f64; 3] {
    let mut w = [0.0; 3];
    for k in 0..3 {
        let (o, a, b) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
        let (e1, e2) = ([a[0] - o[0], a[1] - o[1]], [b[0] - o[0], b[1] - o[1]]);
        let cross = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
        w[k] = 0.5 * (e1[0] * e2[0] + e1[1] * e2[1]) / cross;
    }
    w
}

/// Assembles `int |(-i grad + A) psi|^2` and the lumped mass on the mesh.
/// Each edge contributes `w |e^{i theta} psi_j - psi_i|^2` with `theta` the
/// exact line integral of `A`.
pub fn assemble(domain: &TruncatedDomain, gauge: &Gauge) -> Result<SparseHermitianOperator> {
    let mesh = &domain.mesh;
    mesh.validate()?;
    let n = mesh.len();
    let mut weights: HashMap<(usize, usize), f64> = HashMap::with_capacity(3 * n);
    let mut lumped = vec![0.0; n];
    for t in &mesh.triangles {
        let p = [mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]];
        let w = cotangent_weights(p);
        for k in 0..3 {
            let (a, b) = (t[(k + 1) % 3], t[(k + 2) % 3]);
            *weights.entry((a.min(b), a.max(b))).or_default() += w[k];
        }
        let third = mesh.area(*t) / 3.0;
        for &v in t {
            lumped[v] += third;
        }
    }
    let mut index = vec![usize::MAX; n];
    let mut unknowns = Vec::new();
    for (i, tag) in mesh.tags.iter().enumerate() {
        if *tag != BoundaryTag::Artificial {
            index[i] = unknowns.len();
            unknowns.push(i);
        }
    }
    let dim = unknowns.len();
    if dim == 0 {
        return Err(Error::Assembly("no unknowns left after removing the truncation cut".into()));
    }
    let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
    let mut diag = vec![0.0; dim];
    let mut edges: Vec<_> = weights.into_iter().collect();
    edges.sort_unstable_by_key(|&(e, _)| e);
    for ((a, b), w) in edges {
        let (ia, ib) = (index[a], index[b]);
        if ia != usize::MAX {
            diag[ia] += w;
        }
        if ib != usize::MAX {
            diag[ib] += w;
        }
        if ia != usize::MAX && ib != usize::MAX {
            let theta = gauge.phase(mesh.nodes[a], mesh.nodes[b]);
            let k = -w * Complex64::from_polar(1.0, theta);
            rows[ia].push((ib, k));
            rows[ib].push((ia, k.conj()));
        }
    }
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for (i, mut row) in rows.into_iter().enumerate() {
        row.push((i, Complex64::new(diag[i], 0.0)));
        row.sort_unstable_by_key(|&(j, _)| j);
        for (j, v) in row {
            cols.push(j);
            values.push(v);
        }
        row_ptr.push(cols.len());
    }
    let mass = unknowns.iter().map(|&i| lumped[i]).collect();
    let neumann_nodes = mesh.tags.iter().filter(|t| **t == BoundaryTag::Physical).count();
    Ok(SparseHermitianOperator {
        dimension: dim,
        row_ptr,
        cols,
        values,
        mass,
        unknowns,
        gauge: gauge.descriptor(),
        boundary: BoundaryRecord { neumann_nodes, dirichlet_nodes: n - dim },
    })
}

impl SparseHermitianOperator {
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Exact test `entry(i, j) == conj(entry(j, i))`.
    pub fn is_hermitian(&self) -> bool {
        (0..self.dimension).all(|i| self.row(i).all(|(j, v)| self.entry(j, i) == v.conj()))
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.dimension).flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j))).max().unwrap_or(0)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.dimension).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// `<psi, K psi> / <psi, M psi>`.
    pub fn rayleigh(&self, psi: &[Complex64]) -> f64 {
        let k: Complex64 = self.matvec(psi).iter().zip(psi).map(|(a, b)| b.conj() * a).sum();
        let m: f64 = psi.iter().zip(&self.mass).map(|(p, w)| w * p.norm_sqr()).sum();
        k.re / m
    }
}

/// Bloch reduction of the flat-strip operator on a rectangular grid with
/// spacings `hs` along the boundary and `ht` across it: for
/// `psi = e^{i xi s} u(t)` the stiffness acts on `u` as the returned
/// pencil (scaled by `1 / hs`). Rows `0..nt`; the last row is the cut.
pub fn fiber_pencil(xi: f64, hs: f64, ht: f64, nt: usize) -> (Tridiag, Tridiag) {
    let mut k = Tridiag::zeros(nt);
    let mut m = Tridiag::zeros(nt);
    for j in 0..nt {
        let t = j as f64 * ht;
        let half = if j == 0 { 0.5 } else { 1.0 };
        let drift = 2.0 - 2.0 * ((xi - t) * hs).cos();
        k.diag[j] = half * ht * drift / (hs * hs) + if j == 0 { 1.0 / ht } else { 2.0 / ht };
        m.diag[j] = half * ht;
        if j + 1 < nt {
            k.lower[j] = -1.0 / ht;
            k.upper[j] = -1.0 / ht;
        }
    }
    (k, m)
}

/// Lowest eigenvalue of [`fiber_pencil`].
pub fn fiber_eigenvalue(xi: f64, hs: f64, ht: f64, depth: f64) -> Result<f64> {
    let nt = (depth / ht).round() as usize;
    let (k, m) = fiber_pencil(xi, hs, ht, nt);
    let hi = (k.diag.iter().zip(&m.diag).map(|(a, b)| a / b).fold(0.0, f64::max)) + 1.0;
    crate::tridiag::lowest_symmetric(&k, &m, 0.0, hi)?
        .map(|p| p.value)
        .ok_or_else(|| Error::Consistency("fiber pencil has no eigenvalue".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnetic2d::domain::{CornerKind, CurvedKind};

    #[test]
    fn right_triangle_weights() {
        let w = cotangent_weights([[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]]);
        // Hypotenuse opposite the right angle gets no weight.
        assert!(w[0].abs() < 1e-15);
        assert!((w[1] - 0.5 * 2.0).abs() < 1e-15);
        assert!((w[2] - 0.5 * 0.5).abs() < 1e-15);
    }

    #[test]
    fn corner_operator_is_hermitian_and_banded() {
        let d = TruncatedDomain::new(Arc::new(CornerKind { delta: 0.3 }), 2.0, 1.5, 0.25).unwrap();
        let op = assemble(&d, &Gauge::default()).unwrap();
        assert!(op.is_hermitian());
        let nt = (1.5f64 / 0.25).ceil() as usize;
        assert!(op.bandwidth() <= nt + 1);
        assert_eq!(op.boundary.dirichlet_nodes + op.dimension, d.mesh.len());
    }

    #[test]
    fn lumped_mass_is_the_area() {
        let d = TruncatedDomain::new(Arc::new(CurvedKind { profile: None, delta: 0.0 }), 2.0, 1.0, 0.25).unwrap();
        let op = assemble(&d, &Gauge::zero()).unwrap();
        let m: f64 = op.mass.iter().sum();
        // Only the cut nodes' shares are missing.
        assert!(m < 4.0 && m > 4.0 - 0.25 * (2.0 * 4.0 + 1.0));
    }
}
