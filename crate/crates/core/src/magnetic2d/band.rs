use num_complex::Complex64;

use super::operator::SparseHermitianOperator;
use crate::error::{Error, Result};

/// Cholesky factor `L L^H = K - sigma M` of a banded Hermitian positive
/// definite matrix, stored row by row over the band.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    band: usize,
    rows: Vec<Complex64>,
}

impl BandCholesky {
    pub fn factor(op: &SparseHermitianOperator, sigma: f64) -> Result<Self> {
        let n = op.dimension;
        let band = op.bandwidth();
        let w = band + 1;
        let mut rows = vec![Complex64::new(0.0, 0.0); n * w];
        for i in 0..n {
            for (j, v) in op.row(i) {
                if j <= i {
                    rows[i * w + j + band - i] = v;
                }
            }
            rows[i * w + band] -= sigma * op.mass[i];
        }
        for i in 0..n {
            let lo = i.saturating_sub(band);
            for j in lo..=i {
                // Columns shared by rows i and j, strictly left of j.
                let k0 = lo.max(j.saturating_sub(band));
                let (ri, rj) = (i * w + band - i, j * w + band - j);
                let mut s = rows[ri + j];
                for k in k0..j {
                    s -= rows[ri + k] * rows[rj + k].conj();
                }
                if j < i {
                    rows[ri + j] = s / rows[rj + j].re;
                } else {
                    if !(s.re > 0.0) {
                        return Err(Error::Factorization {
                            index: i,
                            detail: format!("non-positive pivot {:.3e}; the shift {sigma} is not below the spectrum", s.re),
                        });
                    }
                    rows[ri + i] = Complex64::new(s.re.sqrt(), 0.0);
                }
            }
        }
        Ok(Self { n, band, rows })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Solves `L L^H x = b` in place.
    pub fn solve(&self, x: &mut [Complex64]) {
        let (n, b, w) = (self.n, self.band, self.band + 1);
        for i in 0..n {
            let base = i * w + b - i;
            let mut s = x[i];
            for k in i.saturating_sub(b)..i {
                s -= self.rows[base + k] * x[k];
            }
            x[i] = s / self.rows[base + i].re;
        }
        for i in (0..n).rev() {
            let d = self.rows[i * w + b].re;
            x[i] /= d;
            let xi = x[i];
            let base = i * w + b - i;
            for k in i.saturating_sub(b)..i {
                x[k] -= self.rows[base + k].conj() * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::magnetic2d::domain::{CornerKind, TruncatedDomain};
    use crate::magnetic2d::operator::{assemble, Gauge};

    #[test]
    fn solves_shifted_system() {
        let d = TruncatedDomain::new(Arc::new(CornerKind { delta: 0.5 }), 2.0, 1.5, 0.2).unwrap();
        let op = assemble(&d, &Gauge::default()).unwrap();
        let sigma = -0.3;
        let f = BandCholesky::factor(&op, sigma).unwrap();
        let x: Vec<Complex64> = (0..op.dimension).map(|i| Complex64::new((i as f64).sin(), (0.3 * i as f64).cos())).collect();
        let mut b = op.matvec(&x);
        for (bi, (xi, m)) in b.iter_mut().zip(x.iter().zip(&op.mass)) {
            *bi -= sigma * m * xi;
        }
        f.solve(&mut b);
        let err = b.iter().zip(&x).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn shift_above_the_spectrum_fails() {
        let d = TruncatedDomain::new(Arc::new(CornerKind { delta: 0.5 }), 2.0, 1.5, 0.2).unwrap();
        let op = assemble(&d, &Gauge::default()).unwrap();
        assert!(matches!(BandCholesky::factor(&op, 5.0), Err(Error::Factorization { .. })));
    }
}
