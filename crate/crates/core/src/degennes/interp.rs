//! Continuous evaluation of a grid ground state by quintic Hermite
//! interpolation, using the equation itself for second derivatives.

use super::cutoff::CutoffProfile;
use super::solver::DeGennesSolution;

/// Quintic Hermite interpolant of a ground state. Zero beyond `t_max`;
/// evaluated at `|t|` for negative arguments.
#[derive(Debug, Clone)]
pub struct GroundState {
    h: f64,
    t_max: f64,
    xi: f64,
    mu: f64,
    f: Vec<f64>,
    df: Vec<f64>,
    d2f: Vec<f64>,
}

impl GroundState {
    pub fn new(solution: &DeGennesSolution) -> Self {
        let f = solution.eigenfunction.clone();
        let df = solution.derivative(4);
        let (xi, mu) = (solution.xi, solution.mu);
        let d2f = f
            .iter()
            .enumerate()
            .map(|(i, v)| ((solution.grid.node(i) - xi).powi(2) - mu) * v)
            .collect();
        Self { h: solution.spacing(), t_max: solution.grid.t_max, xi, mu, f, df, d2f }
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Value and first derivative at `t >= 0`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        if t >= self.t_max {
            return (0.0, 0.0);
        }
        let t = t.max(0.0);
        let i = ((t / self.h) as usize).min(self.f.len() - 2);
        let h = self.h;
        let s = (t - i as f64 * h) / h;
        let (s2, s3) = (s * s, s * s * s);
        let (s4, s5) = (s3 * s, s3 * s2);
        let basis = [
            1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
            s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
            0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5,
            10.0 * s3 - 15.0 * s4 + 6.0 * s5,
            -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
            0.5 * s3 - s4 + 0.5 * s5,
        ];
        let slope = [
            -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
            1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
            s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4,
            30.0 * s2 - 60.0 * s3 + 30.0 * s4,
            -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
            1.5 * s2 - 4.0 * s3 + 2.5 * s4,
        ];
        let c = [
            self.f[i],
            h * self.df[i],
            h * h * self.d2f[i],
            self.f[i + 1],
            h * self.df[i + 1],
            h * h * self.d2f[i + 1],
        ];
        let v = basis.iter().zip(&c).map(|(b, c)| b * c).sum();
        let d = slope.iter().zip(&c).map(|(b, c)| b * c).sum::<f64>() / h;
        (v, d)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }
}

/// The cut-off ground state `f_ell(t) = zeta(t / ell) f(t)`.
#[derive(Debug, Clone)]
pub struct CutGroundState {
    pub ground: GroundState,
    pub cutoff: CutoffProfile,
}

impl CutGroundState {
    pub fn new(ground: GroundState, cutoff: CutoffProfile) -> Self {
        Self { ground, cutoff }
    }

    pub fn ell(&self) -> f64 {
        self.cutoff.ell
    }

    /// Value and derivative of `f_ell` at `t >= 0`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let (f, df) = self.ground.eval(t);
        let z = self.cutoff.value(t);
        (z * f, z * df + self.cutoff.derivative(t) * f)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.cutoff.value(t) * self.ground.value(t)
    }

    /// Right end of the support.
    pub fn support(&self) -> f64 {
        self.cutoff.ell.min(self.ground.t_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degennes::grid::HalfLineGrid;
    use crate::degennes::solver::solve_h_xi;

    #[test]
    fn interpolant_reproduces_nodes_and_refines() {
        let coarse = solve_h_xi(0.7, &HalfLineGrid::new(20.0, 801, "fd4").unwrap()).unwrap();
        let fine = solve_h_xi(0.7, &HalfLineGrid::new(20.0, 3201, "fd4").unwrap()).unwrap();
        let g = GroundState::new(&coarse);
        assert!((g.value(coarse.grid.node(37)) - coarse.eigenfunction[37]).abs() < 1e-15);
        let gf = GroundState::new(&fine);
        for &t in &[0.013, 0.77, 1.2345, 3.3] {
            assert!((g.value(t) - gf.value(t)).abs() < 1e-6, "t = {t}");
            let (_, d) = gf.eval(t);
            let fd = (gf.value(t + 1e-5) - gf.value(t - 1e-5)) / 2e-5;
            assert!((d - fd).abs() < 1e-7);
        }
        assert_eq!(g.value(25.0), 0.0);
    }
}
