//! Reflection of a field across the bisector, with the gauge phase that makes
//! its magnetic energy match the original's.

use num_complex::Complex64;

use super::geometry::{matching_phase, matching_phase_gradient, reflect};
use crate::degennes::{CutGroundState, CutoffProfile};
use crate::quad::{gauss20, uniform_breaks, with_splits};

/// Complex field with its gradient.
pub trait Field: Send + Sync {
    fn eval(&self, x: [f64; 2]) -> (Complex64, [Complex64; 2]);
}

/// `|(-i grad + A) u|^2` with `A = (-x2, 0)`.
pub fn magnetic_density(field: &dyn Field, x: [f64; 2]) -> f64 {
    let (u, g) = field.eval(x);
    let i = Complex64::i();
    (-i * g[0] - x[1] * u).norm_sqr() + g[1].norm_sqr()
}

/// `x -> exp(-i phi(Sx)) conj(u(Sx))`.
pub struct ReflectedPartner<'a> {
    pub source: &'a dyn Field,
    pub delta: f64,
}

impl Field for ReflectedPartner<'_> {
    fn eval(&self, x: [f64; 2]) -> (Complex64, [Complex64; 2]) {
        let y = reflect(self.delta, x);
        let (u, g) = self.source.eval(y);
        let gauge = Complex64::from_polar(1.0, -matching_phase(self.delta, y));
        let dphi = matching_phase_gradient(self.delta, y);
        let i = Complex64::i();
        let v = gauge * u.conj();
        let gy = [-i * dphi[0] * v + gauge * g[0].conj(), -i * dphi[1] * v + gauge * g[1].conj()];
        // The reflection matrix is symmetric, so the pulled-back gradient is S gy.
        let (s, c) = self.delta.sin_cos();
        (v, [-c * gy[0] + s * gy[1], s * gy[0] + c * gy[1]])
    }
}

pub fn reflected_partner(source: &dyn Field, delta: f64) -> ReflectedPartner<'_> {
    ReflectedPartner { source, delta }
}

/// `zeta(x1 / length) f_ell(x2) exp(i xi x1)`: a half-plane ground state cut
/// off along the edge.
pub struct EdgeMode {
    pub profile: CutGroundState,
    pub along: CutoffProfile,
    pub xi: f64,
}

impl Field for EdgeMode {
    fn eval(&self, x: [f64; 2]) -> (Complex64, [Complex64; 2]) {
        let (f, df) = self.profile.eval(x[1].max(0.0));
        let (z, dz) = (self.along.value(x[0]), self.along.derivative(x[0]));
        let e = Complex64::from_polar(1.0, self.xi * x[0]);
        let i = Complex64::i();
        (z * f * e, [(dz + i * self.xi * z) * f * e, z * df * e])
    }
}

/// Sum of smooth compactly supported bumps `a exp(i k.x) B(|x - c| / r)`.
pub struct BumpField {
    pub bumps: Vec<Bump>,
}

#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: Complex64,
    pub wave: [f64; 2],
}

impl Field for BumpField {
    fn eval(&self, x: [f64; 2]) -> (Complex64, [Complex64; 2]) {
        let i = Complex64::i();
        let mut u = Complex64::new(0.0, 0.0);
        let mut g = [u, u];
        for b in &self.bumps {
            let d = [x[0] - b.center[0], x[1] - b.center[1]];
            let q = (d[0] * d[0] + d[1] * d[1]) / (b.radius * b.radius);
            if q >= 1.0 {
                continue;
            }
            // B = exp(1 - 1/(1 - q)), dB/dq = -B/(1 - q)^2.
            let bq = (1.0 - 1.0 / (1.0 - q)).exp();
            let dbq = -bq / ((1.0 - q) * (1.0 - q));
            let e = b.amplitude * Complex64::from_polar(1.0, b.wave[0] * x[0] + b.wave[1] * x[1]);
            u += bq * e;
            for k in 0..2 {
                g[k] += (dbq * 2.0 * d[k] / (b.radius * b.radius) + i * b.wave[k] * bq) * e;
            }
        }
        (u, g)
    }
}

/// The trapezoid `{0 < x2 < height, x2 tan(opening) < x1 < length}` and its
/// reflection; `opening` is `(delta + gamma) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trapezoid {
    pub delta: f64,
    pub opening: f64,
    pub height: f64,
    pub length: f64,
}

impl Trapezoid {
    /// Magnetic energy of `field` on the trapezoid, iterated in Cartesian
    /// coordinates with panels of width at most `panel`.
    pub fn energy_cartesian(&self, field: &dyn Field, panel: f64) -> f64 {
        let slope = self.opening.tan();
        let rule = gauss20();
        rule.composite(&uniform_breaks(0.0, self.height, panel), 1, |x2| {
            let start = x2 * slope;
            rule.composite(&uniform_breaks(start, self.length, panel), 1, |x1| magnetic_density(field, [x1, x2]))
        })
    }

    /// Magnetic energy of `field` on the reflected trapezoid, iterated in
    /// polar coordinates with panels of width at most `panel`.
    pub fn energy_reflected_polar(&self, field: &dyn Field, panel: f64) -> f64 {
        let far = std::f64::consts::PI - self.delta;
        let near = 0.5 * far + self.opening - 0.5 * self.delta;
        // Angle where the outer boundary switches from the top edge to the end.
        let corner = std::f64::consts::PI - (self.height / self.length).atan() - self.delta;
        let angles = with_splits(uniform_breaks(near, far, panel / self.length.max(1.0)), &[corner]);
        let rule = gauss20();
        rule.composite(&angles, 1, |theta| {
            let (s, c) = (theta + self.delta).sin_cos();
            let outer = (self.height / s).min(self.length / -c);
            let (ct, st) = (theta.cos(), theta.sin());
            rule.composite(&uniform_breaks(0.0, outer, panel), 1, |r| r * magnetic_density(field, [r * ct, r * st]))
        })
    }
}
