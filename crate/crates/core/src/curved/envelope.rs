use crate::quad::{gauss20, uniform_breaks, with_splits};

/// Longitudinal factor `g(s)` of a tubular trial state.
pub trait Envelope: Send + Sync + std::fmt::Debug {
    /// Value and derivative.
    fn eval(&self, s: f64) -> (f64, f64);
    /// Interval carrying all but a negligible part of the mass.
    fn extent(&self) -> (f64, f64);
    /// Points where the derivative jumps.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }

    fn norm_sq(&self) -> f64 {
        self.integrate(&|g, _| g * g)
    }

    fn slope_norm_sq(&self) -> f64 {
        self.integrate(&|_, dg| dg * dg)
    }

    fn integrate(&self, f: &dyn Fn(f64, f64) -> f64) -> f64 {
        let (a, b) = self.extent();
        let breaks = with_splits(uniform_breaks(a, b, (b - a) / 256.0), &self.kinks());
        gauss20().composite(&breaks, 1, |s| {
            let (g, dg) = self.eval(s);
            f(g, dg)
        })
    }
}

/// `sqrt(rate) exp(-rate |s|)`, normalized in `L^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialEnvelope {
    pub rate: f64,
}

impl Envelope for ExponentialEnvelope {
    fn eval(&self, s: f64) -> (f64, f64) {
        let g = self.rate.sqrt() * (-self.rate * s.abs()).exp();
        (g, -self.rate * s.signum() * g)
    }

    fn extent(&self) -> (f64, f64) {
        let r = 40.0 / self.rate;
        (-r, r)
    }

    fn kinks(&self) -> Vec<f64> {
        vec![0.0]
    }

    fn norm_sq(&self) -> f64 {
        1.0
    }

    fn slope_norm_sq(&self) -> f64 {
        self.rate * self.rate
    }
}

/// `amplitude exp(1 - 1 / (1 - x^2))` with `x = (s - center) / width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpEnvelope {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl BumpEnvelope {
    /// The bump rescaled to unit `L^2` norm.
    pub fn normalized(center: f64, width: f64) -> Self {
        let raw = Self { center, width, amplitude: 1.0 };
        Self { amplitude: raw.norm_sq().sqrt().recip(), ..raw }
    }
}

impl Envelope for BumpEnvelope {
    fn eval(&self, s: f64) -> (f64, f64) {
        let x = (s - self.center) / self.width;
        if x.abs() >= 1.0 {
            return (0.0, 0.0);
        }
        let q = 1.0 - x * x;
        let g = self.amplitude * (1.0 - 1.0 / q).exp();
        (g, -2.0 * x / (q * q) * g / self.width)
    }

    fn extent(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_closed_forms_match_quadrature() {
        let e = ExponentialEnvelope { rate: 0.3 };
        let generic = |f: &dyn Fn(f64, f64) -> f64| e.integrate(f);
        assert!((generic(&|g, _| g * g) - 1.0).abs() < 1e-12);
        assert!((generic(&|_, d| d * d) - 0.09).abs() < 1e-12);
    }

    #[test]
    fn bump_derivative_matches_difference_quotient() {
        let b = BumpEnvelope::normalized(1.0, 2.0);
        assert!((b.norm_sq() - 1.0).abs() < 1e-12);
        let h = 1e-6;
        for s in [-0.5, 0.3, 2.1] {
            let fd = (b.eval(s + h).0 - b.eval(s - h).0) / (2.0 * h);
            assert!((fd - b.eval(s).1).abs() < 1e-8);
        }
    }
}
