//! Angular transition profiles and longitudinal cutoffs of the corner
//! trial state.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::registry::{Args, Registry};

/// Odd profile with `chi(u) = 1` for `u >= 1`, used to interpolate the phase
/// across the bisector.
pub trait Transition: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn value(&self, u: f64) -> f64;
    fn slope(&self, u: f64) -> f64;
    /// Interior points of `(-1, 1)` where the profile is not smooth.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// `chi(u) = u` on `[-1, 1]`, the energy-minimizing profile; only Lipschitz.
#[derive(Debug, Clone, Copy)]
pub struct Linear;

impl Transition for Linear {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn value(&self, u: f64) -> f64 {
        u.clamp(-1.0, 1.0)
    }

    fn slope(&self, u: f64) -> f64 {
        if u.abs() < 1.0 {
            1.0
        } else {
            0.0
        }
    }
}

/// Linear profile whose slope is tapered to zero over the last `width` of
/// `[0, 1]` by a quintic smoothstep and rescaled so `chi(1) = 1`. The slope
/// is twice continuously differentiable.
#[derive(Debug, Clone, Copy)]
pub struct Mollified {
    pub width: f64,
}

impl Mollified {
    fn scale(&self) -> f64 {
        1.0 / (1.0 - 0.5 * self.width)
    }

    fn taper(v: f64) -> f64 {
        1.0 - v * v * v * (10.0 - 15.0 * v + 6.0 * v * v)
    }

    /// `int_0^v taper`.
    fn taper_integral(v: f64) -> f64 {
        v - v.powi(4) * (2.5 - 3.0 * v + v * v)
    }
}

impl Transition for Mollified {
    fn name(&self) -> &'static str {
        "mollified"
    }

    fn value(&self, u: f64) -> f64 {
        let a = u.abs();
        let knee = 1.0 - self.width;
        let magnitude = if a >= 1.0 {
            1.0
        } else if a <= knee {
            self.scale() * a
        } else {
            self.scale() * (knee + self.width * Self::taper_integral((a - knee) / self.width))
        };
        magnitude.copysign(u)
    }

    fn slope(&self, u: f64) -> f64 {
        let a = u.abs();
        let knee = 1.0 - self.width;
        if a >= 1.0 {
            0.0
        } else if a <= knee {
            self.scale()
        } else {
            self.scale() * Self::taper((a - knee) / self.width)
        }
    }

    fn kinks(&self) -> Vec<f64> {
        let knee = 1.0 - self.width;
        vec![-knee, knee]
    }
}

pub fn transitions() -> &'static Registry<dyn Transition> {
    static REG: OnceLock<Registry<dyn Transition>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn Transition> = Registry::new("transition profile");
        r.register("linear", "chi(u) = u on [-1, 1]", |_| Ok(Box::new(Linear)));
        r.register("mollified", "linear with a C2 slope taper (arg: width, default 0.1)", |a| {
            let width = a.get("width", 0.1);
            if !(width > 0.0 && width <= 1.0) {
                return Err(Error::Config(format!("taper width {width} must lie in (0, 1]")));
            }
            Ok(Box::new(Mollified { width }))
        });
        r
    })
}

/// Cutoff along the corner edges, equal to 1 on `(0, epsilon)`.
pub trait Longitudinal: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn plateau(&self) -> f64;
    fn value(&self, x: f64) -> f64;
    fn slope(&self, x: f64) -> f64;
    /// `int_0^inf eta^2`.
    fn norm_sq(&self) -> f64;
    /// `int_0^inf eta'^2`.
    fn slope_norm_sq(&self) -> f64;
    /// A point beyond which `eta < 1e-8`.
    fn reach(&self) -> f64;
}

/// `1` on `(0, epsilon)`, then `exp(-rate (x - epsilon))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub epsilon: f64,
    pub rate: f64,
}

impl Longitudinal for Exponential {
    fn name(&self) -> &'static str {
        "exponential"
    }

    fn plateau(&self) -> f64 {
        self.epsilon
    }

    fn value(&self, x: f64) -> f64 {
        if x <= self.epsilon {
            1.0
        } else {
            (-self.rate * (x - self.epsilon)).exp()
        }
    }

    fn slope(&self, x: f64) -> f64 {
        if x <= self.epsilon {
            0.0
        } else {
            -self.rate * self.value(x)
        }
    }

    fn norm_sq(&self) -> f64 {
        self.epsilon + 0.5 / self.rate
    }

    fn slope_norm_sq(&self) -> f64 {
        0.5 * self.rate
    }

    fn reach(&self) -> f64 {
        self.epsilon + 8.0 * std::f64::consts::LN_10 / self.rate
    }
}

/// `1` on `(0, length)`, then a quintic smoothstep down to 0 over `ramp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub length: f64,
    pub ramp: f64,
}

impl Longitudinal for Plateau {
    fn name(&self) -> &'static str {
        "plateau"
    }

    fn plateau(&self) -> f64 {
        self.length
    }

    fn value(&self, x: f64) -> f64 {
        if x <= self.length {
            1.0
        } else if x >= self.length + self.ramp {
            0.0
        } else {
            Mollified::taper((x - self.length) / self.ramp)
        }
    }

    fn slope(&self, x: f64) -> f64 {
        if x <= self.length || x >= self.length + self.ramp {
            0.0
        } else {
            let v = (x - self.length) / self.ramp;
            -30.0 * v * v * (1.0 - v) * (1.0 - v) / self.ramp
        }
    }

    fn norm_sq(&self) -> f64 {
        // int_0^1 (1 - S)^2 = 181/462 for the quintic smoothstep S.
        self.length + self.ramp * 181.0 / 462.0
    }

    fn slope_norm_sq(&self) -> f64 {
        // int_0^1 S'^2 = 10/7.
        10.0 / (7.0 * self.ramp)
    }

    fn reach(&self) -> f64 {
        self.length + self.ramp
    }
}

pub fn longitudinals() -> &'static Registry<dyn Longitudinal> {
    static REG: OnceLock<Registry<dyn Longitudinal>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn Longitudinal> = Registry::new("longitudinal cutoff");
        r.register("exponential", "1 then exp(-rate (x - epsilon)) (args: epsilon, rate)", |a| {
            let (epsilon, rate) = (a.get("epsilon", 1.0), a.get("rate", f64::NAN));
            if !(epsilon > 0.0 && rate > 0.0) {
                return Err(Error::Config(format!("exponential cutoff needs epsilon, rate > 0 (got {epsilon}, {rate})")));
            }
            Ok(Box::new(Exponential { epsilon, rate }))
        });
        r.register("plateau", "1 on (0, length) then a smooth ramp (args: length, ramp)", |a| {
            let length = a.get("length", f64::NAN);
            let ramp = a.get("ramp", length);
            if !(length > 0.0 && ramp > 0.0) {
                return Err(Error::Config(format!("plateau cutoff needs length, ramp > 0 (got {length}, {ramp})")));
            }
            Ok(Box::new(Plateau { length, ramp }))
        });
        r
    })
}

/// Convenience builder for the exponential family.
pub fn exponential(epsilon: f64, rate: f64) -> Result<Box<dyn Longitudinal>> {
    longitudinals().build("exponential", &Args::new().with("epsilon", epsilon).with("rate", rate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{gauss20, uniform_breaks};

    #[test]
    fn transitions_are_odd_and_saturate() {
        for name in transitions().names() {
            let chi = transitions().build(name, &Args::new()).unwrap();
            assert_eq!(chi.value(1.3), 1.0);
            assert_eq!(chi.value(-1.0), -1.0);
            for &u in &[0.1, 0.5, 0.93, 0.99] {
                assert!((chi.value(u) + chi.value(-u)).abs() < 1e-15);
            }
            let total = gauss20().composite(&uniform_breaks(-1.0, 1.0, 0.05), 1, |u| chi.slope(u));
            assert!((total - 2.0).abs() < 1e-12, "{name}: {total}");
        }
    }

    #[test]
    fn mollified_slope_is_derivative() {
        let chi = Mollified { width: 0.1 };
        for &u in &[0.3, 0.92, 0.97, -0.95] {
            let h = 1e-6;
            let fd = (chi.value(u + h) - chi.value(u - h)) / (2.0 * h);
            assert!((fd - chi.slope(u)).abs() < 1e-7);
        }
    }

    #[test]
    fn longitudinal_norms_match_quadrature() {
        let cases: Vec<Box<dyn Longitudinal>> =
            vec![Box::new(Exponential { epsilon: 1.0, rate: 0.3 }), Box::new(Plateau { length: 3.0, ramp: 2.0 })];
        for eta in cases {
            let breaks = uniform_breaks(0.0, eta.reach() * 2.0, 0.25);
            let breaks = crate::quad::with_splits(breaks, &[eta.plateau(), eta.plateau() + 2.0]);
            let n = gauss20().composite(&breaks, 1, |x| eta.value(x).powi(2));
            let s = gauss20().composite(&breaks, 1, |x| eta.slope(x).powi(2));
            assert!((n - eta.norm_sq()).abs() < 1e-12 * n.max(1.0), "{}: {n} vs {}", eta.name(), eta.norm_sq());
            assert!((s - eta.slope_norm_sq()).abs() < 1e-12, "{}: {s}", eta.name());
        }
    }
}
