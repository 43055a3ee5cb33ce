//! Even plateau cutoffs: 1 on [-1/2, 1/2], 0 outside [-1, 1].

use std::sync::{Arc, OnceLock};

use crate::registry::{Args, Registry};

pub trait Cutoff: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;

    /// Profile on the transition variable `s = 2|x| - 1` in [0, 1], falling
    /// from 1 to 0.
    fn fall(&self, s: f64) -> f64;

    /// `d fall / ds`.
    fn fall_slope(&self, s: f64) -> f64;

    fn value(&self, x: f64) -> f64 {
        let u = x.abs();
        if u <= 0.5 {
            1.0
        } else if u >= 1.0 {
            0.0
        } else {
            self.fall(2.0 * u - 1.0)
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        let u = x.abs();
        if u <= 0.5 || u >= 1.0 {
            0.0
        } else {
            2.0 * x.signum() * self.fall_slope(2.0 * u - 1.0)
        }
    }
}

fn bump(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

fn bump_slope(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp() / (x * x)
    }
}

/// Smooth plateau built from `exp(-1/x)`.
#[derive(Debug, Clone, Copy)]
pub struct Mollifier;

impl Cutoff for Mollifier {
    fn name(&self) -> &'static str {
        "mollifier"
    }

    fn fall(&self, s: f64) -> f64 {
        let (a, b) = (bump(1.0 - s), bump(s));
        a / (a + b)
    }

    fn fall_slope(&self, s: f64) -> f64 {
        let (a, b) = (bump(1.0 - s), bump(s));
        let (da, db) = (-bump_slope(1.0 - s), bump_slope(s));
        (da * b - a * db) / ((a + b) * (a + b))
    }
}

/// Quintic smoothstep, twice continuously differentiable.
#[derive(Debug, Clone, Copy)]
pub struct Polynomial;

impl Cutoff for Polynomial {
    fn name(&self) -> &'static str {
        "polynomial"
    }

    fn fall(&self, s: f64) -> f64 {
        1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }

    fn fall_slope(&self, s: f64) -> f64 {
        -30.0 * s * s * (1.0 - s) * (1.0 - s)
    }
}

pub fn cutoffs() -> &'static Registry<dyn Cutoff> {
    static REG: OnceLock<Registry<dyn Cutoff>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn Cutoff> = Registry::new("cutoff");
        r.register("mollifier", "C-infinity plateau from exp(-1/x)", |_| Ok(Box::new(Mollifier)));
        r.register("polynomial", "C2 quintic smoothstep", |_| Ok(Box::new(Polynomial)));
        r
    })
}

/// A cutoff `x -> zeta(x / ell)` at scale `ell`.
#[derive(Debug, Clone)]
pub struct CutoffProfile {
    pub ell: f64,
    pub zeta: Arc<dyn Cutoff>,
}

impl CutoffProfile {
    pub fn new(ell: f64, name: &str) -> crate::Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(crate::Error::Config(format!("cutoff scale must be positive, got {ell}")));
        }
        let zeta: Arc<dyn Cutoff> = Arc::from(cutoffs().build(name, &Args::new())?);
        Ok(Self { ell, zeta })
    }

    pub fn value(&self, t: f64) -> f64 {
        self.zeta.value(t / self.ell)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.zeta.derivative(t / self.ell) / self.ell
    }
}
