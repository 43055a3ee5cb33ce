use std::sync::{Arc, OnceLock};

use crate::curved::{Bump as CurvatureBump, Curvature};
use crate::degennes::reference;
use crate::error::{Error, Result};
use crate::quad::{gauss20, uniform_breaks, with_splits};
use crate::registry::{Args, Registry};

/// Compactly supported one-dimensional potential.
pub trait Potential: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn value(&self, x: f64) -> f64;
    fn support(&self) -> (f64, f64);
    /// Points where the potential is not smooth.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// `mean / width` on `|x| < width / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareWell {
    pub mean: f64,
    pub width: f64,
}

impl Potential for SquareWell {
    fn name(&self) -> &'static str {
        "well"
    }

    fn value(&self, x: f64) -> f64 {
        if x.abs() < 0.5 * self.width {
            self.mean / self.width
        } else {
            0.0
        }
    }

    fn support(&self) -> (f64, f64) {
        (-0.5 * self.width, 0.5 * self.width)
    }

    fn kinks(&self) -> Vec<f64> {
        vec![-0.5 * self.width, 0.5 * self.width]
    }
}

/// `-c1 kappa` for a curvature profile.
#[derive(Debug)]
pub struct FromCurvature {
    pub kappa: Arc<dyn Curvature>,
    pub c1: f64,
}

impl Potential for FromCurvature {
    fn name(&self) -> &'static str {
        "kappa"
    }

    fn value(&self, x: f64) -> f64 {
        -self.c1 * self.kappa.value(x)
    }

    fn support(&self) -> (f64, f64) {
        self.kappa.support()
    }

    fn kinks(&self) -> Vec<f64> {
        self.kappa.kinks()
    }
}

/// Smooth bump with integral `mean`, reusing the curvature bump shape.
#[derive(Debug)]
pub struct SmoothBump(pub CurvatureBump);

impl Potential for SmoothBump {
    fn name(&self) -> &'static str {
        "bump"
    }

    fn value(&self, x: f64) -> f64 {
        self.0.value(x)
    }

    fn support(&self) -> (f64, f64) {
        self.0.support()
    }
}

fn positive_width(a: &Args) -> Result<f64> {
    let width = a.get("width", 1.0);
    if !(width > 0.0) {
        return Err(Error::Config(format!("potential width {width} must be positive")));
    }
    Ok(width)
}

pub fn potentials() -> &'static Registry<dyn Potential> {
    static REG: OnceLock<Registry<dyn Potential>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn Potential> = Registry::new("potential");
        r.register("well", "square well (args: mean, width)", |a| {
            Ok(Box::new(SquareWell { mean: a.get("mean", -2.0), width: positive_width(a)? }))
        });
        r.register("bump", "smooth bump (args: mean, width, center)", |a| {
            let width = positive_width(a)?;
            Ok(Box::new(SmoothBump(CurvatureBump { center: a.get("center", 0.0), width, mean: a.get("mean", -2.0) })))
        });
        r.register("kappa", "-c1 kappa for a curvature bump (args: mean of kappa, width, center)", |a| {
            let width = positive_width(a)?;
            let kappa = CurvatureBump { center: a.get("center", 0.0), width, mean: a.get("mean", 1.0) };
            Ok(Box::new(FromCurvature { kappa: Arc::new(kappa), c1: reference().0.c1 }))
        });
        r
    })
}

/// A potential with its integral.
#[derive(Debug, Clone)]
pub struct PotentialProfile {
    pub v: Arc<dyn Potential>,
    /// `int V`.
    pub mean: f64,
}

impl PotentialProfile {
    pub fn new(v: Arc<dyn Potential>) -> Result<Self> {
        let (a, b) = v.support();
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Config(format!("potential support [{a}, {b}] must be a bounded interval")));
        }
        let mut p = Self { v, mean: 0.0 };
        p.mean = p.integrate(|_, v| v);
        Ok(p)
    }

    pub fn build(name: &str, args: &Args) -> Result<Self> {
        Self::new(Arc::from(potentials().build(name, args)?))
    }

    pub fn value(&self, x: f64) -> f64 {
        self.v.value(x)
    }

    pub fn support(&self) -> (f64, f64) {
        self.v.support()
    }

    /// Panel breaks over `[lo, hi]` with the kinks that fall inside.
    pub fn breaks(&self, lo: f64, hi: f64, panels: usize) -> Vec<f64> {
        with_splits(uniform_breaks(lo, hi, (hi - lo) / panels as f64), &self.v.kinks())
    }

    /// `int F(x, V(x)) dx` over the support.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let (a, b) = self.support();
        gauss20().composite(&self.breaks(a, b, 64), 1, |x| f(x, self.value(x)))
    }

    pub fn min_value(&self) -> f64 {
        let (a, b) = self.support();
        (0..=1000).map(|i| self.value(a + (b - a) * i as f64 / 1000.0)).fold(0.0, f64::min)
    }
}
