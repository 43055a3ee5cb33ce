use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::quad::{gauss20, uniform_breaks, with_splits};
use crate::registry::{Args, Registry};

/// Compactly supported boundary curvature as a function of arclength.
pub trait Curvature: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn value(&self, s: f64) -> f64;
    /// Closed interval outside which the curvature vanishes.
    fn support(&self) -> (f64, f64);
    /// Points inside the support where the profile is not smooth.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

fn smooth_bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// `int_{-1}^{1} exp(-1 / (1 - x^2)) dx`.
fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| gauss20().composite(&uniform_breaks(-1.0, 1.0, 0.02), 1, smooth_bump))
}

/// Smooth bump of half-width `width` centred at `center` with integral `mean`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
    pub mean: f64,
}

impl Curvature for Bump {
    fn name(&self) -> &'static str {
        "bump"
    }

    fn value(&self, s: f64) -> f64 {
        self.mean / (self.width * bump_mass()) * smooth_bump((s - self.center) / self.width)
    }

    fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }
}

/// Two bumps of opposite sign, `+` on the left: zero total curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dipole {
    pub center: f64,
    pub width: f64,
    /// Integral of each lobe.
    pub lobe: f64,
}

impl Dipole {
    fn lobes(&self) -> (Bump, Bump) {
        let w = 0.5 * self.width;
        (
            Bump { center: self.center - w, width: w, mean: self.lobe },
            Bump { center: self.center + w, width: w, mean: -self.lobe },
        )
    }
}

impl Curvature for Dipole {
    fn name(&self) -> &'static str {
        "dipole"
    }

    fn value(&self, s: f64) -> f64 {
        let (a, b) = self.lobes();
        a.value(s) + b.value(s)
    }

    fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    fn kinks(&self) -> Vec<f64> {
        vec![self.center]
    }
}

/// Piecewise-linear interpolation of tabulated `(s, kappa)` samples, zero
/// outside the table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub s: Vec<f64>,
    pub kappa: Vec<f64>,
}

impl Table {
    pub fn new(s: Vec<f64>, kappa: Vec<f64>) -> Result<Self> {
        if s.len() < 2 || s.len() != kappa.len() {
            return Err(Error::Data(format!("curvature table needs >= 2 matching samples, got {} and {}", s.len(), kappa.len())));
        }
        if s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Data("curvature table abscissae must increase strictly".into()));
        }
        if kappa[0] != 0.0 || kappa[kappa.len() - 1] != 0.0 {
            return Err(Error::Data("curvature table must vanish at both ends (compact support)".into()));
        }
        Ok(Self { s, kappa })
    }

    /// Reads a two-column `s,kappa` CSV file with a header row.
    pub fn from_csv(path: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let (mut s, mut kappa) = (Vec::new(), Vec::new());
        for row in reader.records() {
            let row = row?;
            let parse = |i: usize| -> Result<f64> {
                row.get(i)
                    .and_then(|v| v.trim().parse().ok())
                    .ok_or_else(|| Error::Data(format!("bad curvature row {:?} in {path}", row)))
            };
            s.push(parse(0)?);
            kappa.push(parse(1)?);
        }
        Self::new(s, kappa)
    }
}

impl Curvature for Table {
    fn name(&self) -> &'static str {
        "table"
    }

    fn value(&self, s: f64) -> f64 {
        let n = self.s.len();
        if s <= self.s[0] || s >= self.s[n - 1] {
            return 0.0;
        }
        let k = self.s.partition_point(|&x| x <= s) - 1;
        let w = (s - self.s[k]) / (self.s[k + 1] - self.s[k]);
        self.kappa[k] * (1.0 - w) + self.kappa[k + 1] * w
    }

    fn support(&self) -> (f64, f64) {
        (self.s[0], self.s[self.s.len() - 1])
    }

    fn kinks(&self) -> Vec<f64> {
        self.s[1..self.s.len() - 1].to_vec()
    }
}

pub fn curvatures() -> &'static Registry<dyn Curvature> {
    static REG: OnceLock<Registry<dyn Curvature>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn Curvature> = Registry::new("curvature profile");
        r.register("bump", "smooth bump (args: mean, width, center)", |a| {
            let width = a.get("width", 1.0);
            if !(width > 0.0) {
                return Err(Error::Config(format!("bump width {width} must be positive")));
            }
            Ok(Box::new(Bump { center: a.get("center", 0.0), width, mean: a.get("mean", 1.0) }))
        });
        r.register("dipole", "zero-mean pair of opposite bumps (args: mean = lobe integral, width, center)", |a| {
            let width = a.get("width", 1.0);
            if !(width > 0.0) {
                return Err(Error::Config(format!("dipole width {width} must be positive")));
            }
            Ok(Box::new(Dipole { center: a.get("center", 0.0), width, lobe: a.get("mean", 1.0) }))
        });
        r.register("table", "piecewise-linear table from a two-column CSV (path)", |a| {
            let path = a.path.as_deref().ok_or_else(|| Error::Config("table curvature needs a file path".into()))?;
            Ok(Box::new(Table::from_csv(path)?))
        });
        r
    })
}

/// A curvature with the integrals used throughout the tubular analysis.
#[derive(Debug, Clone)]
pub struct CurvatureProfile {
    pub kappa: Arc<dyn Curvature>,
    /// `int kappa`.
    pub mean: f64,
    /// `int kappa^2`.
    pub square_integral: f64,
}

impl CurvatureProfile {
    pub fn new(kappa: Arc<dyn Curvature>) -> Result<Self> {
        let (a, b) = kappa.support();
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Config(format!("curvature support [{a}, {b}] must be a bounded interval")));
        }
        let mut p = Self { kappa, mean: 0.0, square_integral: 0.0 };
        p.mean = p.integrate(|_, k| k);
        p.square_integral = p.integrate(|_, k| k * k);
        Ok(p)
    }

    pub fn build(name: &str, args: &Args) -> Result<Self> {
        Self::new(Arc::from(curvatures().build(name, args)?))
    }

    pub fn value(&self, s: f64) -> f64 {
        self.kappa.value(s)
    }

    pub fn support(&self) -> (f64, f64) {
        self.kappa.support()
    }

    pub fn max_abs(&self) -> f64 {
        self.nodes().iter().map(|&(s, _)| self.value(s).abs()).fold(0.0, f64::max)
    }

    /// Quadrature nodes and weights over the support, with panels split at
    /// kinks and at `s = 0`.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let (a, b) = self.support();
        let mut splits = self.kappa.kinks();
        splits.push(0.0);
        let breaks = with_splits(uniform_breaks(a, b, (b - a) / 64.0), &splits);
        breaks.windows(2).flat_map(|w| gauss20().mapped(w[0], w[1]).collect::<Vec<_>>()).collect()
    }

    /// `int F(s, kappa(s)) ds` with the shared rule.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        self.nodes().into_iter().map(|(s, w)| w * f(s, self.value(s))).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_has_requested_mean() {
        let p = CurvatureProfile::build("bump", &Args::new().with("mean", 2.0).with("width", 0.5)).unwrap();
        assert!((p.mean - 2.0).abs() < 1e-12);
        assert!(p.square_integral > 0.0);
        assert_eq!(p.value(0.6), 0.0);
    }

    #[test]
    fn table_interpolates_and_validates() {
        let t = Table::new(vec![-1.0, 0.0, 1.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert!((t.value(0.5) - 1.0).abs() < 1e-15);
        let p = CurvatureProfile::new(Arc::new(t)).unwrap();
        assert!((p.mean - 2.0).abs() < 1e-13);
        assert!(Table::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(Table::new(vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn table_reads_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.csv");
        std::fs::write(&path, "s,kappa\n-1,0\n0,1.5\n2,0\n").unwrap();
        let p = CurvatureProfile::build("table", &Args::new().with_path(path.to_str().unwrap())).unwrap();
        assert!((p.mean - 2.25).abs() < 1e-12);
    }
}
