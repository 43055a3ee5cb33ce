use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest opening perturbation and transition width accepted; the
/// construction relies on small-angle geometry.
pub const MAX_DELTA: f64 = 0.3;
pub const MAX_GAMMA: f64 = 0.6;

/// Parameters of the corner trial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerTrialConfig {
    pub delta: f64,
    pub gamma: f64,
    pub ell: f64,
    pub epsilon: f64,
    /// Transition profile name (see [`super::transitions`]).
    pub chi: String,
    /// Transverse cutoff name (see [`crate::degennes::cutoffs`]).
    pub zeta: String,
}

impl CornerTrialConfig {
    /// Default scalings `gamma = delta^(1/2)`, `ell = delta^(-1/2)`,
    /// `epsilon = 1`, linear transition.
    pub fn with_defaults(delta: f64) -> Self {
        Self {
            delta,
            gamma: delta.sqrt(),
            ell: delta.powf(-0.5),
            epsilon: 1.0,
            chi: "linear".into(),
            zeta: "mollifier".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { delta, gamma, ell, epsilon, .. } = *self;
        if !(delta > 0.0 && delta <= gamma && gamma < PI - delta) {
            return Err(Error::Config(format!("need 0 < delta <= gamma < pi - delta, got delta = {delta}, gamma = {gamma}")));
        }
        if delta > MAX_DELTA || gamma > MAX_GAMMA {
            return Err(Error::Config(format!(
                "delta = {delta}, gamma = {gamma} outside the small-angle range (delta <= {MAX_DELTA}, gamma <= {MAX_GAMMA})"
            )));
        }
        if !(ell > 0.0 && epsilon > 0.0) {
            return Err(Error::Config(format!("ell = {ell} and epsilon = {epsilon} must be positive")));
        }
        let reach = ell * (0.5 * (delta + gamma)).tan();
        if reach > epsilon {
            return Err(Error::Config(format!(
                "longitudinal plateau epsilon = {epsilon} does not cover the transition sector (needs {reach:.4})"
            )));
        }
        Ok(())
    }
}

/// Derived angles and maps of the sector `{x2 > 0, x2 / tan(delta) > -x1}`,
/// whose opening is `pi - delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerGeometry {
    pub delta: f64,
    pub gamma: f64,
    pub ell: f64,
}

/// Region of the sector carrying a given branch of the trial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    TrapezoidPlus,
    SectorPlus,
    SectorMinus,
    TrapezoidMinus,
    Outside,
}

impl CornerGeometry {
    pub fn new(delta: f64, gamma: f64, ell: f64) -> Self {
        Self { delta, gamma, ell }
    }

    /// Polar angle of the bisector.
    pub fn bisector(&self) -> f64 {
        0.5 * (PI - self.delta)
    }

    /// Polar angles bounding the transition sectors.
    pub fn transition_angles(&self) -> (f64, f64) {
        let b = self.bisector();
        (b - 0.5 * self.gamma, b + 0.5 * self.gamma)
    }

    /// Radius `ell / cos((delta + gamma) / 2)` of the transition sectors.
    pub fn sector_radius(&self) -> f64 {
        self.ell / (0.5 * (self.delta + self.gamma)).cos()
    }

    /// Reflection in the bisector line.
    pub fn reflect(&self, x: [f64; 2]) -> [f64; 2] {
        reflect(self.delta, x)
    }

    /// Whether `x` lies in the open sector, i.e. has polar angle in
    /// `(0, pi - delta)`.
    pub fn contains(&self, x: [f64; 2]) -> bool {
        let theta = x[1].atan2(x[0]);
        x[1] > 0.0 && theta < PI - self.delta
    }

    /// Branch of the trial state at `x`. Points with transverse distance
    /// beyond `ell` are outside the support.
    pub fn region(&self, x: [f64; 2]) -> Region {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return Region::TrapezoidPlus;
        }
        let theta = x[1].atan2(x[0]);
        if !(0.0..=PI - self.delta).contains(&theta) {
            return Region::Outside;
        }
        let (lo, hi) = self.transition_angles();
        let b = self.bisector();
        if theta < b {
            if r * theta.sin() >= self.ell {
                Region::Outside
            } else if theta <= lo {
                Region::TrapezoidPlus
            } else {
                Region::SectorPlus
            }
        } else if r * (theta + self.delta).sin() >= self.ell {
            Region::Outside
        } else if theta >= hi {
            Region::TrapezoidMinus
        } else {
            Region::SectorMinus
        }
    }
}

/// Reflection in the line of polar angle `(pi - delta) / 2`.
pub fn reflect(delta: f64, x: [f64; 2]) -> [f64; 2] {
    let (s, c) = delta.sin_cos();
    [-c * x[0] + s * x[1], s * x[0] + c * x[1]]
}

/// Gauge-matching phase between the reflected potential and `(-y2, 0)`.
pub fn matching_phase(delta: f64, y: [f64; 2]) -> f64 {
    let s = delta.sin();
    (2.0 * delta).sin() / 4.0 * (y[0] * y[0] - y[1] * y[1]) - y[0] * y[1] * s * s
}

/// Gradient of [`matching_phase`].
pub fn matching_phase_gradient(delta: f64, y: [f64; 2]) -> [f64; 2] {
    let s2 = delta.sin().powi(2);
    let h = 0.5 * (2.0 * delta).sin();
    [h * y[0] - y[1] * s2, -h * y[1] - y[0] * s2]
}
