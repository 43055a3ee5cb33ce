use num_complex::Complex64;

use super::geometry::{CornerGeometry, CornerTrialConfig, Region};
use super::profiles::{transitions, Transition};
use crate::degennes::{CutGroundState, CutoffProfile, DeGennesSolution, GroundState, UniversalConstants};
use crate::error::{Error, Result};
use crate::registry::Args;

/// Gluing tolerance between neighbouring branches.
pub const GLUE_TOL: f64 = 1e-12;

/// The piecewise trial state on the sector: a half-plane ground state on
/// each trapezoid, glued across the bisector through two transition sectors.
#[derive(Debug)]
pub struct CornerTrial {
    pub config: CornerTrialConfig,
    pub geometry: CornerGeometry,
    pub xi0: f64,
    pub theta0: f64,
    pub c1: f64,
    pub profile: CutGroundState,
    pub chi: Box<dyn Transition>,
    /// Linear and quadratic coefficients of the transition phase.
    pub a: f64,
    pub b: f64,
}

/// Transition phase and its polar derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub value: f64,
    pub d_r: f64,
    pub d_theta: f64,
}

impl CornerTrial {
    pub fn new(config: &CornerTrialConfig, constants: &UniversalConstants, ground: &DeGennesSolution) -> Result<Self> {
        config.validate()?;
        let chi = transitions().build(&config.chi, &Args::new())?;
        let cutoff = CutoffProfile::new(config.ell, &config.zeta)?;
        let profile = CutGroundState::new(GroundState::new(ground), cutoff);
        let (delta, gamma) = (config.delta, config.gamma);
        Ok(Self {
            config: config.clone(),
            geometry: CornerGeometry::new(delta, gamma, config.ell),
            xi0: constants.xi0,
            theta0: constants.theta0,
            c1: constants.c1,
            profile,
            chi,
            a: constants.xi0 * (0.5 * (delta + gamma)).sin(),
            b: 0.25 * delta.sin() * gamma.cos(),
        })
    }

    pub fn delta(&self) -> f64 {
        self.config.delta
    }

    pub fn gamma(&self) -> f64 {
        self.config.gamma
    }

    /// Rescaled angle `2 (theta - theta_bisector) / gamma`.
    pub fn transition_variable(&self, theta: f64) -> f64 {
        2.0 * (theta - self.geometry.bisector()) / self.gamma()
    }

    /// Transition phase `b r^2 - chi (a r - b r^2)`.
    pub fn phase(&self, r: f64, theta: f64) -> Phase {
        let s = self.transition_variable(theta);
        let (chi, dchi) = (self.chi.value(s), self.chi.slope(s) * 2.0 / self.gamma());
        let lin = self.a * r - self.b * r * r;
        Phase {
            value: self.b * r * r - chi * lin,
            d_r: 2.0 * self.b * r - chi * (self.a - 2.0 * self.b * r),
            d_theta: -dchi * lin,
        }
    }

    /// Transverse coordinate, phase and polar phase derivatives of `branch`
    /// at `(r, theta)`. Every branch has the form `f(rho) exp(i beta)` with
    /// `|grad rho| = 1`.
    pub fn branch_parts(&self, branch: Region, r: f64, theta: f64) -> Option<(f64, Phase)> {
        let d = self.delta();
        match branch {
            Region::TrapezoidPlus => {
                let (s, c) = theta.sin_cos();
                let phase = Phase { value: self.xi0 * r * c, d_r: self.xi0 * c, d_theta: -self.xi0 * r * s };
                Some((r * s, phase))
            }
            Region::SectorPlus => Some((r * theta.sin(), self.phase(r, theta))),
            Region::SectorMinus => Some((r * (theta + d).sin(), self.phase(r, theta))),
            Region::TrapezoidMinus => {
                let (s, c) = (theta + d).sin_cos();
                let (s2, c2) = (2.0 * theta + d).sin_cos();
                let half = 0.5 * d.sin();
                let phase = Phase {
                    value: self.xi0 * r * c - r * r * half * c2,
                    d_r: self.xi0 * c - 2.0 * r * half * c2,
                    d_theta: -self.xi0 * r * s + 2.0 * r * r * half * s2,
                };
                Some((r * s, phase))
            }
            Region::Outside => None,
        }
    }

    /// Value of the formula for `branch` at `x`, whether or not `x` lies in
    /// that branch's region.
    pub fn branch_value(&self, branch: Region, x: [f64; 2]) -> Complex64 {
        let r = x[0].hypot(x[1]);
        let theta = x[1].atan2(x[0]);
        match self.branch_parts(branch, r, theta) {
            Some((rho, phase)) => Complex64::from_polar(self.profile.value(rho), phase.value),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// The trial state (without longitudinal cutoff) at `x`.
    pub fn value(&self, x: [f64; 2]) -> Complex64 {
        self.branch_value(self.geometry.region(x), x)
    }

    /// Magnetic energy density `|(-i grad + A) psi|^2` for `A = (-x2, 0)` and
    /// squared modulus of `branch` at `(r, theta)`.
    pub fn density(&self, branch: Region, r: f64, theta: f64) -> (f64, f64) {
        let Some((rho, phase)) = self.branch_parts(branch, r, theta) else {
            return (0.0, 0.0);
        };
        let (f, df) = self.profile.eval(rho);
        let (s, c) = theta.sin_cos();
        let radial = phase.d_r - r * s * c;
        let angular = phase.d_theta / r + r * s * s;
        (df * df + f * f * (radial * radial + angular * angular), f * f)
    }

    /// Largest jump between neighbouring branch formulas on the internal
    /// boundaries, sampled at `count` radii per boundary up to the sector
    /// radius.
    pub fn gluing_mismatch(&self, count: usize) -> f64 {
        let (lo, hi) = self.geometry.transition_angles();
        let mid = self.geometry.bisector();
        let joints = [
            (lo, Region::TrapezoidPlus, Region::SectorPlus),
            (mid, Region::SectorPlus, Region::SectorMinus),
            (hi, Region::SectorMinus, Region::TrapezoidMinus),
        ];
        let r_max = self.geometry.sector_radius();
        let mut worst: f64 = 0.0;
        for (theta, left, right) in joints {
            for k in 1..=count {
                let r = r_max * k as f64 / (count + 1) as f64;
                let x = [r * theta.cos(), r * theta.sin()];
                let (u, v) = (self.branch_value(left, x), self.branch_value(right, x));
                worst = worst.max((u - v).norm() / (1.0 + u.norm()));
            }
        }
        worst
    }

    /// Fails when the branches do not glue continuously.
    pub fn check_gluing(&self) -> Result<()> {
        let m = self.gluing_mismatch(64);
        if m > GLUE_TOL {
            return Err(Error::Assembly(format!("branch mismatch {m:.3e} across an internal boundary")));
        }
        Ok(())
    }
}

/// Builds the trial state and verifies its gluing.
pub fn assemble_trial_state(
    config: &CornerTrialConfig,
    constants: &UniversalConstants,
    ground: &DeGennesSolution,
) -> Result<CornerTrial> {
    let trial = CornerTrial::new(config, constants, ground)?;
    trial.check_gluing()?;
    Ok(trial)
}
