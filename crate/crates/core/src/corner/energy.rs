use serde::Serialize;

use super::geometry::Region;
use super::profiles::Longitudinal;
use super::trial::CornerTrial;
use crate::error::{Error, Result};
use crate::quad::{gauss20, uniform_breaks, with_splits};

/// Relative disagreement tolerated between two quadrature refinements.
pub const REFINEMENT_TOL: f64 = 1e-9;

/// One-dimensional integrals of the cut profile `f_ell` used by the energy
/// decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileIntegrals {
    /// `int f^2`.
    pub norm: f64,
    /// `int f'^2 + (t - xi0)^2 f^2`.
    pub energy: f64,
    /// `int t f^2`.
    pub first_moment: f64,
    /// `int (f'^2 + (t - xi0)^2 f^2) t`.
    pub weighted_energy: f64,
    /// `int (t - xi0)(t - 2 xi0) t f^2`.
    pub mixed_moment: f64,
    /// `int zeta_ell'^2 f*^2`, the localization error of the cutoff.
    pub leak: f64,
}

impl ProfileIntegrals {
    pub fn of(trial: &CornerTrial) -> Self {
        let p = &trial.profile;
        let xi0 = trial.xi0;
        let breaks = uniform_breaks(0.0, p.support(), 0.125);
        let rule = gauss20();
        let mut out = [0.0; 6];
        for (t, w) in breaks.windows(2).flat_map(|ab| rule.mapped(ab[0], ab[1])) {
            let (f, df) = p.eval(t);
            let kinetic = df * df + (t - xi0).powi(2) * f * f;
            let dz = p.cutoff.derivative(t) * p.ground.value(t);
            let terms = [f * f, kinetic, t * f * f, t * kinetic, (t - xi0) * (t - 2.0 * xi0) * t * f * f, dz * dz];
            for (o, v) in out.iter_mut().zip(terms) {
                *o += w * v;
            }
        }
        Self {
            norm: out[0],
            energy: out[1],
            first_moment: out[2],
            weighted_energy: out[3],
            mixed_moment: out[4],
            leak: out[5],
        }
    }

    /// `J = int (f'^2 + (t - xi0)^2 f^2) t - int (t - xi0)(t - 2 xi0) t f^2`.
    pub fn j(&self) -> f64 {
        self.weighted_energy - self.mixed_moment
    }
}

/// Energy, mass and excess `int (e - theta0 |psi|^2)` over a region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct RegionIntegrals {
    pub energy: f64,
    pub mass: f64,
    pub excess: f64,
}

impl RegionIntegrals {
    fn gap(&self, other: &Self) -> f64 {
        let scale = self.energy.abs().max(self.mass.abs()).max(1e-300);
        (self.energy - other.energy).abs().max((self.excess - other.excess).abs()) / scale
    }
}

/// Integrates `branch` over its angular range `(lo, hi)` and transverse
/// coordinate below the profile support. The transverse coordinate replaces
/// the radius so the inner integral runs over a fixed interval.
fn polar_integrals(trial: &CornerTrial, branch: Region, lo: f64, hi: f64, angular: usize, radial: f64) -> RegionIntegrals {
    let shift = match branch {
        Region::SectorMinus | Region::TrapezoidMinus => trial.delta(),
        _ => 0.0,
    };
    let mid = trial.geometry.bisector();
    let half = 0.5 * trial.gamma();
    let kinks: Vec<f64> = trial.chi.kinks().into_iter().map(|s| mid + half * s).collect();
    let angles = with_splits(uniform_breaks(lo, hi, (hi - lo) / angular as f64), &kinks);
    let rho = uniform_breaks(0.0, trial.profile.support(), radial);
    let rule = gauss20();
    let theta0 = trial.theta0;
    let mut acc = RegionIntegrals::default();
    for (theta, wt) in angles.windows(2).flat_map(|ab| rule.mapped(ab[0], ab[1])) {
        let s = (theta + shift).sin();
        for (t, wr) in rho.windows(2).flat_map(|ab| rule.mapped(ab[0], ab[1])) {
            let r = t / s;
            let (e, m) = trial.density(branch, r, theta);
            let w = wt * wr * t / (s * s);
            acc.energy += w * e;
            acc.mass += w * m;
            acc.excess += w * (e - theta0 * m);
        }
    }
    acc
}

/// Sector integrals at two refinements; fails when they disagree.
fn refined(trial: &CornerTrial, branch: Region, lo: f64, hi: f64) -> Result<(RegionIntegrals, f64)> {
    let coarse = polar_integrals(trial, branch, lo, hi, 4, 0.25);
    let fine = polar_integrals(trial, branch, lo, hi, 8, 0.125);
    let gap = fine.gap(&coarse);
    if gap > REFINEMENT_TOL {
        return Err(Error::Consistency(format!("{branch:?} quadrature not converged: refinements differ by {gap:.3e}")));
    }
    Ok((fine, gap))
}

/// Energy on one transition sector with the one-dimensional model value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorEnergy {
    pub integrals: RegionIntegrals,
    /// `(gamma / 2) J_{delta, gamma}`.
    pub model: f64,
    /// Relative gap between the two quadrature refinements.
    pub refinement_gap: f64,
}

/// `int (f'^2 + (t - (xi0 (1 + delta/gamma) - delta t / (2 gamma)))^2 f^2) t`.
pub fn sector_model_integral(trial: &CornerTrial) -> f64 {
    let (d, g, xi0) = (trial.delta(), trial.gamma(), trial.xi0);
    let p = &trial.profile;
    gauss20().composite(&uniform_breaks(0.0, p.support(), 0.125), 1, |t| {
        let (f, df) = p.eval(t);
        let shift = xi0 * (1.0 + d / g) - d * t / (2.0 * g);
        (df * df + (t - shift).powi(2) * f * f) * t
    })
}

/// Magnetic energy on the transition sector next to the positive edge.
pub fn sector_energy(trial: &CornerTrial) -> Result<SectorEnergy> {
    let (lo, _) = trial.geometry.transition_angles();
    let (integrals, refinement_gap) = refined(trial, Region::SectorPlus, lo, trial.geometry.bisector())?;
    Ok(SectorEnergy { integrals, model: 0.5 * trial.gamma() * sector_model_integral(trial), refinement_gap })
}

/// Magnetic energy on the transition sector next to the reflected edge.
pub fn mirror_sector_energy(trial: &CornerTrial) -> Result<SectorEnergy> {
    let (_, hi) = trial.geometry.transition_angles();
    let (integrals, refinement_gap) = refined(trial, Region::SectorMinus, trial.geometry.bisector(), hi)?;
    Ok(SectorEnergy { integrals, model: 0.5 * trial.gamma() * sector_model_integral(trial), refinement_gap })
}

/// Weighted energy on the trapezoid next to the positive edge, as the
/// rectangle `(0, inf) x (0, ell)` minus the wedge under the transition
/// sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapezoidEnergy {
    /// `|eta|^2 q(f_ell)`.
    pub rectangle: f64,
    /// Wedge energy by polar quadrature.
    pub wedge: f64,
    /// Wedge energy in closed form `tan((delta + gamma)/2) int (f'^2 + (t - xi0)^2 f^2) t`.
    pub wedge_closed_form: f64,
    pub energy: f64,
    pub mass: f64,
    pub excess: f64,
}

pub fn trapezoid_energy(trial: &CornerTrial, eta: &dyn Longitudinal) -> Result<TrapezoidEnergy> {
    let tilt = (0.5 * (trial.delta() + trial.gamma())).tan();
    check_plateau(trial, eta)?;
    let p = ProfileIntegrals::of(trial);
    let (lo, _) = trial.geometry.transition_angles();
    let (wedge, _) = refined(trial, Region::TrapezoidPlus, lo, std::f64::consts::FRAC_PI_2)?;
    let closed = tilt * p.weighted_energy;
    if (wedge.energy - closed).abs() > REFINEMENT_TOL * closed.max(1e-300) {
        return Err(Error::Consistency(format!("wedge energy {:.12e} disagrees with closed form {closed:.12e}", wedge.energy)));
    }
    let norm = eta.norm_sq();
    Ok(TrapezoidEnergy {
        rectangle: norm * p.energy,
        wedge: wedge.energy,
        wedge_closed_form: closed,
        energy: norm * p.energy - closed,
        mass: norm * p.norm - tilt * p.first_moment,
        excess: norm * (p.energy - trial.theta0 * p.norm) - tilt * (p.weighted_energy - trial.theta0 * p.first_moment),
    })
}

fn check_plateau(trial: &CornerTrial, eta: &dyn Longitudinal) -> Result<()> {
    let reach = trial.config.ell * (0.5 * (trial.delta() + trial.gamma())).tan();
    if eta.plateau() < reach {
        return Err(Error::Config(format!(
            "longitudinal plateau {} does not cover the transition sectors (needs {reach:.4})",
            eta.plateau()
        )));
    }
    Ok(())
}

/// Rayleigh quotient of the truncated trial state and its decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerBound {
    pub delta: f64,
    pub gamma: f64,
    pub ell: f64,
    pub theta0: f64,
    pub c1: f64,
    pub eta: String,
    pub eta_norm_sq: f64,
    pub eta_slope_norm_sq: f64,
    pub profile: ProfileIntegrals,
    pub j: f64,
    /// `J - theta0 int t f^2`, equal to `C1` up to the profile cutoff.
    pub j_excess: f64,
    pub sector_plus: SectorEnergy,
    pub sector_minus: SectorEnergy,
    pub trapezoid: TrapezoidEnergy,
    /// `|Psi_tr|^2`.
    pub norm_sq: f64,
    /// Twice `|eta|^2 - (delta/2) int t f^2`.
    pub norm_model: f64,
    /// `Q(Psi_tr) - theta0 |Psi_tr|^2`.
    pub excess: f64,
    pub quotient: f64,
    /// `theta0 - quotient`.
    pub gap: f64,
    /// `(|eta'|^2 - C1 delta / 2) / |eta|^2`.
    pub leading: f64,
    /// Size of the neglected terms `delta^(3/2)/|eta|^2 + delta |eta'|^2/|eta|^4 + delta^3 |eta'|^2/|eta|^2`.
    pub remainder_scale: f64,
    /// Relative energy mismatch between the two halves of the sector.
    pub symmetry_defect: f64,
}

/// Upper bound for the ground level of the sector from the truncated trial
/// state `eta Psi`.
pub fn corner_upper_bound(trial: &CornerTrial, eta: &dyn Longitudinal) -> Result<CornerBound> {
    let p = ProfileIntegrals::of(trial);
    let sector_plus = sector_energy(trial)?;
    let sector_minus = mirror_sector_energy(trial)?;
    let trapezoid = trapezoid_energy(trial, eta)?;
    let (delta, theta0) = (trial.delta(), trial.theta0);
    let (norm, slope) = (eta.norm_sq(), eta.slope_norm_sq());

    // The two halves carry equal mass; the reflected trapezoid has the same
    // energy as the original by the gauge symmetry.
    let half_mass = trapezoid.mass + sector_plus.integrals.mass;
    let norm_sq = 2.0 * half_mass;
    let excess = 2.0 * trapezoid.excess
        + sector_plus.integrals.excess
        + sector_minus.integrals.excess
        + 2.0 * slope * p.norm;
    let quotient = theta0 + excess / norm_sq;
    let half_plus = trapezoid.energy + sector_plus.integrals.energy;
    let half_minus = trapezoid.energy + sector_minus.integrals.energy;
    let leading = (slope - 0.5 * trial.c1 * delta) / norm;
    let remainder_scale = delta.powf(1.5) / norm + delta * slope / (norm * norm) + delta.powi(3) * slope / norm;
    Ok(CornerBound {
        delta,
        gamma: trial.gamma(),
        ell: trial.config.ell,
        theta0,
        c1: trial.c1,
        eta: eta.name().into(),
        eta_norm_sq: norm,
        eta_slope_norm_sq: slope,
        profile: p,
        j: p.j(),
        j_excess: p.j() - theta0 * p.first_moment,
        sector_plus,
        sector_minus,
        trapezoid,
        norm_sq,
        norm_model: 2.0 * (norm - 0.5 * delta * p.first_moment),
        excess,
        quotient,
        gap: theta0 - quotient,
        leading,
        remainder_scale,
        symmetry_defect: (half_plus - half_minus).abs() / half_plus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corner::{assemble_trial_state, exponential, CornerTrialConfig};
    use crate::degennes::reference;

    fn trial(delta: f64) -> CornerTrial {
        let (c, g) = reference();
        assemble_trial_state(&CornerTrialConfig::with_defaults(delta), c, g).unwrap()
    }

    #[test]
    fn sector_masses_mirror() {
        let t = trial(1e-2);
        let a = sector_energy(&t).unwrap();
        let b = mirror_sector_energy(&t).unwrap();
        assert!((a.integrals.mass - b.integrals.mass).abs() < 1e-12 * a.integrals.mass);
    }

    #[test]
    fn localization_error_matches_energy_excess() {
        let t = trial(1e-2);
        let p = ProfileIntegrals::of(&t);
        assert!((p.energy - t.theta0 * p.norm - p.leak).abs() < 1e-11);
    }

    #[test]
    fn short_plateau_is_rejected() {
        let t = trial(1e-2);
        let eta = exponential(0.1, 0.01).unwrap();
        assert!(matches!(trapezoid_energy(&t, eta.as_ref()), Err(Error::Config(_))));
    }
}
