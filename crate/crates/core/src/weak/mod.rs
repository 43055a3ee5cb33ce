//! Weakly coupled one-dimensional Schrödinger operators and their
//! delta-interaction limit.

mod form;
mod potential;
mod solve;

pub use form::{default_family, form_comparison, form_difference, pointwise_estimate_excess, CuspedGaussian, FormComparison};
pub use potential::{potentials, FromCurvature, Potential, PotentialProfile, SmoothBump, SquareWell};
pub use solve::{
    effective_spectrum, fit_convergence, graded_mesh, solve_l_delta, solve_m_delta, weak_sweep, ConvergenceFit, EffectiveSpectrum,
    WeakCouplingConfig, WeakCouplingResult, TAIL_LIMIT,
};
