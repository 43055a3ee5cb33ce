//! Upper bounds for smooth boundaries with compactly supported curvature.

mod bound;
mod envelope;
mod form;
mod profile;

pub use bound::{curved_sweep, curved_upper_bound, fit_curved_sweep, CurvedBound, CurvedBoundConfig};
pub use envelope::{BumpEnvelope, Envelope, ExponentialEnvelope};
pub use form::{compute_a, effective_form, norm_inverse_expansion, tubular_form, ACoefficient, TubularForm, TubularTrialState, TUBE_LIMIT};
pub use profile::{curvatures, Bump, Curvature, CurvatureProfile, Dipole, Table};
