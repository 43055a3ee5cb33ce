//! The Neumann half-line oscillator `-d^2/dt^2 + (t - xi)^2`: ground
//! states, the minimizing frequency, the universal constants derived from
//! it, and the cut-off ground states used to build trial states.

pub mod constants;
pub mod cutoff;
pub mod grid;
pub mod interp;
pub mod solver;

pub use constants::{
    build_f_ell, calibrate, find_theta0, moment, reference, weighted_energy_identity, CutProfileSamples,
    UniversalConstants, DEFAULT_BRACKET,
};
pub use cutoff::{cutoffs, Cutoff, CutoffProfile};
pub use grid::{schemes, HalfLineGrid, HalfLineScheme};
pub use interp::{CutGroundState, GroundState};
pub use solver::{solve_h_xi, solve_untruncated, verify_tail_decay, DeGennesSolution, DecayReport};
