//! Trial states and upper bounds for the magnetic Neumann Laplacian on a
//! sector of opening `pi - delta`.

pub mod energy;
pub mod fit;
pub mod geometry;
pub mod profiles;
pub mod symmetry;
pub mod trial;

pub use geometry::{reflect, CornerGeometry, CornerTrialConfig, Region};
pub use profiles::{exponential, longitudinals, transitions, Exponential, Linear, Longitudinal, Mollified, Plateau, Transition};
pub use symmetry::{magnetic_density, reflected_partner, BumpField, Bump, EdgeMode, Field, Trapezoid};
pub use trial::{assemble_trial_state, CornerTrial};
pub use energy::{
    corner_upper_bound, mirror_sector_energy, sector_energy, trapezoid_energy, CornerBound, ProfileIntegrals,
    RegionIntegrals, SectorEnergy, TrapezoidEnergy,
};
pub use fit::{
    corner_bound_at, corner_sweep, exponential_functional, fit_delta_squared_coefficient, optimize_eta,
    EtaOptimum,
};
pub use crate::gapfit::DeltaSquaredFit;
