//! Direct discretization of the magnetic Neumann Laplacian `(-i grad + A)^2`,
//! `A = (-x2, 0)`, on boundary strips of corners and curved half-planes.

pub mod band;
pub mod domain;
pub mod eigen;
pub mod operator;
pub mod study;

pub use band::BandCholesky;
pub use domain::{domain_kinds, BoundaryTag, CornerKind, CurvedKind, DomainKind, Mesh, TruncatedDomain, DEFAULT_DEPTH};
pub use eigen::{
    lowest_eigenvalues, ExtrapolationRecord, MeshExtrapolation, RadiusExtrapolation, SpectralReport, DEFAULT_SHIFT,
    RESIDUAL_LIMIT,
};
pub use operator::{
    assemble, fiber_eigenvalue, fiber_pencil, BoundaryRecord, Gauge, GaugeDescriptor, GaugeShift, SparseHermitianOperator,
    WaveShift,
};
pub use study::*;
