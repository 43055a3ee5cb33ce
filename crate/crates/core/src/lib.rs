//! Numerical toolkit for bound states of the magnetic Neumann Laplacian on
//! almost-flat corners and slightly curved half-planes.

pub mod corner;
pub mod curved;
pub mod degennes;
pub mod error;
pub mod gapfit;
pub mod magnetic2d;
pub mod quad;
pub mod registry;
pub mod tridiag;
pub mod weak;

pub use error::{Error, Result};
