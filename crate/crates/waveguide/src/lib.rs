//! Numerical workbench for the Helmholtz operator on planar branching
//! waveguides: flux-normalized wave bases on cylindrical arms, junction
//! scattering with modal radiation conditions, classical and augmented
//! scattering matrices, and trapped-mode detection.

pub mod cross_section;
pub mod error;
pub mod linalg;
pub mod quadrature;

pub use error::{Result, WgError};
