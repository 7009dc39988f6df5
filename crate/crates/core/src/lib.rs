//! Eigenvalue enclosures for half-line Dirac operators with integrable,
//! possibly non-Hermitian matrix potentials.
//!
//! The crate derives analytic regions that provably contain every
//! eigenvalue of `D0 + V` (disk unions around the gap edges, real spectral
//! gaps for Hermitian `V`, moment-based exclusion zones), and validates
//! them with two independent numerical eigenvalue locators: a dense
//! discretization of the sandwiched (Birman-Schwinger) resolvent, and an
//! Evans-function shooting method with winding-number zero counts.

pub mod birman_schwinger;
pub mod bounds;
pub mod dense;
pub mod error;
pub mod evans;
pub mod mat2;
pub mod nonrel;
pub mod potential;
pub mod quad;
pub mod resolvent;
pub mod spectral;

pub use error::{Result, SpectralError};
