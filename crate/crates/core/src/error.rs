//! Error type shared by all modules of the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// Numerical routines return `Err` instead of NaN-poisoned results whenever a
/// precondition fails (point on the essential spectrum, coupling too large for
/// a bound to apply, contour running through a zero, ...).
#[derive(Debug, Clone, Error)]
pub enum SpectralError {
    /// `z` is on (or numerically indistinguishable from) the essential
    /// spectrum of the free operator.
    #[error("point {z} is within {distance:.3e} of the essential spectrum")]
    EmbeddedPoint { z: Complex64, distance: f64 },

    /// The requested quantity is only defined for positive mass.
    #[error("operation requires m > 0 (massless case excluded)")]
    MasslessUndefined,

    /// Möbius image of `zeta` is a pole (`zeta^2 = 1`).
    #[error("zeta^2 = 1 is a pole of the spectral parameter map")]
    PoleAtZetaSquaredOne,

    /// Level-set disks only exist for `rho > 1`.
    #[error("level-set radius rho = {rho} must exceed 1")]
    RhoNotGreaterThanOne { rho: f64 },

    /// The coupling `v = |V|_1 / c` exceeds the range of the theorem in use.
    #[error("coupling v = {v} exceeds the admissible bound {limit}")]
    CouplingTooLarge { v: f64, limit: f64 },

    /// `cot(arg zeta)` is undefined because `zeta` is (numerically) real.
    #[error("arg(zeta) is too close to 0 or -pi; cot(t) undefined")]
    TangentUndefined,

    /// The scaled Wronskian vanished; the two basis solutions are dependent.
    #[error("scaled Wronskian vanishes; basis solutions degenerate")]
    WronskianVanishes,

    /// A denominator became too small for a bound to be meaningful.
    #[error("denominator |z^2 - (mc^2)^2| = {value:.3e} too small")]
    DegenerateDenominator { value: f64 },

    /// `|zeta|` left the range where the asymptotic basis is well conditioned.
    #[error("|zeta| = {zeta_abs:.3e} outside [1e-8, 1e8]; basis degenerate")]
    DegenerateBasis { zeta_abs: f64 },

    /// A scan region touches the essential spectrum.
    #[error("scan region within {distance:.3e} of the essential spectrum (margin {margin:.3e})")]
    RegionTouchesSpectrum { distance: f64, margin: f64 },

    /// The adaptive ODE integrator could not meet the tolerance.
    #[error("ODE step size underflow near x = {x}")]
    StiffnessFailure { x: f64 },

    /// A winding contour passes through (or too close to) a zero.
    #[error("contour passes through a zero ({attempts} perturbation attempts)")]
    ContourThroughZero { attempts: usize },

    /// Newton polish failed to converge.
    #[error("Newton iteration diverged near {z}")]
    NewtonDivergence { z: Complex64 },

    /// A root search did not converge to the requested tolerance.
    #[error("iteration did not converge: {what}")]
    NonConvergence { what: String },

    /// A potential definition is invalid (empty support, bad endpoints, ...).
    #[error("invalid potential: {reason}")]
    InvalidPotential { reason: String },

    /// Catch-all for invalid arguments.
    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: String },

    /// `z` lies on `[0, infinity)`, the essential spectrum of the limit
    /// Schroedinger operator.
    #[error("z = {z} lies on the half-line spectrum of the limit operator")]
    OnLimitSpectrum { z: Complex64 },
}

pub type Result<T> = std::result::Result<T, SpectralError>;
