//! Matrix potentials on the half line: compactly supported profiles with
//! constant 2x2 matrix coefficients, their `L1` data, and the pointwise
//! polar factorization feeding the sandwiched-resolvent discretization.

use crate::bounds::MomentData;
use crate::error::{Result, SpectralError};
use crate::mat2::Mat2;
use crate::quad::adaptive_simpson;
use num_complex::Complex64;
use serde::Serialize;

/// Scalar spatial profile of one potential term. All profiles vanish beyond
/// a finite support end, so every potential in this crate is integrable with
/// finite first moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ProfileShape {
    /// Indicator of `[start, end)`.
    Step { start: f64, end: f64 },
    /// `exp(-((x - center)/width)^2)` on `[0, cutoff)`, zero beyond.
    TruncatedGaussian { center: f64, width: f64, cutoff: f64 },
    /// Smooth bump `exp(1 - 1/(1 - t^2))` with `t` the `[-1, 1]`-normalized
    /// coordinate of `(start, end)`; peak value 1, vanishing to all orders
    /// at the endpoints.
    Bump { start: f64, end: f64 },
}

impl ProfileShape {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            ProfileShape::Step { start, end } => {
                if x >= start && x < end {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileShape::TruncatedGaussian {
                center,
                width,
                cutoff,
            } => {
                if x >= 0.0 && x < cutoff {
                    (-((x - center) / width).powi(2)).exp()
                } else {
                    0.0
                }
            }
            ProfileShape::Bump { start, end } => {
                let t = (2.0 * x - (start + end)) / (end - start);
                if t.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - t * t)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Past this point the profile is identically zero.
    pub fn support_end(&self) -> f64 {
        match *self {
            ProfileShape::Step { end, .. } => end,
            ProfileShape::TruncatedGaussian { cutoff, .. } => cutoff,
            ProfileShape::Bump { end, .. } => end,
        }
    }

    /// Points where the profile is not smooth (support edges); quadrature
    /// panels and ODE integration segments must not straddle them.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            ProfileShape::Step { start, end } => vec![start, end],
            ProfileShape::TruncatedGaussian { cutoff, .. } => vec![cutoff],
            ProfileShape::Bump { start, end } => vec![start, end],
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(SpectralError::InvalidPotential { reason });
        match *self {
            ProfileShape::Step { start, end } => {
                if !(start >= 0.0 && end > start && end.is_finite()) {
                    return bad(format!("step needs 0 <= start < end < inf, got [{start}, {end})"));
                }
            }
            ProfileShape::TruncatedGaussian {
                center,
                width,
                cutoff,
            } => {
                if !(width > 0.0 && width.is_finite() && cutoff > 0.0 && cutoff.is_finite()
                    && center.is_finite())
                {
                    return bad(format!(
                        "gaussian needs width > 0 and 0 < cutoff < inf, got width {width}, cutoff {cutoff}, center {center}"
                    ));
                }
            }
            ProfileShape::Bump { start, end } => {
                if !(start >= 0.0 && end > start && end.is_finite()) {
                    return bad(format!("bump needs 0 <= start < end < inf, got ({start}, {end})"));
                }
            }
        }
        Ok(())
    }
}

/// One term `matrix * shape(x)` of a potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialTerm {
    pub shape: ProfileShape,
    pub matrix: Mat2,
}

/// A finite sum of profile terms, `V(x) = sum_i M_i s_i(x)`; 2x2
/// matrix-valued, compactly supported, possibly non-Hermitian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Potential {
    terms: Vec<PotentialTerm>,
}

/// Matching tolerance when deduplicating breakpoints.
const BREAKPOINT_TOL: f64 = 1e-12;

impl Potential {
    pub fn new(terms: Vec<PotentialTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(SpectralError::InvalidPotential {
                reason: "potential needs at least one term".into(),
            });
        }
        for term in &terms {
            term.shape.validate()?;
            if !term.matrix.frobenius_norm().is_finite() {
                return Err(SpectralError::InvalidPotential {
                    reason: "term matrix has non-finite entries".into(),
                });
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[PotentialTerm] {
        &self.terms
    }

    pub fn value(&self, x: f64) -> Mat2 {
        let mut acc = Mat2::zero();
        for term in &self.terms {
            let s = term.shape.value(x);
            if s != 0.0 {
                acc = acc + term.matrix.scale(Complex64::new(s, 0.0));
            }
        }
        acc
    }

    /// Pointwise operator norm `||V(x)||`.
    pub fn norm_at(&self, x: f64) -> f64 {
        self.value(x).operator_norm()
    }

    pub fn support_end(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.shape.support_end())
            .fold(0.0, f64::max)
    }

    /// Sorted, deduplicated panel boundaries: always starts at 0 and ends at
    /// [`Potential::support_end`], with every profile breakpoint in between.
    pub fn breakpoints(&self) -> Vec<f64> {
        let end = self.support_end();
        let mut pts = vec![0.0, end];
        for term in &self.terms {
            for b in term.shape.breakpoints() {
                if b > 0.0 && b < end {
                    pts.push(b);
                }
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() <= BREAKPOINT_TOL * (1.0 + b.abs()));
        pts
    }

    /// `L1` norm and first moment of `x -> ||V(x)||`, integrated panel by
    /// panel between breakpoints with adaptive Simpson.
    pub fn moments(&self) -> MomentData {
        let pts = self.breakpoints();
        let mut l1 = 0.0;
        let mut m1 = 0.0;
        for pair in pts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            l1 += adaptive_simpson(|x| self.norm_at(x), a, b, 1e-13, 44);
            m1 += adaptive_simpson(|x| x * self.norm_at(x), a, b, 1e-13, 44);
        }
        MomentData {
            l1_norm: l1,
            first_moment: m1,
        }
    }

    /// Dimensionless coupling `v = |V|_1 / c`.
    pub fn coupling(&self, c: f64) -> f64 {
        self.moments().l1_norm / c
    }

    /// True when every term matrix is Hermitian (profiles are real, so this
    /// is equivalent to `V(x)` Hermitian for all `x`).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| t.matrix.is_hermitian(tol))
    }

    /// The potential multiplied by a real factor.
    pub fn scaled(&self, factor: f64) -> Potential {
        Potential {
            terms: self
                .terms
                .iter()
                .map(|t| PotentialTerm {
                    shape: t.shape,
                    matrix: t.matrix.scale(Complex64::new(factor, 0.0)),
                })
                .collect(),
        }
    }

    /// Rescales so that the coupling `|V|_1/c` equals `target_v`; returns the
    /// rescaled potential and the factor applied.
    pub fn scale_to_coupling(&self, target_v: f64, c: f64) -> Result<(Potential, f64)> {
        if !(target_v >= 0.0) || !target_v.is_finite() {
            return Err(SpectralError::InvalidArgument {
                reason: format!("target coupling must be finite and >= 0, got {target_v}"),
            });
        }
        let current = self.coupling(c);
        if current <= 0.0 {
            return Err(SpectralError::InvalidPotential {
                reason: "cannot rescale a potential with zero L1 norm".into(),
            });
        }
        let factor = target_v / current;
        Ok((self.scaled(factor), factor))
    }
}

/// Pointwise polar factorization `V = U |V|` of a potential, exposing the
/// two factors `|V|^{1/2}` and `U |V|^{1/2}` whose product sandwiching the
/// free resolvent yields the compact operator the dense discretization
/// approximates. Computed from the closed-form eigendecomposition of
/// `V^* V`, with rank-deficient directions mapped to zero.
#[derive(Debug, Clone)]
pub struct FactorizedPotential {
    potential: Potential,
}

/// Relative threshold below which a squared singular value is treated as 0.
const RANK_TOL: f64 = 1e-26;

impl FactorizedPotential {
    pub fn new(potential: Potential) -> Self {
        Self { potential }
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    fn polar_pieces(&self, x: f64) -> (Mat2, Mat2) {
        let v = self.potential.value(x);
        let gram = v.adjoint() * v;
        let (lambda, p) = gram.hermitian_eigen();
        let lmax = lambda[0];
        if !(lmax > 0.0) {
            return (Mat2::zero(), Mat2::zero());
        }
        let quarter = |l: f64| {
            if l > RANK_TOL * lmax {
                l.powf(0.25)
            } else {
                0.0
            }
        };
        let inv_quarter = |l: f64| {
            if l > RANK_TOL * lmax {
                l.powf(-0.25)
            } else {
                0.0
            }
        };
        let diag = |d1: f64, d2: f64| {
            Mat2::new(
                Complex64::new(d1, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(d2, 0.0),
            )
        };
        // |V|^{1/2} = P diag(lambda^{1/4}) P^*.
        let absolute = p * diag(quarter(lambda[0]), quarter(lambda[1])) * p.adjoint();
        // U |V|^{1/2} = V P diag(lambda^{-1/4}) P^* (pseudo-inverse on the
        // rank-deficient part).
        let signed = v * p * diag(inv_quarter(lambda[0]), inv_quarter(lambda[1])) * p.adjoint();
        (absolute, signed)
    }

    /// `|V(x)|^{1/2}`: Hermitian, positive semidefinite.
    pub fn absolute_sqrt(&self, x: f64) -> Mat2 {
        self.polar_pieces(x).0
    }

    /// `U(x) |V(x)|^{1/2}`, so that `signed_sqrt * absolute_sqrt = V`.
    pub fn signed_sqrt(&self, x: f64) -> Mat2 {
        self.polar_pieces(x).1
    }
}
