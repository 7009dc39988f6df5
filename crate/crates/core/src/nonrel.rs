//! Nonrelativistic limit diagnostics.
//!
//! When the speed of light `c` grows, the half-line operator — after
//! renormalizing one rest energy away — converges in the resolvent sense to a
//! scalar half-line Schroedinger operator with Dirichlet or Neumann boundary
//! condition, which of the two depending on the boundary angle and on which
//! gap edge the shift renormalizes. This module houses the closed-form limit
//! kernels, the map from boundary angle to limit condition, a first-order
//! convergence-rate check in `1/c`, and the edge asymptotics that collapse
//! the boundary-adapted threshold onto the sharp Schroedinger bound.
//!
//! All rate computations fix `m = 1/2`, the normalization in which the limit
//! operator is exactly `-d^2/dx^2`. Other masses are handled by callers via
//! rescaling, not here.

use num_complex::Complex64;
use serde::Serialize;

use crate::bounds::{osc_decay_sup, osc_decay_sup_general, PinnedComponent};
use crate::error::{Result, SpectralError};
use crate::potential::Potential;
use crate::resolvent::{free_kernel, BoundaryCondition};
use crate::spectral::{compute_spectral_point, PhysicalParams};

/// Mass used by every rate computation in this module.
pub const LIMIT_MASS: f64 = 0.5;

/// Boundary condition of the scalar limit operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BcType {
    Dirichlet,
    Neumann,
}

/// Which rest-energy shift is applied before taking `c` large.
///
/// `Plus` is the operator `D_0 + mc^2`: it renormalizes the *lower* gap edge
/// `-mc^2` to zero, the surviving resolvent block is the second diagonal
/// entry, and the scalar limit is `-(-d^2/dx^2 + z)^{-1}`, i.e. minus the
/// Schroedinger kernel at the reflected parameter. `Minus` is `D_0 - mc^2`:
/// upper edge, first diagonal entry, plain Schroedinger kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RestShift {
    Plus,
    Minus,
}

/// Square root with the branch `Im sqrt >= 0`, the one under which
/// `e^{i k |x - y|}` decays for `z` off `[0, infinity)`.
fn sqrt_up(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.im < 0.0 {
        -r
    } else {
        r
    }
}

fn on_half_line(z: Complex64) -> bool {
    z.re >= -1e-12 && z.im.abs() <= 1e-12 * (1.0 + z.re.abs())
}

/// Resolvent kernel of `-d^2/dx^2` on the half line:
/// `-(e^{i k |x-y|} -/+ e^{i k (x+y)}) / (2 i k)` with `k = sqrt(z)`,
/// `Im k > 0`; "-" for Dirichlet, "+" for Neumann.
pub fn limit_kernel(bc_type: BcType, x: f64, y: f64, z: Complex64) -> Result<Complex64> {
    if x < 0.0 || y < 0.0 || !x.is_finite() || !y.is_finite() {
        return Err(SpectralError::InvalidArgument {
            reason: format!("kernel coordinates ({x}, {y}) must be finite and nonnegative"),
        });
    }
    if on_half_line(z) {
        return Err(SpectralError::OnLimitSpectrum { z });
    }
    let k = sqrt_up(z);
    let pref = -(Complex64::new(0.0, 2.0) * k).finv();
    let direct = (Complex64::i() * k * (x - y).abs()).exp();
    let mirror = (Complex64::i() * k * (x + y)).exp();
    Ok(match bc_type {
        BcType::Dirichlet => pref * (direct - mirror),
        BcType::Neumann => pref * (direct + mirror),
    })
}

/// Scalar limit kernel bundled with its boundary condition.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LimitKernel {
    pub bc_type: BcType,
}

impl LimitKernel {
    pub fn value(&self, x: f64, y: f64, z: Complex64) -> Result<Complex64> {
        limit_kernel(self.bc_type, x, y, z)
    }
}

/// Boundary condition selected by the limit.
///
/// The boundary relation couples the two components through a factor `1/c`,
/// so for large `c` it collapses onto the *large* component of the chosen
/// branch: pinning survives except at the single angle whose pinned
/// component is the large one, where the condition becomes Neumann.
pub fn bc_limit_map(bc: BoundaryCondition, shift: RestShift) -> BcType {
    let alpha = bc.alpha();
    match shift {
        // Large component second; alpha = 0 pins the first component only.
        RestShift::Plus => {
            if alpha.abs() < 1e-12 {
                BcType::Neumann
            } else {
                BcType::Dirichlet
            }
        }
        // Large component first; alpha = pi/2 pins the second only.
        RestShift::Minus => {
            if (alpha - std::f64::consts::FRAC_PI_2).abs() < 1e-12 {
                BcType::Neumann
            } else {
                BcType::Dirichlet
            }
        }
    }
}

/// One row of the convergence table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateRow {
    pub c: f64,
    /// Envelope-weighted sup of the convergent diagonal block's deviation
    /// from the limit kernel.
    pub envelope_sup: f64,
    /// Envelope-weighted sup over the three remaining matrix entries, whose
    /// limit is zero.
    pub off_block_sup: f64,
}

/// Convergence table plus the fitted decay order of `envelope_sup` in `1/c`.
#[derive(Debug, Clone, Serialize)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
    pub decay_exponent: f64,
}

/// Measures how fast the shifted free resolvent approaches its scalar limit.
///
/// For each `c` the full 2x2 kernel is sampled on `grid x grid`; the
/// convergent diagonal block is compared against the limit kernel and the
/// other three entries against zero, all weighted by `e^{+Im k |x - y|}` to
/// strip the common decay envelope. The fitted exponent is the slope of
/// `-ln(envelope_sup)` against `ln c`; first-order convergence means a value
/// near one.
pub fn rate_check(
    z: Complex64,
    c_list: &[f64],
    bc: BoundaryCondition,
    shift: RestShift,
    grid: &[f64],
) -> Result<RateTable> {
    if c_list.len() < 3 {
        return Err(SpectralError::InvalidArgument {
            reason: format!("need at least 3 speeds, got {}", c_list.len()),
        });
    }
    if grid.len() < 2 || grid.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(SpectralError::InvalidArgument {
            reason: "rate grid must hold at least two nonnegative points".into(),
        });
    }
    let bc_type = bc_limit_map(bc, shift);
    // The Plus shift converges to minus the Schroedinger kernel at the
    // reflected spectral parameter: the lower branch carries the spectrum
    // `(-infinity, 0]` after renormalization, so its resolvent is
    // `(-H - z)^{-1} = -K(-z)`.
    let kernel_arg = match shift {
        RestShift::Plus => -z,
        RestShift::Minus => z,
    };
    if on_half_line(kernel_arg) {
        return Err(SpectralError::OnLimitSpectrum { z });
    }
    let k_env = sqrt_up(kernel_arg);
    let mut rows = Vec::with_capacity(c_list.len());
    for &c in c_list {
        if !(c > 0.0) {
            return Err(SpectralError::InvalidArgument {
                reason: format!("speed {c} must be positive"),
            });
        }
        let params = PhysicalParams::new(LIMIT_MASS, c)?;
        let rest = params.rest_energy();
        let z_dirac = match shift {
            RestShift::Plus => z - rest,
            RestShift::Minus => z + rest,
        };
        let sp = compute_spectral_point(z_dirac, params)?;
        let mut envelope_sup: f64 = 0.0;
        let mut off_block_sup: f64 = 0.0;
        for &x in grid {
            for &y in grid {
                let kern = free_kernel(&sp, bc, x, y)?;
                let weight = (k_env.im * (x - y).abs()).exp();
                let (main, off) = match shift {
                    RestShift::Plus => {
                        let target = -limit_kernel(bc_type, x, y, -z)?;
                        (
                            kern.e22 - target,
                            kern.e11.norm().max(kern.e12.norm()).max(kern.e21.norm()),
                        )
                    }
                    RestShift::Minus => {
                        let target = limit_kernel(bc_type, x, y, z)?;
                        (
                            kern.e11 - target,
                            kern.e22.norm().max(kern.e12.norm()).max(kern.e21.norm()),
                        )
                    }
                };
                envelope_sup = envelope_sup.max(main.norm() * weight);
                off_block_sup = off_block_sup.max(off * weight);
            }
        }
        rows.push(RateRow {
            c,
            envelope_sup,
            off_block_sup,
        });
    }
    // Least-squares slope of ln(sup) on ln(c); decay exponent is its negative.
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.c.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.envelope_sup.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(RateTable {
        rows,
        decay_exponent: -sxy / sxx,
    })
}

/// One row of the edge-asymptotics table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReductionRow {
    /// `|z - mc^2|` along the ray.
    pub magnitude: f64,
    /// `(s + 1/s) * G(a, cot arg zeta) * sqrt(|z - mc^2| / (2mc^2))`
    /// divided by its limit `g(|cot(theta/2)|)`.
    pub ratio: f64,
}

/// Edge asymptotics of the first-component-pinned threshold.
///
/// Approaching the upper gap edge along the ray `z = mc^2 + r e^{i theta}`,
/// the boundary-adapted bound degenerates at the rate `sqrt(r)`; rescaled by
/// `sqrt(r / (2mc^2))` it converges to the oscillation-vs-decay envelope
/// `g(|cot(theta/2)|)` — exactly the shape of the sharp half-line
/// Schroedinger bound with Dirichlet boundary condition, which is what the
/// first-component-pinned condition becomes in the limit. Ratios returned
/// per magnitude should approach one.
pub fn schrodinger_reduction_check(
    theta: f64,
    magnitudes: &[f64],
    params: PhysicalParams,
) -> Result<Vec<ReductionRow>> {
    if params.m == 0.0 {
        return Err(SpectralError::MasslessUndefined);
    }
    if magnitudes.is_empty() {
        return Err(SpectralError::InvalidArgument {
            reason: "need at least one magnitude".into(),
        });
    }
    let rest = params.rest_energy();
    let target = osc_decay_sup((0.5 * theta).tan().recip().abs()).value;
    let mut rows = Vec::with_capacity(magnitudes.len());
    for &r in magnitudes {
        if !(r > 0.0 && r < rest) {
            return Err(SpectralError::InvalidArgument {
                reason: format!("magnitude {r} must lie in (0, mc^2)"),
            });
        }
        let z = Complex64::new(rest, 0.0) + Complex64::from_polar(r, theta);
        let sp = compute_spectral_point(z, params)?;
        let s = sp.zeta_abs();
        let g = osc_decay_sup_general(PinnedComponent::First, sp.asymmetry(), sp.cot_arg()?);
        let quantity = (s + 1.0 / s) * g.value * (r / (2.0 * rest)).sqrt();
        rows.push(ReductionRow {
            magnitude: r,
            ratio: quantity / target,
        });
    }
    Ok(rows)
}

/// Scaled coupling threshold of the limit Schroedinger problem: an
/// eigenvalue `lambda` of `-d^2/dx^2 + V` with Dirichlet condition obeys
/// `|lambda|^{1/2} <= g(|cot(arg lambda / 2)|) * |V|_1 / 2`; this returns
/// the right-hand side for a given potential trace.
pub fn schrodinger_bound_rhs(pot: &Potential, lambda_arg: f64) -> f64 {
    0.5 * osc_decay_sup((0.5 * lambda_arg).tan().recip().abs()).value * pot.moments().l1_norm
}
