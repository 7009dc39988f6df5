//! Shooting-based eigenvalue oracle.
//!
//! Integrates the boundary-value solution of `(D_0 + V - z) psi = 0` across
//! the potential's compact support and decomposes the result at the far edge
//! into the decaying and growing free modes. The coefficient of the *growing*
//! mode — the Evans function `E(z)` — is analytic in `z` off the essential
//! spectrum and vanishes exactly at eigenvalues, so zeros are found by the
//! argument principle on rectangles plus a Newton polish. Because matching
//! uses the exact free modes beyond the support, there is no domain
//! truncation: the essential spectrum never discretizes and cannot pollute
//! the zero search.
//!
//! This oracle shares no code path with the integral-operator determinant in
//! [`crate::birman_schwinger`]; agreement of the two zero sets is the
//! strongest internal consistency check the crate offers.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, SpectralError};
use crate::mat2::Vec2;
use crate::potential::Potential;
use crate::resolvent::BoundaryCondition;
use crate::spectral::{compute_spectral_point, PhysicalParams};

/// Default relative tolerance of the adaptive integrator.
pub const DEFAULT_ODE_RTOL: f64 = 1e-10;
/// Absolute floor of the integrator's error control.
const ODE_ATOL: f64 = 1e-14;
/// `|E| < CONTOUR_ZERO_REL * scale` on a contour sample counts as "contour
/// through a zero" and triggers a perturbation retry.
const CONTOUR_ZERO_REL: f64 = 1e-12;
/// Accepted zeros must reach `|E| <= RESIDUAL_REL * scale`.
const RESIDUAL_REL: f64 = 1e-10;
/// Cells are subdivided until their diameter is below
/// `CELL_DIAMETER_REL * (1 + |center|)` before polishing.
const CELL_DIAMETER_REL: f64 = 1e-4;
/// Central-difference step for the Newton derivative, relative to `1 + |z|`.
/// (Complex-step differentiation is meaningless for a function of a complex
/// variable, so a genuine finite difference is used.)
const NEWTON_STEP_REL: f64 = 1e-6;
/// Maximum perturbation retries when a contour keeps hitting a zero.
const MAX_CONTOUR_ATTEMPTS: usize = 5;
/// Accepted march segments near a branch point `+-mc^2` must be shorter than
/// this fraction of the distance to it.
const MARCH_BRANCH_FRAC: f64 = 0.5;

/// Margin kept between scan regions and the essential spectrum; the Evans
/// function degenerates on the branch cut.
pub fn default_spectrum_margin(params: PhysicalParams) -> f64 {
    1e-3 * params.rest_energy().max(1.0)
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rs(v: Vec2, r: f64) -> Vec2 {
    v.scale(cx(r, 0.0))
}

// ---------------------------------------------------------------------------
// Adaptive Dormand-Prince 5(4) integration of the first-order system
// ---------------------------------------------------------------------------

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th- and embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `psi' = F(x) psi` over one smooth panel `[lo, hi]`.
///
/// The right-hand side comes from rearranging the eigenvalue equation into a
/// first-order system: `psi1' = ((z + mc^2) psi2 - (V psi)_2) / c` and
/// `psi2' = ((mc^2 - z) psi1 + (V psi)_1) / c`. Potential samples are clamped
/// into the open panel so the half-open support convention of step profiles
/// cannot leak a wrong one-sided value into the last stage of a step.
#[allow(clippy::too_many_arguments)]
fn integrate_panel(
    mut y: Vec2,
    lo: f64,
    hi: f64,
    z: Complex64,
    pot: &Potential,
    params: PhysicalParams,
    rtol: f64,
    span: f64,
) -> Result<Vec2> {
    let e0 = params.rest_energy();
    let c = params.c;
    let clamp_eps = 1e-12 * (hi - lo);
    let rhs = |x: f64, y: Vec2| -> Vec2 {
        let xe = x.clamp(lo + clamp_eps, hi - clamp_eps);
        let vy = pot.value(xe).apply(y);
        Vec2::new(((z + e0) * y.b - vy.b) / c, ((e0 - z) * y.a + vy.a) / c)
    };

    let mut x = lo;
    let mut h = (hi - lo) / 8.0;
    let mut steps = 0usize;
    while x < hi {
        h = h.min(hi - x);
        if h < 1e-14 * span || steps > 1_000_000 {
            return Err(SpectralError::StiffnessFailure { x });
        }
        let k1 = rhs(x, y);
        let k2 = rhs(x + C2 * h, y + rs(k1, h * A21));
        let k3 = rhs(x + C3 * h, y + rs(k1, h * A31) + rs(k2, h * A32));
        let k4 = rhs(
            x + C4 * h,
            y + rs(k1, h * A41) + rs(k2, h * A42) + rs(k3, h * A43),
        );
        let k5 = rhs(
            x + C5 * h,
            y + rs(k1, h * A51) + rs(k2, h * A52) + rs(k3, h * A53) + rs(k4, h * A54),
        );
        let k6 = rhs(
            x + h,
            y + rs(k1, h * A61) + rs(k2, h * A62) + rs(k3, h * A63) + rs(k4, h * A64)
                + rs(k5, h * A65),
        );
        let y5 = y + rs(k1, h * B1) + rs(k3, h * B3) + rs(k4, h * B4) + rs(k5, h * B5)
            + rs(k6, h * B6);
        let k7 = rhs(x + h, y5);
        let err_vec = rs(k1, E1) + rs(k3, E3) + rs(k4, E4) + rs(k5, E5) + rs(k6, E6)
            + rs(k7, E7);
        let sc = ODE_ATOL + rtol * y.norm().max(y5.norm());
        let err = h.abs() * err_vec.norm() / sc;
        if err <= 1.0 {
            x += h;
            y = y5;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        steps += 1;
    }
    Ok(y)
}

/// Integrates the boundary-value solution from `x = 0` to the end of the
/// potential's support and returns `psi` there.
///
/// The initial value `(sin alpha, cos alpha)` satisfies the boundary
/// condition identically. Integration restarts at every breakpoint of the
/// potential so the adaptive controller only ever sees smooth data.
pub fn propagate(
    z: Complex64,
    pot: &Potential,
    bc: BoundaryCondition,
    params: PhysicalParams,
) -> Result<Vec2> {
    propagate_with_tol(z, pot, bc, params, DEFAULT_ODE_RTOL)
}

/// [`propagate`] with an explicit integrator tolerance (used by the
/// convergence self-checks).
pub fn propagate_with_tol(
    z: Complex64,
    pot: &Potential,
    bc: BoundaryCondition,
    params: PhysicalParams,
    rtol: f64,
) -> Result<Vec2> {
    if !z.is_finite() {
        return Err(SpectralError::InvalidArgument {
            reason: format!("non-finite spectral parameter {z}"),
        });
    }
    let (s, c) = bc.sin_cos();
    let mut y = Vec2::new(cx(s, 0.0), cx(c, 0.0));
    let breaks = pot.breakpoints();
    let span = pot.support_end().max(1.0);
    for w in breaks.windows(2) {
        y = integrate_panel(y, w[0], w[1], z, pot, params, rtol, span)?;
    }
    Ok(y)
}

/// One Evans-function evaluation: the value and the magnitude scale against
/// which "zero" is judged.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvansSample {
    /// Coefficient of the growing free mode at the support edge * `e^{i kappa L}`.
    pub value: Complex64,
    /// `|e^{i kappa L}| (|psi_2| + |psi_1 / zeta|) / 2`: the size of the two
    /// matching terms, so `|value| / scale` is a meaningful relative residual.
    pub scale: f64,
}

/// Evans function with the default integrator tolerance.
///
/// Writing `L` for the support end, the propagated solution decomposes as
/// `psi(L) = A e^{i kappa L} (-i zeta, 1) + B e^{-i kappa L} (i zeta, 1)`;
/// the returned value is `B` rescaled by `e^{i kappa L}` to stay bounded,
/// i.e. `e^{i kappa L} (psi_2(L) - i psi_1(L)/zeta) / 2`. It vanishes iff
/// the solution decays, which makes `z` an eigenvalue.
pub fn evans_sample(
    z: Complex64,
    pot: &Potential,
    bc: BoundaryCondition,
    params: PhysicalParams,
) -> Result<EvansSample> {
    evans_sample_with_tol(z, pot, bc, params, DEFAULT_ODE_RTOL)
}

/// [`evans_sample`] with an explicit integrator tolerance.
pub fn evans_sample_with_tol(
    z: Complex64,
    pot: &Potential,
    bc: BoundaryCondition,
    params: PhysicalParams,
    rtol: f64,
) -> Result<EvansSample> {
    evans_sample_with_margin(z, pot, bc, params, rtol, default_spectrum_margin(params))
}

/// [`evans_sample_with_tol`] guarding against a caller-chosen spectrum
/// margin. Region scans use this so a [`ScanRegion::with_margin`] region is
/// sampled under the same margin it was validated with.
fn evans_sample_with_margin(
    z: Complex64,
    pot: &Potential,
    bc: BoundaryCondition,
    params: PhysicalParams,
    rtol: f64,
    margin: f64,
) -> Result<EvansSample> {
    let distance = params.distance_to_spectrum(z);
    if distance < margin {
        return Err(SpectralError::EmbeddedPoint { z, distance });
    }
    let sp = compute_spectral_point(z, params)?;
    let zeta_abs = sp.zeta.norm();
    if !(1e-8..=1e8).contains(&zeta_abs) {
        return Err(SpectralError::DegenerateBasis { zeta_abs });
    }
    let l = pot.support_end();
    let psi = propagate_with_tol(z, pot, bc, params, rtol)?;
    // |e^{i kappa L}| < 1 exactly cancels the growth of the propagated
    // solution, keeping both value and scale O(1).
    let phase = (Complex64::i() * sp.kappa * l).exp();
    let ratio = psi.a / sp.zeta;
    let value = phase * (psi.b - Complex64::i() * ratio) * 0.5;
    let scale = phase.norm() * 0.5 * (psi.b.norm() + ratio.norm());
    Ok(EvansSample { value, scale })
}

/// Evans-function value alone; see [`evans_sample`].
pub fn evans_value(
    z: Complex64,
    pot: &Potential,
    bc: BoundaryCondition,
    params: PhysicalParams,
) -> Result<Complex64> {
    Ok(evans_sample(z, pot, bc, params)?.value)
}

// ---------------------------------------------------------------------------
// Scan regions
// ---------------------------------------------------------------------------

/// Closed axis-aligned rectangle in the spectral plane, kept at a safe
/// distance from the essential spectrum of the free operator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanRegion {
    re: (f64, f64),
    im: (f64, f64),
    spectrum_margin: f64,
}

/// Distance from the closed rectangle to the free operator's spectrum
/// (`{w real: |w| >= mc^2}`, all of the real axis when `m = 0`).
fn rect_spectrum_distance(re: (f64, f64), im: (f64, f64), params: PhysicalParams) -> f64 {
    let dy = if im.0 <= 0.0 && 0.0 <= im.1 {
        0.0
    } else {
        im.0.abs().min(im.1.abs())
    };
    let e0 = params.rest_energy();
    if e0 == 0.0 {
        return dy;
    }
    let dx_right = (e0 - re.1).max(0.0);
    let dx_left = (re.0 + e0).max(0.0);
    dx_right.hypot(dy).min(dx_left.hypot(dy))
}

impl ScanRegion {
    /// Rectangle with the default spectrum margin.
    pub fn new(re: (f64, f64), im: (f64, f64), params: PhysicalParams) -> Result<Self> {
        Self::with_margin(re, im, default_spectrum_margin(params), params)
    }

    /// Rectangle with an explicit margin; rejects regions that approach the
    /// essential spectrum closer than the margin.
    pub fn with_margin(
        re: (f64, f64),
        im: (f64, f64),
        margin: f64,
        params: PhysicalParams,
    ) -> Result<Self> {
        if !(re.0.is_finite() && re.1.is_finite() && im.0.is_finite() && im.1.is_finite()) {
            return Err(SpectralError::InvalidArgument {
                reason: "scan region bounds must be finite".into(),
            });
        }
        if re.0 >= re.1 || im.0 >= im.1 {
            return Err(SpectralError::InvalidArgument {
                reason: format!("empty scan region {re:?} x {im:?}"),
            });
        }
        if !(margin > 0.0) {
            return Err(SpectralError::InvalidArgument {
                reason: format!("spectrum margin {margin} must be positive"),
            });
        }
        let distance = rect_spectrum_distance(re, im, params);
        if distance < margin {
            return Err(SpectralError::RegionTouchesSpectrum { distance, margin });
        }
        Ok(ScanRegion {
            re,
            im,
            spectrum_margin: margin,
        })
    }

    pub fn re_range(&self) -> (f64, f64) {
        self.re
    }

    pub fn im_range(&self) -> (f64, f64) {
        self.im
    }

    pub fn spectrum_margin(&self) -> f64 {
        self.spectrum_margin
    }

    pub fn center(&self) -> Complex64 {
        cx(0.5 * (self.re.0 + self.re.1), 0.5 * (self.im.0 + self.im.1))
    }

    pub fn diameter(&self) -> f64 {
        (self.re.1 - self.re.0).hypot(self.im.1 - self.im.0)
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        z.re >= self.re.0 - tol
            && z.re <= self.re.1 + tol
            && z.im >= self.im.0 - tol
            && z.im <= self.im.1 + tol
    }

    /// Splits across the longer side. Children are sub-rectangles, so they
    /// automatically satisfy the margin invariant.
    fn split(&self) -> (ScanRegion, ScanRegion) {
        let mut a = *self;
        let mut b = *self;
        if self.re.1 - self.re.0 >= self.im.1 - self.im.0 {
            let mid = 0.5 * (self.re.0 + self.re.1);
            a.re = (self.re.0, mid);
            b.re = (mid, self.re.1);
        } else {
            let mid = 0.5 * (self.im.0 + self.im.1);
            a.im = (self.im.0, mid);
            b.im = (mid, self.im.1);
        }
        (a, b)
    }

    /// Pushes every edge outward by a slightly different tiny amount, moving
    /// a zero that sits exactly on the boundary strictly to one side.
    /// Margin erosion is bounded by `1.3 * eps * diameter`, far below the
    /// margins in use.
    fn inflated(&self, eps: f64) -> ScanRegion {
        let d = self.diameter();
        ScanRegion {
            re: (self.re.0 - eps * d, self.re.1 + 1.13 * eps * d),
            im: (self.im.0 - 0.87 * eps * d, self.im.1 + 1.29 * eps * d),
            spectrum_margin: self.spectrum_margin,
        }
    }
}

// ---------------------------------------------------------------------------
// Argument-principle machinery
// ---------------------------------------------------------------------------

/// One located Evans zero.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvansZero {
    pub z: Complex64,
    /// Winding count of the final cell: the multiplicity of the zero.
    pub multiplicity: u32,
    /// `|E(z)|` after the polish.
    pub residual: f64,
    pub newton_iters: u32,
}

/// Outcome of tracing one contour: either a reliable phase total or evidence
/// that the contour runs too close to a zero.
enum Trace {
    Total(f64),
    HitZero,
}

struct Evaluator<'a> {
    pot: &'a Potential,
    bc: BoundaryCondition,
    params: PhysicalParams,
    rtol: f64,
    // The sampling guard must match the margin the region was validated
    // with, or points admitted by `ScanRegion::with_margin` get rejected
    // here.
    margin: f64,
    cache: RefCell<HashMap<(u64, u64), EvansSample>>,
    evals: Cell<usize>,
}

impl<'a> Evaluator<'a> {
    fn new(
        pot: &'a Potential,
        bc: BoundaryCondition,
        params: PhysicalParams,
        rtol: f64,
        margin: f64,
    ) -> Self {
        Evaluator {
            pot,
            bc,
            params,
            rtol,
            margin,
            cache: RefCell::new(HashMap::new()),
            evals: Cell::new(0),
        }
    }

    fn sample(&self, z: Complex64) -> Result<EvansSample> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(s) = self.cache.borrow().get(&key) {
            return Ok(*s);
        }
        let s = evans_sample_with_margin(z, self.pot, self.bc, self.params, self.rtol, self.margin)?;
        self.cache.borrow_mut().insert(key, s);
        self.evals.set(self.evals.get() + 1);
        Ok(s)
    }

    fn near_zero(s: &EvansSample) -> bool {
        s.value.norm() < CONTOUR_ZERO_REL * s.scale.max(f64::MIN_POSITIVE)
    }

    /// Longest segment the phase march may accept around `z`. The endpoint
    /// test alone can alias a full interior turn of the phase away, so the
    /// step is capped by the two scales on which `E` genuinely rotates fast:
    /// the `e^{i kappa L}` factor (rate `L |z| / (c^2 |kappa|)`, kept under a
    /// quarter turn per step) and the branch points `+-mc^2`, where `kappa`
    /// itself sweeps its argument on the scale of the distance to the point.
    fn phase_step_cap(&self, z: Complex64) -> f64 {
        let rest = self.params.rest_energy();
        let d_minus = (z - cx(rest, 0.0)).norm();
        let d_plus = (z + cx(rest, 0.0)).norm();
        // |c kappa| = sqrt(|z - mc^2| |z + mc^2|) without any branch choice.
        let c_kappa_abs = (d_minus * d_plus).sqrt();
        let l = self.pot.support_end();
        let rate = l * z.norm() / (self.params.c * c_kappa_abs).max(f64::MIN_POSITIVE);
        let osc = FRAC_PI_2 / rate.max(f64::MIN_POSITIVE);
        let branch = if rest > 0.0 {
            MARCH_BRANCH_FRAC * d_minus.min(d_plus)
        } else {
            f64::INFINITY
        };
        osc.min(branch)
    }

    /// Phase increment along the segment `z0 -> z1`, bisecting until adjacent
    /// samples differ by less than `pi/2` so no multiple of `2 pi` can hide
    /// between them.
    fn march(
        &self,
        z0: Complex64,
        e0: Complex64,
        z1: Complex64,
        e1: Complex64,
        depth: u32,
        acc: &mut f64,
    ) -> Result<bool> {
        let dphi = (e1 / e0).arg();
        // Two forced levels per edge guard against a sparse initial sampling
        // stepping right over a full loop of the phase.
        if depth >= 2
            && dphi.abs() < FRAC_PI_2
            && (z1 - z0).norm() <= self.phase_step_cap(0.5 * (z0 + z1))
        {
            *acc += dphi;
            return Ok(true);
        }
        if depth > 46 {
            return Ok(false);
        }
        let zm = 0.5 * (z0 + z1);
        let sm = self.sample(zm)?;
        if Self::near_zero(&sm) {
            return Ok(false);
        }
        Ok(self.march(z0, e0, zm, sm.value, depth + 1, acc)?
            && self.march(zm, sm.value, z1, e1, depth + 1, acc)?)
    }

    /// Winding number of `E` around the rectangle, or `HitZero` if the
    /// boundary cannot be traced reliably.
    fn winding_once(&self, r: &ScanRegion) -> Result<Trace> {
        let corners = [
            cx(r.re.0, r.im.0),
            cx(r.re.1, r.im.0),
            cx(r.re.1, r.im.1),
            cx(r.re.0, r.im.1),
        ];
        let mut samples = [EvansSample {
            value: cx(0.0, 0.0),
            scale: 0.0,
        }; 4];
        for (s, z) in samples.iter_mut().zip(corners) {
            *s = self.sample(z)?;
            if Self::near_zero(s) {
                return Ok(Trace::HitZero);
            }
        }
        let mut total = 0.0;
        for i in 0..4 {
            let j = (i + 1) % 4;
            if !self.march(
                corners[i],
                samples[i].value,
                corners[j],
                samples[j].value,
                0,
                &mut total,
            )? {
                return Ok(Trace::HitZero);
            }
        }
        let w = total / (2.0 * PI);
        let rounded = w.round();
        if (w - rounded).abs() > 0.25 {
            // The phase total should be an integer; a stray fraction means a
            // zero sits close enough to the contour to corrupt the trace.
            return Ok(Trace::HitZero);
        }
        Ok(Trace::Total(rounded))
    }

    /// Winding with contour-perturbation retries.
    fn winding(&self, region: &ScanRegion) -> Result<(i64, ScanRegion)> {
        let mut r = *region;
        for attempt in 0..MAX_CONTOUR_ATTEMPTS {
            match self.winding_once(&r)? {
                Trace::Total(w) => return Ok((w as i64, r)),
                Trace::HitZero => {
                    r = r.inflated(3e-6 * (attempt + 1) as f64);
                }
            }
        }
        Err(SpectralError::ContourThroughZero {
            attempts: MAX_CONTOUR_ATTEMPTS,
        })
    }

    /// Newton polish from the cell's center with a central-difference
    /// derivative; the step is scaled by the multiplicity so multiple zeros
    /// retain quadratic-ish convergence.
    fn newton_polish(&self, cell: &ScanRegion, mult: i64) -> Result<EvansZero> {
        let escape = cell.inflated(2.0);
        let mut z = cell.center();
        for it in 0..80u32 {
            let s = self.sample(z)?;
            if s.value.norm() <= RESIDUAL_REL * s.scale {
                return Ok(EvansZero {
                    z,
                    multiplicity: mult as u32,
                    residual: s.value.norm(),
                    newton_iters: it,
                });
            }
            let h = NEWTON_STEP_REL * (1.0 + z.norm());
            let sp = self.sample(z + cx(h, 0.0))?;
            let sm = self.sample(z - cx(h, 0.0))?;
            let deriv = (sp.value - sm.value) / cx(2.0 * h, 0.0);
            if !deriv.is_finite() || deriv.norm() < 1e-300 {
                return Err(SpectralError::NewtonDivergence { z });
            }
            z -= (mult as f64) * s.value / deriv;
            if !z.is_finite() || !escape.contains(z, 0.0) {
                return Err(SpectralError::NewtonDivergence { z });
            }
        }
        Err(SpectralError::NewtonDivergence { z })
    }
}

/// Number of eigenvalues (with multiplicity) strictly inside the region,
/// computed as the winding of the Evans function around its boundary.
///
/// If the contour runs through a zero the rectangle is inflated by a few
/// parts in a million and retried, up to five times.
pub fn winding_count(
    region: &ScanRegion,
    pot: &Potential,
    bc: BoundaryCondition,
    params: PhysicalParams,
) -> Result<i64> {
    winding_count_with_tol(region, pot, bc, params, DEFAULT_ODE_RTOL)
}

/// [`winding_count`] with an explicit relative tolerance for the propagation.
pub fn winding_count_with_tol(
    region: &ScanRegion,
    pot: &Potential,
    bc: BoundaryCondition,
    params: PhysicalParams,
    rtol: f64,
) -> Result<i64> {
    let ev = Evaluator::new(pot, bc, params, rtol, region.spectrum_margin());
    ev.winding(region).map(|(w, _)| w)
}

/// Locates every Evans zero in the region by recursive bisection of the
/// winding count followed by a Newton polish.
///
/// Cells are split until they hold at most one zero and are smaller than
/// `1e-4 * (1 + |center|)`; a cell that refuses to separate (winding >= 2 at
/// diameter `1e-9`-scale) is polished as one multiple zero. A zero straddling
/// an internal subdivision line can be reached from both sides, so results
/// are deduplicated at `1e-6 * (1 + |z|)` before the final sort by
/// `(Re z, Im z)`.
pub fn find_zeros(
    region: &ScanRegion,
    pot: &Potential,
    bc: BoundaryCondition,
    params: PhysicalParams,
) -> Result<Vec<EvansZero>> {
    find_zeros_with_tol(region, pot, bc, params, DEFAULT_ODE_RTOL)
}

/// [`find_zeros`] with an explicit relative tolerance for the propagation.
pub fn find_zeros_with_tol(
    region: &ScanRegion,
    pot: &Potential,
    bc: BoundaryCondition,
    params: PhysicalParams,
    rtol: f64,
) -> Result<Vec<EvansZero>> {
    let ev = Evaluator::new(pot, bc, params, rtol, region.spectrum_margin());
    let mut zeros: Vec<EvansZero> = Vec::new();
    let mut stack = vec![*region];
    let mut budget = 20_000usize;
    while let Some(cell) = stack.pop() {
        budget = budget.checked_sub(1).ok_or_else(|| {
            SpectralError::NonConvergence {
                what: "region subdivision budget exhausted".into(),
            }
        })?;
        let (w, cell) = ev.winding(&cell)?;
        if w == 0 {
            continue;
        }
        let local = 1.0 + cell.center().norm();
        let polish_now = cell.diameter() <= CELL_DIAMETER_REL * local
            && (w == 1 || cell.diameter() <= 1e-9 * local);
        if polish_now {
            match ev.newton_polish(&cell, w) {
                Ok(zero) => zeros.push(zero),
                Err(SpectralError::NewtonDivergence { .. })
                    if cell.diameter() > 1e-9 * local =>
                {
                    let (a, b) = cell.split();
                    stack.push(a);
                    stack.push(b);
                }
                Err(e) => return Err(e),
            }
        } else {
            let (a, b) = cell.split();
            stack.push(a);
            stack.push(b);
        }
    }
    zeros.sort_by(|p, q| {
        (p.z.re, p.z.im)
            .partial_cmp(&(q.z.re, q.z.im))
            .expect("finite zeros")
    });
    let mut unique: Vec<EvansZero> = Vec::new();
    for zero in zeros {
        match unique.last_mut() {
            Some(last) if (last.z - zero.z).norm() < 1e-6 * (1.0 + zero.z.norm()) => {
                // Same zero reached from two adjacent cells: keep the better
                // polish, do not double-count the multiplicity.
                if zero.residual < last.residual {
                    *last = zero;
                }
            }
            _ => unique.push(zero),
        }
    }
    Ok(unique)
}
