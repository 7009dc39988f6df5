//! Scalar bound functions and eigenvalue-exclusion thresholds.
//!
//! Two one-parameter families of suprema over the half line control all
//! resolvent estimates in this crate:
//!
//! * `osc_decay_sup(b)`: `sup_{y>=0} |exp(i b y) - exp(-y)|`, the distance
//!   between a pure oscillation and a pure decay, always in `[1, 2]`;
//! * `osc_decay_sup_general(pin, a, b)`:
//!   `sqrt( sup_{y>=0} (1 + e^{-2y}) -/+ 2 a e^{-y} cos(a b y) )`, the
//!   asymmetric generalization entering the boundary-adapted resolvent
//!   sup-norm (`-` when the first spinor component is pinned at the origin,
//!   `+` when the second one is).
//!
//! On top of these sit the exclusion thresholds: a `z` cannot be an
//! eigenvalue of `D0 + V` whenever the relevant threshold exceeds the
//! coupling (`v = |V|_1/c` for the uniform one, `v/2` for the
//! boundary-adapted one), plus the real spectral gap for Hermitian
//! potentials and the moment-based criterion around the gap edges.

use crate::error::{Result, SpectralError};
use crate::spectral::{EnclosureRegion, PhysicalParams, SpectralPoint};
use num_complex::Complex64;
use serde::Serialize;

/// Which spinor component the boundary condition pins to zero at the origin.
///
/// `psi1(0) cos(alpha) = psi2(0) sin(alpha)` pins the first component for
/// `alpha = 0` and the second for `alpha = pi/2`; these are the two cases
/// with sharp closed-form resolvent norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PinnedComponent {
    /// `alpha = 0`: `psi1(0) = 0`.
    First,
    /// `alpha = pi/2`: `psi2(0) = 0`.
    Second,
}

impl PinnedComponent {
    /// Sign of the oscillatory term in the associated sup: `-1` for
    /// [`PinnedComponent::First`], `+1` for [`PinnedComponent::Second`].
    pub fn envelope_sign(self) -> f64 {
        match self {
            PinnedComponent::First => -1.0,
            PinnedComponent::Second => 1.0,
        }
    }

    pub fn alpha(self) -> f64 {
        match self {
            PinnedComponent::First => 0.0,
            PinnedComponent::Second => std::f64::consts::FRAC_PI_2,
        }
    }
}

/// The two edges `+-mc^2` of the spectral gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GapEdge {
    /// `+mc^2`.
    Plus,
    /// `-mc^2`.
    Minus,
}

impl GapEdge {
    pub fn sign(self) -> f64 {
        match self {
            GapEdge::Plus => 1.0,
            GapEdge::Minus => -1.0,
        }
    }

    /// Edge from which eigenvalues are excluded for a given pinned component
    /// (first component pinned guards `+mc^2`, second `-mc^2`).
    pub fn guarded_by(pin: PinnedComponent) -> Self {
        match pin {
            PinnedComponent::First => GapEdge::Plus,
            PinnedComponent::Second => GapEdge::Minus,
        }
    }
}

/// Result of a numerically evaluated supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEvaluation {
    /// The supremum value.
    pub value: f64,
    /// Location of the maximizer (the grid endpoint when the sup is only
    /// attained in the limit `y -> inf`).
    pub maximizer_y: f64,
    /// Width of the final golden-section bracket around the maximizer.
    pub refinement_error: f64,
}

/// `L1` data of a potential: `|V|_1` and the first moment of `|V|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentData {
    /// `integral of ||V(x)|| dx`.
    pub l1_norm: f64,
    /// `integral of x ||V(x)|| dx`.
    pub first_moment: f64,
}

/// Beyond this point `exp(-y)` is below 1e-12 and the integrands are flat.
const Y_CUT: f64 = 27.631021115928547;
const BASE_GRID: usize = 4096;
const MAX_GRID: usize = 1 << 18;
const BRACKET_TOL: f64 = 1e-12;

fn grid_size(freq: f64) -> usize {
    // At least 20 samples per oscillation period, capped for sanity.
    let cycles = freq.abs() * Y_CUT / std::f64::consts::TAU;
    let wanted = (20.0 * cycles).ceil() as usize;
    wanted.clamp(BASE_GRID, MAX_GRID)
}

/// Golden-section maximization on `[lo, hi]`.
fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > BRACKET_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let y = 0.5 * (lo + hi);
    (f(y).max(f1).max(f2), y, hi - lo)
}

/// Grid scan over `[0, Y_CUT]` (`Y_CUT ~ 27.6`, where `exp(-y)` drops below
/// 1e-12) followed by golden-section refinement of the best few separated
/// local maxima. `freq` is the dominant oscillation frequency of `f` and
/// only controls the grid density. Intended for continuous `f` of the form
/// "decaying envelope times oscillation"; for such `f` the result is
/// reliable to roughly 1e-10 absolute.
pub fn sup_on_half_line(f: impl Fn(f64) -> f64, freq: f64) -> BoundEvaluation {
    let n = grid_size(freq);
    let h = Y_CUT / n as f64;
    let vals: Vec<f64> = (0..=n).map(|i| f(i as f64 * h)).collect();
    // Collect local maxima (including the endpoints).
    let mut candidates: Vec<usize> = Vec::new();
    for i in 0..=n {
        let left_ok = i == 0 || vals[i] >= vals[i - 1];
        let right_ok = i == n || vals[i] >= vals[i + 1];
        if left_ok && right_ok {
            candidates.push(i);
        }
    }
    candidates.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
    candidates.truncate(4);
    let mut best = BoundEvaluation {
        value: f64::NEG_INFINITY,
        maximizer_y: 0.0,
        refinement_error: 0.0,
    };
    for &i in &candidates {
        let lo = if i == 0 { 0.0 } else { (i - 1) as f64 * h };
        let hi = ((i + 1).min(n)) as f64 * h;
        let (v, y, width) = golden_max(&f, lo, hi);
        if v > best.value {
            best = BoundEvaluation {
                value: v,
                maximizer_y: y,
                refinement_error: width,
            };
        }
    }
    best
}

/// `sup_{y >= 0} |exp(i b y) - exp(-y)|`; always in `[1, 2]`, even in `b`,
/// with `osc_decay_sup(0) = 1` (attained only as `y -> inf`).
pub fn osc_decay_sup(b: f64) -> BoundEvaluation {
    let f = move |y: f64| {
        let e = (-y).exp();
        (1.0 - 2.0 * e * (b * y).cos() + e * e).max(0.0).sqrt()
    };
    sup_on_half_line(f, b)
}

/// `sqrt( sup_{y >= 0} (1 + e^{-2y}) -/+ 2 a e^{-y} cos(a b y) )`.
///
/// Intended for asymmetry `|a| <= 1`. Special values:
/// `= sqrt(2)` at `a = 0`; `= sqrt(max(2(1 -/+ a), 1))` at `b = 0`; and it
/// converges to [`osc_decay_sup`]`(b)` as `a -> 1` in the
/// [`PinnedComponent::First`] case.
pub fn osc_decay_sup_general(pin: PinnedComponent, a: f64, b: f64) -> BoundEvaluation {
    let sign = pin.envelope_sign();
    let f = move |y: f64| {
        let e = (-y).exp();
        1.0 + e * e + sign * 2.0 * a * e * (a * b * y).cos()
    };
    let inner = sup_on_half_line(f, a * b);
    BoundEvaluation {
        value: inner.value.max(0.0).sqrt(),
        maximizer_y: inner.maximizer_y,
        refinement_error: inner.refinement_error,
    }
}

/// Boundary-adapted exclusion threshold
/// `1 / ((s + 1/s) * osc_decay_sup_general(pin, a, cot t))` with `s = |zeta|`,
/// `t = arg zeta`, `a = (s - 1/s)/(s + 1/s)`.
///
/// `z` cannot be an eigenvalue of `D0 + V` with the pinned boundary
/// condition whenever this threshold exceeds `|V|_1 / (2c)`. Requires
/// `m > 0` and `zeta` off the real axis.
pub fn boundary_adapted_threshold(sp: &SpectralPoint, pin: PinnedComponent) -> Result<f64> {
    if sp.params.m == 0.0 {
        return Err(SpectralError::MasslessUndefined);
    }
    let s = sp.zeta_abs();
    let b = sp.cot_arg()?;
    let a = sp.asymmetry();
    let g = osc_decay_sup_general(pin, a, b);
    Ok(1.0 / ((s + 1.0 / s) * g.value))
}

/// Boundary-uniform exclusion threshold `(1 + max(s^2, 1/s^2))^{-1/2}`.
///
/// `z` cannot be an eigenvalue for any admissible boundary condition when
/// this exceeds `v = |V|_1 / c`. Defined for all `m >= 0`; equals
/// `1/sqrt(2)` identically when `m = 0`.
pub fn uniform_threshold(sp: &SpectralPoint) -> f64 {
    let s = sp.zeta_abs();
    let s2 = s * s;
    (1.0 + s2.max(1.0 / s2)).sqrt().recip()
}

/// Real spectral gap certified for Hermitian potentials.
///
/// For `v < sqrt(3)/2` the spectrum of `D0 + V` avoids an open real
/// interval; with the first component pinned it is
/// `(-mc^2 (1 - 2 v^2), mc^2 sqrt(1 - v^2))` and the mirror image with the
/// second component pinned. Returned as an interval-complement region whose
/// `real_band` is `band_factor * max(1, mc^2)`.
pub fn hermitian_spectral_gap(
    v: f64,
    pin: PinnedComponent,
    params: PhysicalParams,
    band_factor: f64,
) -> Result<EnclosureRegion> {
    if params.m == 0.0 {
        return Err(SpectralError::MasslessUndefined);
    }
    let limit = 0.75f64.sqrt();
    if !(v >= 0.0) || !v.is_finite() {
        return Err(SpectralError::InvalidArgument {
            reason: format!("coupling v must be finite and >= 0, got {v}"),
        });
    }
    if v >= limit {
        return Err(SpectralError::CouplingTooLarge { v, limit });
    }
    let mc2 = params.rest_energy();
    let inner = mc2 * (1.0 - 2.0 * v * v);
    let outer = mc2 * (1.0 - v * v).sqrt();
    let gap = match pin {
        PinnedComponent::First => (-inner, outer),
        PinnedComponent::Second => (-outer, inner),
    };
    debug_assert!(gap.0 < gap.1);
    Ok(EnclosureRegion::interval_complement(
        gap,
        band_factor * mc2.max(1.0),
        vec![format!(
            "certified real gap for Hermitian potentials at v = {v}, {:?} component pinned",
            pin
        )],
    ))
}

/// Moment-based eigenvalue exclusion near a gap edge.
///
/// Returns `true` when `(2 m c)^2 (first_moment^2 + l1_norm^2) < 1`; in that
/// case no eigenvalues emerge from `+mc^2` with the first component pinned
/// (resp. `-mc^2` with the second). Requires `m > 0`.
pub fn moment_criterion(md: &MomentData, params: PhysicalParams) -> Result<bool> {
    if params.m == 0.0 {
        return Err(SpectralError::MasslessUndefined);
    }
    let two_mc = 2.0 * params.m * params.c;
    Ok(two_mc * two_mc * (md.first_moment.powi(2) + md.l1_norm.powi(2)) < 1.0)
}

/// Moment-based upper bound for the squared norm of the sandwiched resolvent
/// near the gap edge `near`:
///
/// `(1/c^2) (|z^2 - (mc^2)^2| + |z + near|^2) M1^2
///  + (|z^2 - (mc^2)^2| + |z - near|^2)/|z^2 - (mc^2)^2| * M0^2`
///
/// where `near = +-mc^2`. The bound stays finite as `z` approaches `near`
/// and blows up at the opposite edge.
pub fn moment_norm_bound(sp: &SpectralPoint, md: &MomentData, near: GapEdge) -> Result<f64> {
    let params = sp.params;
    if params.m == 0.0 {
        return Err(SpectralError::MasslessUndefined);
    }
    let mc2 = params.rest_energy();
    let d = (sp.z * sp.z - Complex64::new(mc2 * mc2, 0.0)).norm();
    if d < 1e-14 * mc2.max(1.0).powi(2) {
        return Err(SpectralError::DegenerateDenominator { value: d });
    }
    let e = Complex64::new(near.sign() * mc2, 0.0);
    let same = (sp.z + e).norm_sqr();
    let opposite = (sp.z - e).norm_sqr();
    let c2 = params.c * params.c;
    Ok((d + same) / c2 * md.first_moment.powi(2) + (d + opposite) / d * md.l1_norm.powi(2))
}

/// Radius of the weak-coupling disk `|z -/+ mc^2| <= 2m (A lambda |V|_1 / c)^2`
/// implied by first-order perturbation around a gap edge.
pub fn weak_coupling_radius(lambda: f64, md: &MomentData, params: PhysicalParams, a: f64) -> f64 {
    2.0 * params.m * (a * lambda * md.l1_norm / params.c).powi(2)
}
