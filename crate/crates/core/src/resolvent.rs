//! Free-resolvent kernel `(D0 - z)^{-1}(x, y)` on the half line.
//!
//! The free operator acts as
//! `D0 psi = (mc^2 psi1 - c psi2', c psi1' - mc^2 psi2)` on spinors
//! satisfying `psi1(0) cos(alpha) = psi2(0) sin(alpha)`. Its resolvent is an
//! integral operator whose 2x2 matrix kernel is assembled from two explicit
//! solutions of `D0 psi = z psi`: one matching the boundary condition at the
//! origin ([`boundary_solution`]) and one square-integrable at infinity
//! ([`decaying_solution`]). The kernel normalization is fixed by the jump
//! condition across the diagonal, which [`free_kernel`] satisfies exactly
//! and which the tests verify; its sup-norm (times `c`) is the quantity the
//! exclusion thresholds in [`crate::bounds`] control.

use crate::bounds::{osc_decay_sup_general, sup_on_half_line, BoundEvaluation, PinnedComponent};
use crate::error::{Result, SpectralError};
use crate::mat2::{Mat2, Vec2};
use crate::spectral::SpectralPoint;
use num_complex::Complex64;
use serde::Serialize;

/// Separated boundary condition `psi1(0) cos(alpha) = psi2(0) sin(alpha)`,
/// `alpha` in `[0, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryCondition {
    alpha: f64,
}

impl BoundaryCondition {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || !(0.0..=std::f64::consts::FRAC_PI_2).contains(&alpha) {
            return Err(SpectralError::InvalidArgument {
                reason: format!("boundary angle must lie in [0, pi/2], got {alpha}"),
            });
        }
        Ok(Self { alpha })
    }

    /// The condition pinning the given spinor component to zero at the origin.
    pub fn pinned(pin: PinnedComponent) -> Self {
        Self { alpha: pin.alpha() }
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    /// `(sin(alpha), cos(alpha))`, the boundary data of [`boundary_solution`].
    pub fn sin_cos(self) -> (f64, f64) {
        (self.alpha.sin(), self.alpha.cos())
    }

    /// `Some` exactly when the angle is one of the two component-pinning
    /// endpoints `0` or `pi/2`.
    pub fn pinned_component(self) -> Option<PinnedComponent> {
        if self.alpha == 0.0 {
            Some(PinnedComponent::First)
        } else if self.alpha == std::f64::consts::FRAC_PI_2 {
            Some(PinnedComponent::Second)
        } else {
            None
        }
    }
}

/// Solution of `D0 psi = z psi` with `psi(0) = (sin(alpha), cos(alpha))`,
/// normalized by its boundary data:
///
/// `psi(x) = ( sin(a) cos(kx) + zeta cos(a) sin(kx),
///             -zeta^{-1} sin(a) sin(kx) + cos(a) cos(kx) )`.
///
/// Grows like `exp(Im k * x)`; real-valued boundary data make it satisfy the
/// boundary condition identically.
pub fn boundary_solution(sp: &SpectralPoint, bc: BoundaryCondition, x: f64) -> Vec2 {
    let (sa, ca) = bc.sin_cos();
    let kx = sp.kappa * x;
    let (s, c) = (kx.sin(), kx.cos());
    Vec2::new(
        sa * c + sp.zeta * ca * s,
        -sa * s / sp.zeta + ca * c,
    )
}

/// Square-integrable solution of `D0 psi = z psi`:
/// `psi(x) = exp(i k x) (-i zeta, 1)`, decaying like `exp(-Im k * x)`.
pub fn decaying_solution(sp: &SpectralPoint, x: f64) -> Vec2 {
    let phase = (Complex64::i() * sp.kappa * x).exp();
    Vec2::new(-Complex64::i() * sp.zeta * phase, phase)
}

/// Scaled Wronskian `sin(alpha) + i zeta cos(alpha)` of the two solutions;
/// `x`-independent and nonzero whenever `Im zeta <= 0` and `zeta != 0`.
pub fn boundary_wronskian(sp: &SpectralPoint, bc: BoundaryCondition) -> Result<Complex64> {
    let (sa, ca) = bc.sin_cos();
    let w = Complex64::new(sa, 0.0) + Complex64::i() * sp.zeta * ca;
    if w.norm() < 1e-14 * (1.0 + sp.zeta.norm()) {
        return Err(SpectralError::WronskianVanishes);
    }
    Ok(w)
}

/// Free-resolvent kernel `R0(x, y)` for `x, y >= 0`:
///
/// `R0(x, y) = -(1/(c w)) * [ psi_inf(x) psi_bc(y)^T   if x >= y,
///                            psi_bc(x) psi_inf(y)^T   if x < y ]`
///
/// with `w` the scaled Wronskian, plain (unconjugated) transpose, and the
/// diagonal assigned to the first branch. The overall sign makes the jump
/// across the diagonal equal `(1/c) [[0, 1], [-1, 0]]`, which is what
/// `(D0 - z) R0 = Id` requires; the tests check both the jump and the action
/// on smooth data.
pub fn free_kernel(
    sp: &SpectralPoint,
    bc: BoundaryCondition,
    x: f64,
    y: f64,
) -> Result<Mat2> {
    if x < 0.0 || y < 0.0 || !x.is_finite() || !y.is_finite() {
        return Err(SpectralError::InvalidArgument {
            reason: format!("kernel arguments must be finite and >= 0, got ({x}, {y})"),
        });
    }
    let w = boundary_wronskian(sp, bc)?;
    let norm = -(sp.params.c * w).finv();
    let m = if x >= y {
        Mat2::outer(decaying_solution(sp, x), boundary_solution(sp, bc, y))
    } else {
        Mat2::outer(boundary_solution(sp, bc, x), decaying_solution(sp, y))
    };
    Ok(m.scale(norm))
}

/// Numerical supremum of `c * ||R0(x, y)||` over the quadrant `x, y >= 0`.
///
/// Both branches of the kernel are rank one, so the norm factorizes into
/// `||psi_inf|| * ||psi_bc|| / |w|`; since `||psi_inf||` decays strictly, the
/// supremum sits on the diagonal `x = y` and is maximized there by the same
/// grid-plus-golden-section scan that evaluates the analytic bound
/// functions, after rescaling to the decay variable `u = 2 Im(k) y`.
pub fn supnorm_numeric(sp: &SpectralPoint, bc: BoundaryCondition) -> Result<BoundEvaluation> {
    let w_abs = boundary_wronskian(sp, bc)?.norm();
    let q = sp.kappa.im;
    debug_assert!(q > 0.0);
    let freq = (sp.kappa.re / q).abs();
    let f = move |u: f64| {
        let y = u / (2.0 * q);
        decaying_solution(sp, y).norm() * boundary_solution(sp, bc, y).norm() / w_abs
    };
    let eval = sup_on_half_line(f, freq);
    Ok(BoundEvaluation {
        value: eval.value,
        maximizer_y: eval.maximizer_y / (2.0 * q),
        refinement_error: eval.refinement_error / (2.0 * q),
    })
}

/// Closed form of [`supnorm_numeric`] at the component-pinning angles:
/// `((s + 1/s)/2) * osc_decay_sup_general(pin, a, cot t)` with `s = |zeta|`,
/// `t = arg zeta`, `a` the asymmetry. Requires `m > 0` (so that `zeta` is
/// strictly complex).
pub fn supnorm_closed_form(sp: &SpectralPoint, pin: PinnedComponent) -> Result<f64> {
    if sp.params.m == 0.0 {
        return Err(SpectralError::MasslessUndefined);
    }
    let s = sp.zeta_abs();
    let b = sp.cot_arg()?;
    let g = osc_decay_sup_general(pin, sp.asymmetry(), b);
    Ok(0.5 * (s + 1.0 / s) * g.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{compute_spectral_point, PhysicalParams};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(m: f64, c: f64) -> PhysicalParams {
        PhysicalParams::new(m, c).unwrap()
    }

    fn sp(re: f64, im: f64, m: f64, c: f64) -> SpectralPoint {
        compute_spectral_point(Complex64::new(re, im), params(m, c)).unwrap()
    }

    /// Central-difference application of `D0 - z` to a spinor field.
    fn apply_free_operator(
        psi: &impl Fn(f64) -> Vec2,
        sp: &SpectralPoint,
        x: f64,
        h: f64,
    ) -> Vec2 {
        let up = psi(x + h);
        let dn = psi(x - h);
        let here = psi(x);
        let d1 = (up.a - dn.a) / (2.0 * h);
        let d2 = (up.b - dn.b) / (2.0 * h);
        let mc2 = sp.params.rest_energy();
        let c = sp.params.c;
        Vec2::new(
            mc2 * here.a - c * d2 - sp.z * here.a,
            c * d1 - mc2 * here.b - sp.z * here.b,
        )
    }

    #[test]
    fn both_solutions_satisfy_the_equation() {
        for &(re, im, m, c, alpha) in &[
            (0.5, 0.0, 1.0, 1.0, 0.0),
            (0.4, 0.3, 1.0, 1.0, 0.7),
            (-0.6, 0.2, 0.8, 1.3, std::f64::consts::FRAC_PI_2),
            (1.5, 1.0, 1.0, 2.0, 0.3),
            (0.0, 0.5, 0.0, 1.0, 1.0),
        ] {
            let sp = sp(re, im, m, c);
            let bc = BoundaryCondition::new(alpha).unwrap();
            for &x in &[0.2, 1.0, 2.5] {
                let r1 = apply_free_operator(&|x| boundary_solution(&sp, bc, x), &sp, x, 1e-5);
                let r2 = apply_free_operator(&|x| decaying_solution(&sp, x), &sp, x, 1e-5);
                let scale1 = boundary_solution(&sp, bc, x).norm().max(1.0);
                let scale2 = decaying_solution(&sp, x).norm().max(1.0);
                assert!(r1.norm() / scale1 < 1e-8, "boundary solution fails at x={x}");
                assert!(r2.norm() / scale2 < 1e-8, "decaying solution fails at x={x}");
            }
        }
    }

    #[test]
    fn boundary_solution_matches_boundary_condition() {
        let sp = sp(0.3, 0.4, 1.0, 1.0);
        for &alpha in &[0.0, 0.4, 1.0, std::f64::consts::FRAC_PI_2] {
            let bc = BoundaryCondition::new(alpha).unwrap();
            let at0 = boundary_solution(&sp, bc, 0.0);
            let residual = at0.a * alpha.cos() - at0.b * alpha.sin();
            assert!(residual.norm() < 1e-14);
            assert_relative_eq!(at0.a.re, alpha.sin(), epsilon = 1e-15);
            assert_relative_eq!(at0.b.re, alpha.cos(), epsilon = 1e-15);
        }
    }

    #[test]
    fn wronskian_is_constant_and_matches_closed_form() {
        let sp = sp(0.2, 0.7, 1.0, 1.0);
        let bc = BoundaryCondition::new(0.9).unwrap();
        let w = boundary_wronskian(&sp, bc).unwrap();
        assert_relative_eq!(
            (w - (Complex64::new(0.9f64.sin(), 0.0) + Complex64::i() * sp.zeta * 0.9f64.cos()))
                .norm(),
            0.0,
            epsilon = 1e-15
        );
        for &x in &[0.0, 0.8, 2.0] {
            let l = boundary_solution(&sp, bc, x);
            let d = decaying_solution(&sp, x);
            let det = l.a * d.b - l.b * d.a;
            assert_relative_eq!((det - w).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn kernel_jump_across_diagonal() {
        // Difference of the two branches at x = y must be (1/c) [[0,1],[-1,0]].
        for &(re, im, m, c, alpha) in &[
            (0.5, 0.0, 1.0, 1.0, 0.0),
            (0.4, 0.3, 1.0, 1.0, 0.7),
            (-0.6, 0.2, 0.8, 1.3, std::f64::consts::FRAC_PI_2),
            (0.0, 0.5, 0.0, 2.0, 0.2),
        ] {
            let sp = sp(re, im, m, c);
            let bc = BoundaryCondition::new(alpha).unwrap();
            let w = boundary_wronskian(&sp, bc).unwrap();
            let norm = -(Complex64::new(c, 0.0) * w).finv();
            for &y in &[0.0, 0.7, 1.9] {
                let above = Mat2::outer(decaying_solution(&sp, y), boundary_solution(&sp, bc, y))
                    .scale(norm);
                let below = Mat2::outer(boundary_solution(&sp, bc, y), decaying_solution(&sp, y))
                    .scale(norm);
                let jump = above - below;
                let want = Mat2::new(
                    Complex64::new(0.0, 0.0),
                    Complex64::new(1.0 / c, 0.0),
                    Complex64::new(-1.0 / c, 0.0),
                    Complex64::new(0.0, 0.0),
                );
                assert!(
                    (jump - want).frobenius_norm() < 1e-12,
                    "jump failed at y={y}, alpha={alpha}: {jump:?}"
                );
            }
        }
    }

    #[test]
    fn kernel_worked_value_massless() {
        // m = 0, z = i, c = 1, alpha = pi/2: kappa = i, zeta = 1, w = 1;
        // R0(0,0) = [[i, 0], [-1, 0]] and R0(1,0) = e^{-1} [[i, 0], [-1, 0]].
        let sp = sp(0.0, 1.0, 0.0, 1.0);
        let bc = BoundaryCondition::pinned(PinnedComponent::Second);
        let k00 = free_kernel(&sp, bc, 0.0, 0.0).unwrap();
        let want = Mat2::new(
            Complex64::i(),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        assert!((k00 - want).frobenius_norm() < 1e-14);
        assert_relative_eq!(k00.operator_norm(), std::f64::consts::SQRT_2, epsilon = 1e-14);
        let k10 = free_kernel(&sp, bc, 1.0, 0.0).unwrap();
        assert!((k10 - want.scale(Complex64::new((-1.0f64).exp(), 0.0))).frobenius_norm() < 1e-14);
    }

    #[test]
    fn kernel_inverts_free_operator() {
        // u(x) = int R0(x, y) f(y) dy with smooth compactly supported f must
        // satisfy (D0 - z) u = f and the boundary condition. The integral is
        // done with Simpson panels split at y = x (kernel kink).
        let cases = [
            (0.4, 0.3, 1.0, 1.0, 0.0),
            (0.3, -0.2, 1.0, 1.0, 0.9),
            (-0.5, 0.4, 0.7, 1.2, std::f64::consts::FRAC_PI_2),
        ];
        let support = 2.0;
        let f = |y: f64| -> Vec2 {
            if y <= 0.0 || y >= support {
                return Vec2::zero();
            }
            let bump = (y * (support - y)).powi(2);
            Vec2::new(
                Complex64::new(bump, 0.3 * bump),
                Complex64::new((std::f64::consts::PI * y).sin() * bump, 0.0),
            )
        };
        for &(re, im, m, c, alpha) in &cases {
            let sp = sp(re, im, m, c);
            let bc = BoundaryCondition::new(alpha).unwrap();
            let u = |x: f64| -> Vec2 {
                // Composite Simpson on [0, x] and [x, support]. The kernel is
                // discontinuous across y = x and free_kernel assigns the
                // diagonal to the x >= y branch, so the second panel starts a
                // hair above x to sample the y > x branch at its endpoint.
                let mut acc = Vec2::zero();
                for (lo, hi) in [(0.0, x.min(support)), (x.min(support) + 1e-12, support)] {
                    if hi - lo < 1e-12 {
                        continue;
                    }
                    let n = 400;
                    let h = (hi - lo) / n as f64;
                    for i in 0..n {
                        let a = lo + i as f64 * h;
                        let mid = a + 0.5 * h;
                        let b = a + h;
                        let ka = free_kernel(&sp, bc, x, a).unwrap();
                        let km = free_kernel(&sp, bc, x, mid).unwrap();
                        let kb = free_kernel(&sp, bc, x, b).unwrap();
                        let term = ka.apply(f(a)) + km.apply(f(mid)).scale(4.0.into())
                            + kb.apply(f(b));
                        acc = acc + term.scale((h / 6.0).into());
                    }
                }
                acc
            };
            // (D0 - z) u must reproduce f at interior points.
            for &x in &[0.5, 1.3] {
                let resid = apply_free_operator(&u, &sp, x, 1e-4);
                let diff = Vec2::new(resid.a - f(x).a, resid.b - f(x).b);
                assert!(
                    diff.norm() < 2e-5 * (1.0 + f(x).norm()),
                    "action residual {} at x={x} (alpha={alpha})",
                    diff.norm()
                );
            }
            // Boundary condition at the origin.
            let at0 = u(0.0);
            let bres = at0.a * alpha.cos() - at0.b * alpha.sin();
            assert!(bres.norm() < 1e-8, "bc residual {} (alpha={alpha})", bres.norm());
        }
    }

    #[test]
    fn supnorm_numeric_matches_closed_form_at_pinning_angles() {
        for &(re, im) in &[(0.5, 0.0), (0.3, 0.4), (-0.4, 0.2), (0.9, 0.05), (-1.5, 1.0)] {
            let sp = sp(re, im, 1.0, 1.0);
            for pin in [PinnedComponent::First, PinnedComponent::Second] {
                let closed = supnorm_closed_form(&sp, pin).unwrap();
                let numeric = supnorm_numeric(&sp, BoundaryCondition::pinned(pin)).unwrap();
                assert_relative_eq!(numeric.value, closed, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn supnorm_equals_inverse_uniform_threshold_only_up_to_slack() {
        // The generic bound sqrt(1 + max(s^2, 1/s^2)) dominates the numeric
        // sup for every angle, with equality nowhere in general.
        let angles = [0.0, 0.3, 0.8, 1.2, std::f64::consts::FRAC_PI_2];
        for &(re, im) in &[(0.5, 0.0), (0.2, 0.6), (-0.8, 0.3)] {
            let sp = sp(re, im, 1.0, 1.0);
            let s2 = sp.zeta_abs().powi(2);
            let generic = (1.0 + s2.max(1.0 / s2)).sqrt();
            for &alpha in &angles {
                let numeric = supnorm_numeric(&sp, BoundaryCondition::new(alpha).unwrap())
                    .unwrap()
                    .value;
                assert!(
                    numeric <= generic + 1e-9,
                    "sup {numeric} exceeds generic bound {generic} at alpha={alpha}"
                );
            }
        }
    }

    #[test]
    fn kernel_rejects_negative_coordinates() {
        let sp = sp(0.3, 0.4, 1.0, 1.0);
        let bc = BoundaryCondition::new(0.5).unwrap();
        assert!(matches!(
            free_kernel(&sp, bc, -0.1, 0.5),
            Err(SpectralError::InvalidArgument { .. })
        ));
        assert!(BoundaryCondition::new(2.0).is_err());
        assert!(BoundaryCondition::new(-0.1).is_err());
    }

    proptest! {
        /// The kernel stays finite, the jump identity holds, and the scaling
        /// c*||R0|| is bounded by the generic bound, over random admissible
        /// inputs.
        #[test]
        fn kernel_invariants(
            re in -3.0f64..3.0,
            im in -3.0f64..3.0,
            m in 0.1f64..1.5,
            c in 0.5f64..2.0,
            alpha in 0.0f64..std::f64::consts::FRAC_PI_2,
            x in 0.0f64..5.0,
            y in 0.0f64..5.0,
        ) {
            let p = params(m, c);
            let z = Complex64::new(re, im);
            prop_assume!(p.distance_to_spectrum(z) > 1e-3 * p.rest_energy().max(1.0));
            let sp = compute_spectral_point(z, p).unwrap();
            let bc = BoundaryCondition::new(alpha).unwrap();
            let k = free_kernel(&sp, bc, x, y).unwrap();
            prop_assert!(k.frobenius_norm().is_finite());
            let s2 = sp.zeta_abs().powi(2);
            let generic = (1.0 + s2.max(1.0 / s2)).sqrt();
            prop_assert!(c * k.operator_norm() <= generic + 1e-9);
            // Jump identity at a random diagonal point.
            let w = boundary_wronskian(&sp, bc).unwrap();
            let norm = -(Complex64::new(c, 0.0) * w).finv();
            let above = Mat2::outer(decaying_solution(&sp, y), boundary_solution(&sp, bc, y)).scale(norm);
            let below = Mat2::outer(boundary_solution(&sp, bc, y), decaying_solution(&sp, y)).scale(norm);
            let jump = above - below;
            prop_assert!((jump.e12 - Complex64::new(1.0 / c, 0.0)).norm() < 1e-9 * (1.0 / c));
            prop_assert!((jump.e21 + Complex64::new(1.0 / c, 0.0)).norm() < 1e-9 * (1.0 / c));
            prop_assert!(jump.e11.norm() < 1e-9 / c);
            prop_assert!(jump.e22.norm() < 1e-9 / c);
        }
    }
}
