//! `selftest`: a fast battery of internal consistency checks.
//!
//! Re-derives a slice of the library's invariants end to end — envelope
//! identities, the closed-form sup-norm, the two-disk containment, winding
//! additivity, cross-oracle agreement on a reference potential, and the
//! moment criterion — and emits one certificate record per check. Exit code
//! 0 iff every check passes.

use halfline_dirac::birman_schwinger::{
    bs_locate, DiagonalScheme, LocateOptions, QuadratureRule, ScanBox,
};
use halfline_dirac::bounds::{
    moment_criterion, osc_decay_sup, osc_decay_sup_general, PinnedComponent,
};
use halfline_dirac::evans::{find_zeros, winding_count, ScanRegion};
use halfline_dirac::mat2::Mat2;
use halfline_dirac::potential::{FactorizedPotential, Potential, PotentialTerm, ProfileShape};
use halfline_dirac::resolvent::{supnorm_closed_form, supnorm_numeric, BoundaryCondition};
use halfline_dirac::spectral::{compute_spectral_point, two_disk_enclosure, PhysicalParams};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{numerics, Result, Verdict};
use crate::report::ReportWriter;

#[derive(Serialize)]
struct CheckPayload {
    check: &'static str,
    pass: bool,
    detail: String,
}

struct Battery<'a> {
    report: &'a mut ReportWriter,
    verdict: Verdict,
}

impl<'a> Battery<'a> {
    fn record(&mut self, check: &'static str, pass: bool, detail: String) -> Result<()> {
        self.report.write("certificate", CheckPayload { check, pass, detail })?;
        if !pass {
            self.verdict = Verdict::Failed;
        }
        Ok(())
    }
}

fn step_potential(end: f64, amp: Complex64) -> Potential {
    Potential::new(vec![PotentialTerm {
        shape: ProfileShape::Step { start: 0.0, end },
        matrix: Mat2::identity().scale(amp),
    }])
    .expect("reference potential is valid")
}

pub fn run(report: &mut ReportWriter) -> Result<Verdict> {
    let mut b = Battery {
        report,
        verdict: Verdict::Pass,
    };
    let p = PhysicalParams::new(1.0, 1.0).expect("unit parameters");

    // Envelope value at zero asymmetry is sqrt(2) for both pins.
    let mut worst = 0.0f64;
    for pin in [PinnedComponent::First, PinnedComponent::Second] {
        for bval in [-5.0, -1.0, 0.0, 2.0, 7.0] {
            let g = osc_decay_sup_general(pin, 0.0, bval).value;
            worst = worst.max((g - std::f64::consts::SQRT_2).abs());
        }
    }
    b.record(
        "envelope-at-zero",
        worst <= 1e-10,
        format!("max |G(0,b) - sqrt(2)| = {worst:.3e}"),
    )?;

    // The scalar envelope stays inside [1, 2].
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..40 {
        let bval = -8.0 + 16.0 * k as f64 / 39.0;
        let g = osc_decay_sup(bval).value;
        lo = lo.min(g);
        hi = hi.max(g);
    }
    b.record(
        "envelope-range",
        lo >= 1.0 - 1e-9 && hi <= 2.0 + 1e-9,
        format!("range [{lo:.12}, {hi:.12}]"),
    )?;

    // Near-degenerate asymmetry recovers the scalar envelope.
    let mut worst = 0.0f64;
    for bval in [0.3, 1.0, 4.0] {
        let full = osc_decay_sup_general(PinnedComponent::First, 1.0 - 1e-4, bval).value;
        worst = worst.max((full - osc_decay_sup(bval).value).abs());
    }
    b.record(
        "envelope-limit",
        worst <= 1e-3,
        format!("max |G(1-1e-4,b) - g(b)| = {worst:.3e}"),
    )?;

    // Closed-form sup-norm against the direct numerical supremum.
    let mut worst = 0.0f64;
    for (z, pin) in [
        (Complex64::new(0.3, 0.4), PinnedComponent::First),
        (Complex64::new(-0.5, 0.2), PinnedComponent::Second),
        (Complex64::new(1.4, 0.9), PinnedComponent::First),
        (Complex64::new(-1.2, -0.6), PinnedComponent::Second),
    ] {
        let sp = compute_spectral_point(z, p).map_err(numerics)?;
        let closed = supnorm_closed_form(&sp, pin).map_err(numerics)?;
        let numeric = supnorm_numeric(&sp, BoundaryCondition::pinned(pin))
            .map_err(numerics)?
            .value;
        worst = worst.max((closed - numeric).abs() / closed.max(1.0));
    }
    b.record(
        "supnorm-closed-form",
        worst <= 1e-8,
        format!("max relative deviation = {worst:.3e}"),
    )?;

    // Two-disk radii and containment at the reference coupling 1/2.
    let enc = two_disk_enclosure(0.5, p).map_err(numerics)?;
    let radii_ok = (enc.derived_radius - 0.75).abs() <= 1e-12
        && (enc.published_radius_r0 - 1.5).abs() <= 1e-12;
    b.record(
        "two-disk",
        radii_ok && enc.derived_inside_published,
        format!(
            "derived {} published {} contained {}",
            enc.derived_radius, enc.published_radius_r0, enc.derived_inside_published
        ),
    )?;

    // Reference potential for the dynamical checks.
    let (pot, _) = step_potential(6.0, Complex64::new(-1.0, 0.0))
        .scale_to_coupling(0.5, p.c)
        .map_err(numerics)?;
    let bc = BoundaryCondition::new(0.0).expect("alpha 0");

    // Winding is additive under bisection of the region.
    let whole = ScanRegion::new((-0.995, 0.995), (-1.5, 1.5), p).map_err(numerics)?;
    let left = ScanRegion::new((-0.995, 0.0), (-1.5, 1.5), p).map_err(numerics)?;
    let right = ScanRegion::new((0.0, 0.995), (-1.5, 1.5), p).map_err(numerics)?;
    let w = winding_count(&whole, &pot, bc, p).map_err(numerics)?;
    let wl = winding_count(&left, &pot, bc, p).map_err(numerics)?;
    let wr = winding_count(&right, &pot, bc, p).map_err(numerics)?;
    b.record(
        "winding-additivity",
        w == wl + wr && w >= 1,
        format!("whole {w} = left {wl} + right {wr}"),
    )?;

    // Both oracles find the same gap eigenvalue.
    let zeros = find_zeros(&whole, &pot, bc, p).map_err(numerics)?;
    let fac = FactorizedPotential::new(pot.clone());
    let rule = QuadratureRule::composite_gl8(&pot.breakpoints(), 48).map_err(numerics)?;
    let bx = ScanBox::new((0.9, 1.05), (-0.05, 0.05)).map_err(numerics)?;
    let roots = bs_locate(
        &bx,
        bc,
        &fac,
        &rule,
        p,
        DiagonalScheme::Corrected,
        &LocateOptions::default(),
    )
    .map_err(numerics)?;
    let agree = match (zeros.as_slice(), roots.as_slice()) {
        ([z], [r]) => (z.z - r).norm() <= 1e-6 * (1.0 + z.z.norm()),
        _ => false,
    };
    b.record(
        "oracle-agreement",
        agree,
        format!("evans {:?} vs discretized {:?}", zeros.iter().map(|z| z.z).collect::<Vec<_>>(), roots),
    )?;

    // Moment criterion: holds for a weak short step, fails for a strong one.
    let weak = step_potential(1.0, Complex64::new(0.1, 0.0)).moments();
    let strong = step_potential(1.0, Complex64::new(3.0, 0.0)).moments();
    let weak_holds = moment_criterion(&weak, p).map_err(numerics)?;
    let strong_holds = moment_criterion(&strong, p).map_err(numerics)?;
    b.record(
        "moment-criterion",
        weak_holds && !strong_holds,
        format!("weak step {weak_holds}, strong step {strong_holds}"),
    )?;

    Ok(b.verdict)
}
