//! `enclosure`: closed-form eigenvalue regions for the configured run.
//!
//! Emits the two-disk enclosure (derived and published radii with the
//! containment verdict), the level-set boundary of the boundary-adapted
//! threshold at the configured coupling, the Hermitian spectral gap when the
//! potential is Hermitian, and the first-moment exclusion verdict.

use halfline_dirac::bounds::{
    boundary_adapted_threshold, hermitian_spectral_gap, moment_criterion, PinnedComponent,
};
use halfline_dirac::spectral::{compute_spectral_point, two_disk_enclosure, TwoDiskEnclosure};
use halfline_dirac::SpectralError;
use num_complex::Complex64;
use serde::Serialize;

use crate::config::ResolvedConfig;
use crate::error::{numerics, CliError, Result, Verdict};
use crate::report::{csv_num, ReportWriter};

#[derive(Serialize)]
struct DiskPayload {
    family: &'static str,
    center_re: f64,
    center_im: f64,
    radius: f64,
}

#[derive(Serialize)]
struct SummaryPayload {
    rho: f64,
    published_center_x0: f64,
    published_radius_r0: f64,
    derived_radius: f64,
    derived_inside_published: bool,
    verdict: String,
}

#[derive(Serialize)]
struct EmptyPayload {
    note: &'static str,
}

#[derive(Serialize)]
struct LevelSetPayload {
    pin: &'static str,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct GapPayload {
    pin: &'static str,
    gap_lo: f64,
    gap_hi: f64,
    real_band: f64,
}

#[derive(Serialize)]
struct MomentPayload {
    l1_norm: f64,
    first_moment: f64,
    criterion_holds: bool,
}

#[derive(Serialize)]
struct NotePayload {
    note: String,
}

fn pin_name(pin: PinnedComponent) -> &'static str {
    match pin {
        PinnedComponent::First => "first",
        PinnedComponent::Second => "second",
    }
}

pub fn run(rc: &ResolvedConfig, report: &mut ReportWriter) -> Result<Verdict> {
    let p = rc.params;
    let v = rc.coupling;

    // Precondition of the two-disk region; the library error carries the
    // admissible bound.
    let enc = match two_disk_enclosure(v, p) {
        Ok(enc) => enc,
        Err(e @ SpectralError::CouplingTooLarge { .. }) => {
            return Err(CliError::Config(format!("enclosure precondition: {e}")));
        }
        Err(e) => return Err(numerics(e)),
    };

    let mut verdict = Verdict::Pass;
    if p.m == 0.0 {
        report.write(
            "enclosure",
            EmptyPayload {
                note: "empty enclosure; spectrum = \u{211d}",
            },
        )?;
    } else {
        for d in &enc.derived.disks {
            report.write(
                "enclosure",
                DiskPayload {
                    family: "derived",
                    center_re: d.center.re,
                    center_im: d.center.im,
                    radius: d.radius,
                },
            )?;
        }
        for d in &enc.published.disks {
            report.write(
                "enclosure",
                DiskPayload {
                    family: "published",
                    center_re: d.center.re,
                    center_im: d.center.im,
                    radius: d.radius,
                },
            )?;
        }
        verdict = verdict.and(summary(&enc, report)?);
    }

    level_set(rc, report)?;
    hermitian_gap(rc, report)?;
    moments(rc, report)?;
    Ok(verdict)
}

fn summary(enc: &TwoDiskEnclosure, report: &mut ReportWriter) -> Result<Verdict> {
    let verdict_text = format!(
        "derived \u{2286} published: {}",
        enc.derived_inside_published
    );
    report.write(
        "enclosure",
        SummaryPayload {
            rho: enc.rho,
            published_center_x0: enc.published_center_x0,
            published_radius_r0: enc.published_radius_r0,
            derived_radius: enc.derived_radius,
            derived_inside_published: enc.derived_inside_published,
            verdict: verdict_text,
        },
    )?;
    Ok(if enc.derived_inside_published {
        Verdict::Pass
    } else {
        Verdict::Failed
    })
}

/// Samples the boundary of the refined exclusion region: the level set where
/// the boundary-adapted threshold equals `v/2`. Rows of constant `Im z` are
/// swept and each sign change of `threshold - v/2` is bisected.
fn level_set(rc: &ResolvedConfig, report: &mut ReportWriter) -> Result<()> {
    let Some(pin) = rc.bc.pinned_component() else {
        report.write(
            "note",
            NotePayload {
                note: "level-set boundary skipped: threshold defined for pinned \
                       boundary angles 0 and pi/2 only"
                    .into(),
            },
        )?;
        return Ok(());
    };
    if rc.params.m == 0.0 {
        return Ok(());
    }
    let p = rc.params;
    let rest = p.rest_energy();
    let target = 0.5 * rc.coupling;
    let (nx, ny) = (161usize, 41usize);
    let re_max = 3.0 * rest;
    let im_max = 1.7 * rest;
    let tau = |z: Complex64| -> Option<f64> {
        let sp = compute_spectral_point(z, p).ok()?;
        boundary_adapted_threshold(&sp, pin).ok()
    };
    for j in 0..ny {
        let im = -im_max + 2.0 * im_max * j as f64 / (ny - 1) as f64;
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..nx {
            let re = -re_max + 2.0 * re_max * i as f64 / (nx - 1) as f64;
            let Some(t) = tau(Complex64::new(re, im)) else {
                prev = None;
                continue;
            };
            if let Some((re0, t0)) = prev {
                if (t0 - target).signum() != (t - target).signum() {
                    let (mut a, mut fa, mut b) = (re0, t0 - target, re);
                    for _ in 0..60 {
                        let mid = 0.5 * (a + b);
                        let Some(tm) = tau(Complex64::new(mid, im)) else {
                            break;
                        };
                        let fm = tm - target;
                        if fm.signum() == fa.signum() {
                            a = mid;
                            fa = fm;
                        } else {
                            b = mid;
                        }
                    }
                    let re_cross = 0.5 * (a + b);
                    report.write(
                        "enclosure",
                        LevelSetPayload {
                            pin: pin_name(pin),
                            re: re_cross,
                            im,
                        },
                    )?;
                    report.csv_row(
                        "levelset.csv",
                        "pin,re,im",
                        format!("{},{},{}", pin_name(pin), csv_num(re_cross), csv_num(im)),
                    );
                }
            }
            prev = Some((re, t));
        }
    }
    Ok(())
}

fn hermitian_gap(rc: &ResolvedConfig, report: &mut ReportWriter) -> Result<()> {
    if !rc.potential.is_hermitian(1e-12) || rc.params.m == 0.0 {
        return Ok(());
    }
    let Some(pin) = rc.bc.pinned_component() else {
        return Ok(());
    };
    match hermitian_spectral_gap(rc.coupling, pin, rc.params, 2.0) {
        Ok(region) => {
            let (lo, hi) = region.excluded_gap.unwrap_or((0.0, 0.0));
            report.write(
                "enclosure",
                GapPayload {
                    pin: pin_name(pin),
                    gap_lo: lo,
                    gap_hi: hi,
                    real_band: region.real_band,
                },
            )?;
        }
        Err(SpectralError::CouplingTooLarge { v, limit }) => {
            report.write(
                "note",
                NotePayload {
                    note: format!(
                        "hermitian gap skipped: coupling {v} exceeds the gap bound {limit}"
                    ),
                },
            )?;
        }
        Err(e) => return Err(numerics(e)),
    }
    Ok(())
}

fn moments(rc: &ResolvedConfig, report: &mut ReportWriter) -> Result<()> {
    if rc.params.m == 0.0 {
        return Ok(());
    }
    let md = rc.potential.moments();
    let holds = moment_criterion(&md, rc.params).map_err(numerics)?;
    report.write(
        "enclosure",
        MomentPayload {
            l1_norm: md.l1_norm,
            first_moment: md.first_moment,
            criterion_holds: holds,
        },
    )?;
    Ok(())
}
