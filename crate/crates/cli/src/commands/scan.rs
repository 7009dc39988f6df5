//! `scan`: eigenvalue search over a configured rectangle with both oracles.
//!
//! Emits a winding-number map over a cell grid, zeros found by the
//! shooting method and by the dense discretization, pairwise agreement
//! distances, and an enclosure-membership verdict per zero. The exit code is
//! 0 exactly when every membership verdict passes.

use halfline_dirac::birman_schwinger::{
    bs_locate, DiagonalScheme, LocateOptions, QuadratureRule, ScanBox,
};
use halfline_dirac::evans::{find_zeros_with_tol, winding_count_with_tol, ScanRegion};
use halfline_dirac::potential::FactorizedPotential;
use halfline_dirac::spectral::two_disk_enclosure;
use halfline_dirac::SpectralError;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ResolvedConfig;
use crate::error::{numerics, CliError, Result, Verdict};
use crate::report::{csv_num, ReportWriter};

#[derive(Serialize)]
struct WindingCellPayload {
    i: usize,
    j: usize,
    re_lo: f64,
    re_hi: f64,
    im_lo: f64,
    im_hi: f64,
    count: i64,
}

#[derive(Serialize)]
struct ZeroPayload {
    method: &'static str,
    re: f64,
    im: f64,
    residual: Option<f64>,
    multiplicity: Option<u32>,
}

#[derive(Serialize)]
struct AgreementPayload {
    check: &'static str,
    evans_re: f64,
    evans_im: f64,
    bs_re: Option<f64>,
    bs_im: Option<f64>,
    distance: Option<f64>,
}

#[derive(Serialize)]
struct MembershipPayload {
    check: &'static str,
    method: &'static str,
    re: f64,
    im: f64,
    inside_derived: bool,
    inside_published: bool,
    violation: bool,
}

#[derive(Serialize)]
struct NotePayload {
    note: String,
}

pub fn run(rc: &ResolvedConfig, report: &mut ReportWriter) -> Result<Verdict> {
    let p = rc.params;
    let region = rc.scan_region()?;
    let spec = rc.scan_spec()?;

    let enc = match two_disk_enclosure(rc.coupling, p) {
        Ok(enc) => enc,
        Err(e @ SpectralError::CouplingTooLarge { .. }) => {
            return Err(CliError::Config(format!("scan precondition: {e}")));
        }
        Err(e) => return Err(numerics(e)),
    };
    let mut derived = enc.derived.clone();
    if let Some(fault) = rc.config.fault_injection {
        for d in &mut derived.disks {
            d.radius *= fault.shrink_derived_radius;
        }
        report.write(
            "note",
            NotePayload {
                note: format!(
                    "fault injection active: derived radii shrunk by factor {}",
                    fault.shrink_derived_radius
                ),
            },
        )?;
    }

    winding_map(rc, &region, spec.grid, report)?;
    let zeros = find_zeros_with_tol(&region, &rc.potential, rc.bc, p, rc.ode_rtol)
        .map_err(numerics)?;
    for z in &zeros {
        report.write(
            "zero",
            ZeroPayload {
                method: "evans",
                re: z.z.re,
                im: z.z.im,
                residual: Some(z.residual),
                multiplicity: Some(z.multiplicity),
            },
        )?;
        report.csv_row(
            "zeros.csv",
            "method,re,im,residual,multiplicity",
            format!(
                "evans,{},{},{},{}",
                csv_num(z.z.re),
                csv_num(z.z.im),
                csv_num(z.residual),
                z.multiplicity
            ),
        );
    }

    let roots = bs_roots(rc, spec)?;
    for r in &roots {
        report.write(
            "zero",
            ZeroPayload {
                method: "birman-schwinger",
                re: r.re,
                im: r.im,
                residual: None,
                multiplicity: None,
            },
        )?;
        report.csv_row(
            "zeros.csv",
            "method,re,im,residual,multiplicity",
            format!("birman-schwinger,{},{},,", csv_num(r.re), csv_num(r.im)),
        );
    }

    for z in &zeros {
        let nearest = roots
            .iter()
            .min_by(|a, b| {
                (*a - z.z)
                    .norm()
                    .partial_cmp(&(*b - z.z).norm())
                    .expect("finite distances")
            })
            .copied();
        report.write(
            "certificate",
            AgreementPayload {
                check: "oracle-agreement",
                evans_re: z.z.re,
                evans_im: z.z.im,
                bs_re: nearest.map(|r| r.re),
                bs_im: nearest.map(|r| r.im),
                distance: nearest.map(|r| (r - z.z).norm()),
            },
        )?;
    }

    let tol = 1e-8 * p.rest_energy().max(1.0);
    let mut verdict = Verdict::Pass;
    let membership = |method: &'static str,
                      z: Complex64,
                      report: &mut ReportWriter|
     -> Result<Verdict> {
        let inside_derived = derived.contains(z, tol);
        let inside_published = enc.published.contains(z, tol);
        report.write(
            "certificate",
            MembershipPayload {
                check: "enclosure-membership",
                method,
                re: z.re,
                im: z.im,
                inside_derived,
                inside_published,
                violation: !inside_derived,
            },
        )?;
        Ok(if inside_derived {
            Verdict::Pass
        } else {
            Verdict::Failed
        })
    };
    for z in &zeros {
        verdict = verdict.and(membership("evans", z.z, report)?);
    }
    for r in &roots {
        verdict = verdict.and(membership("birman-schwinger", *r, report)?);
    }
    Ok(verdict)
}

/// Winding count per cell of an `nx x ny` partition of the region. Cells are
/// computed in parallel; rows are emitted in `(j, i)` order regardless of
/// the schedule.
fn winding_map(
    rc: &ResolvedConfig,
    region: &ScanRegion,
    grid: [usize; 2],
    report: &mut ReportWriter,
) -> Result<()> {
    let [nx, ny] = grid;
    if nx == 0 && ny == 0 {
        return Ok(());
    }
    if nx == 0 || ny == 0 {
        return Err(CliError::Config(format!(
            "scan.grid: both resolutions must be positive (or both zero to skip), got {nx}x{ny}"
        )));
    }
    let (re, im) = (region.re_range(), region.im_range());
    let margin = region.spectrum_margin();
    let p = rc.params;
    let cells: Vec<(usize, usize)> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (j, i)))
        .collect();
    let rows: Vec<(usize, usize, ScanRegion, i64)> = cells
        .into_par_iter()
        .map(|(j, i)| -> Result<(usize, usize, ScanRegion, i64)> {
            let re_lo = re.0 + (re.1 - re.0) * i as f64 / nx as f64;
            let re_hi = re.0 + (re.1 - re.0) * (i + 1) as f64 / nx as f64;
            let im_lo = im.0 + (im.1 - im.0) * j as f64 / ny as f64;
            let im_hi = im.0 + (im.1 - im.0) * (j + 1) as f64 / ny as f64;
            let cell = ScanRegion::with_margin((re_lo, re_hi), (im_lo, im_hi), margin, p)
                .map_err(numerics)?;
            let count = winding_count_with_tol(&cell, &rc.potential, rc.bc, p, rc.ode_rtol)
                .map_err(numerics)?;
            Ok((j, i, cell, count))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = rows;
    rows.sort_by_key(|&(j, i, _, _)| (j, i));
    for (j, i, cell, count) in rows {
        let (re, im) = (cell.re_range(), cell.im_range());
        report.write(
            "winding-cell",
            WindingCellPayload {
                i,
                j,
                re_lo: re.0,
                re_hi: re.1,
                im_lo: im.0,
                im_hi: im.1,
                count,
            },
        )?;
        report.csv_row(
            "winding.csv",
            "i,j,re_lo,re_hi,im_lo,im_hi,count",
            format!(
                "{i},{j},{},{},{},{},{count}",
                csv_num(re.0),
                csv_num(re.1),
                csv_num(im.0),
                csv_num(im.1)
            ),
        );
    }
    Ok(())
}

fn bs_roots(rc: &ResolvedConfig, spec: &crate::config::ScanSpec) -> Result<Vec<Complex64>> {
    let bx = ScanBox::new((spec.re[0], spec.re[1]), (spec.im[0], spec.im[1]))
        .map_err(|e| CliError::Config(format!("scan region: {e}")))?;
    let fac = FactorizedPotential::new(rc.potential.clone());
    let rule = QuadratureRule::composite_gl8(&rc.potential.breakpoints(), rc.bs_nodes)
        .map_err(numerics)?;
    bs_locate(
        &bx,
        rc.bc,
        &fac,
        &rule,
        rc.params,
        DiagonalScheme::Corrected,
        &LocateOptions::default(),
    )
    .map_err(numerics)
}
