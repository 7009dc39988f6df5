//! `nrlimit`: non-relativistic limit tables.
//!
//! Emits the resolvent-convergence table over the configured speeds (with the
//! doubling-ratio verdict when the speeds double), the boundary-condition
//! limit map for the configured angle, and the gap-edge reduction ratios
//! whose limit recovers the scalar half-line bound.

use halfline_dirac::nonrel::{
    bc_limit_map, rate_check, schrodinger_reduction_check, BcType, RestShift, LIMIT_MASS,
};
use halfline_dirac::SpectralError;
use serde::Serialize;

use crate::config::ResolvedConfig;
use crate::error::{numerics, CliError, Result, Verdict};
use crate::report::{csv_num, ReportWriter};

#[derive(Serialize)]
struct RatePayload {
    shift: &'static str,
    c: f64,
    envelope_sup: f64,
    off_block_sup: f64,
    /// `envelope_sup(c) / envelope_sup(previous c)`; first-order convergence
    /// under doubling puts this near 1/2.
    ratio_to_prev: Option<f64>,
}

#[derive(Serialize)]
struct RateSummaryPayload {
    shift: &'static str,
    decay_exponent: f64,
}

#[derive(Serialize)]
struct RatioVerdictPayload {
    check: &'static str,
    shift: &'static str,
    c_from: f64,
    c_to: f64,
    ratio: f64,
    within_bounds: bool,
}

#[derive(Serialize)]
struct BcLimitPayload {
    check: &'static str,
    alpha: f64,
    shift: &'static str,
    bc_type: &'static str,
}

#[derive(Serialize)]
struct NotePayload {
    note: String,
}

#[derive(Serialize)]
struct ReductionPayload {
    theta: f64,
    magnitude: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct ReductionVerdictPayload {
    check: &'static str,
    theta: f64,
    final_ratio: f64,
    within_tol: bool,
}

fn shift_name(s: RestShift) -> &'static str {
    match s {
        RestShift::Plus => "plus",
        RestShift::Minus => "minus",
    }
}

fn bc_name(t: BcType) -> &'static str {
    match t {
        BcType::Dirichlet => "dirichlet",
        BcType::Neumann => "neumann",
    }
}

fn classify(e: SpectralError) -> CliError {
    match e {
        SpectralError::InvalidArgument { .. } | SpectralError::OnLimitSpectrum { .. } => {
            CliError::Config(format!("nrlimit precondition: {e}"))
        }
        other => numerics(other),
    }
}

pub fn run(rc: &ResolvedConfig, report: &mut ReportWriter) -> Result<Verdict> {
    if (rc.params.m - LIMIT_MASS).abs() > 1e-12 {
        return Err(CliError::Config(format!(
            "nrlimit requires params.mass = {LIMIT_MASS} (the convention of the limit \
             normalization), got {}",
            rc.params.m
        )));
    }
    let spec = rc.nrlimit_spec()?;
    let z = spec.z.value();
    let shifts: Vec<RestShift> = spec
        .shifts
        .iter()
        .map(|s| match s.as_str() {
            "plus" => Ok(RestShift::Plus),
            "minus" => Ok(RestShift::Minus),
            other => Err(CliError::Config(format!(
                "nrlimit.shifts: expected \"plus\" or \"minus\", got {other:?}"
            ))),
        })
        .collect::<Result<_>>()?;
    if !(spec.grid_step > 0.0 && spec.grid_max >= spec.grid_step) {
        return Err(CliError::Config(format!(
            "nrlimit grid: need 0 < grid_step <= grid_max, got step {} max {}",
            spec.grid_step, spec.grid_max
        )));
    }
    let mut grid = Vec::new();
    let mut x = 0.0;
    while x <= spec.grid_max + 1e-12 {
        grid.push(x);
        x += spec.grid_step;
    }
    let doubling = spec
        .c_list
        .windows(2)
        .all(|w| (w[1] / w[0] - 2.0).abs() < 1e-9);
    // At the component-pinning angles the leading first-order term of the
    // expansion vanishes and the kernels converge one order faster (ratio
    // near 1/4 under doubling). The [0.4, 0.6] band certifies the generic
    // first-order rate, so the ratio verdict only applies off those angles.
    let generic_angle = rc.bc.pinned_component().is_none();
    let ratio_verdict = doubling && generic_angle;
    if doubling && !generic_angle {
        report.write(
            "note",
            NotePayload {
                note: "rate-ratio verdict skipped: pinned boundary angle converges at \
                       second order (expect ratios near 0.25, exponent near 2)"
                    .into(),
            },
        )?;
    }

    let mut verdict = Verdict::Pass;
    for &shift in &shifts {
        let table = rate_check(z, &spec.c_list, rc.bc, shift, &grid).map_err(classify)?;
        let mut prev: Option<(f64, f64)> = None;
        for row in &table.rows {
            let ratio = prev.map(|(_, e)| row.envelope_sup / e);
            report.write(
                "rate-row",
                RatePayload {
                    shift: shift_name(shift),
                    c: row.c,
                    envelope_sup: row.envelope_sup,
                    off_block_sup: row.off_block_sup,
                    ratio_to_prev: ratio,
                },
            )?;
            report.csv_row(
                "rates.csv",
                "shift,c,envelope_sup,off_block_sup,ratio_to_prev",
                format!(
                    "{},{},{},{},{}",
                    shift_name(shift),
                    csv_num(row.c),
                    csv_num(row.envelope_sup),
                    csv_num(row.off_block_sup),
                    ratio.map(csv_num).unwrap_or_default()
                ),
            );
            if let (Some((c_prev, _)), Some(r)) = (prev, ratio) {
                if ratio_verdict {
                    let ok = (0.4..=0.6).contains(&r);
                    report.write(
                        "certificate",
                        RatioVerdictPayload {
                            check: "rate-ratio",
                            shift: shift_name(shift),
                            c_from: c_prev,
                            c_to: row.c,
                            ratio: r,
                            within_bounds: ok,
                        },
                    )?;
                    if !ok {
                        verdict = Verdict::Failed;
                    }
                }
            }
            prev = Some((row.c, row.envelope_sup));
        }
        report.write(
            "rate-row",
            RateSummaryPayload {
                shift: shift_name(shift),
                decay_exponent: table.decay_exponent,
            },
        )?;
    }

    for shift in [RestShift::Plus, RestShift::Minus] {
        let t = bc_limit_map(rc.bc, shift);
        report.write(
            "certificate",
            BcLimitPayload {
                check: "bc-limit",
                alpha: rc.bc.alpha(),
                shift: shift_name(shift),
                bc_type: bc_name(t),
            },
        )?;
    }

    for &theta in &spec.reduction_thetas {
        let rows =
            schrodinger_reduction_check(theta, &spec.reduction_magnitudes, rc.params)
                .map_err(classify)?;
        for row in &rows {
            report.write(
                "rate-row",
                ReductionPayload {
                    theta,
                    magnitude: row.magnitude,
                    ratio: row.ratio,
                },
            )?;
            report.csv_row(
                "reduction.csv",
                "theta,magnitude,ratio",
                format!(
                    "{},{},{}",
                    csv_num(theta),
                    csv_num(row.magnitude),
                    csv_num(row.ratio)
                ),
            );
        }
        if let Some(last) = rows.last() {
            let ok = (last.ratio - 1.0).abs() <= 1e-3;
            report.write(
                "certificate",
                ReductionVerdictPayload {
                    check: "reduction-limit",
                    theta,
                    final_ratio: last.ratio,
                    within_tol: ok,
                },
            )?;
            if !ok {
                verdict = Verdict::Failed;
            }
        }
    }
    Ok(verdict)
}
