//! Command-line driver for the half-line Dirac spectral toolkit.
//!
//! Subcommands: `enclosure` (closed-form eigenvalue regions), `scan`
//! (eigenvalue search with two independent oracles plus membership
//! verdicts), `nrlimit` (non-relativistic limit tables), and `selftest`
//! (internal consistency battery). Reports are JSON-lines files with
//! optional CSV tables; the format is documented field by field in the
//! repository README.
//!
//! Exit codes: 0 all verdicts pass; 1 a mathematical verdict failed;
//! 2 invalid config or precondition; 3 numerical non-convergence.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{load_config, ResolvedConfig};
use crate::error::{CliError, Result, Verdict};
use crate::report::{Provenance, ReportWriter};

#[derive(Parser)]
#[command(
    name = "halfline-dirac",
    version,
    about = "Eigenvalue enclosures and oracles for half-line Dirac operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Path to the JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for the report files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads for parallel work items (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Factor applied to the integrator tolerance (>1 loosens, <1 tightens).
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form enclosure regions, level-set boundary, gap, and moment verdict.
    Enclosure,
    /// Winding map, zeros from both oracles, agreement and membership verdicts.
    Scan,
    /// Non-relativistic limit: convergence rates, boundary map, reduction ratios.
    Nrlimit,
    /// Internal consistency battery (no config required).
    Selftest,
}

#[derive(Serialize)]
struct FailurePayload {
    note: String,
    exit_code: i32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(v) => {
            if v == Verdict::Failed {
                eprintln!("one or more verdicts failed (see report records)");
            }
            ExitCode::from(u8::try_from(v.exit_code()).unwrap_or(1))
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(2))
        }
    }
}

fn run(cli: &Cli) -> Result<Verdict> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        // A failure here means a pool already exists (tests call run twice);
        // the work still executes on the existing pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let command_name = match cli.command {
        Command::Enclosure => "enclosure",
        Command::Scan => "scan",
        Command::Nrlimit => "nrlimit",
        Command::Selftest => "selftest",
    };

    if matches!(cli.command, Command::Selftest) {
        if !(cli.tol_scale > 0.0 && cli.tol_scale.is_finite()) {
            return Err(CliError::Config(format!(
                "--tol-scale must be finite and positive, got {}",
                cli.tol_scale
            )));
        }
        let provenance = Provenance {
            config_hash: "selftest".into(),
            version: env!("CARGO_PKG_VERSION"),
        };
        let mut writer = ReportWriter::create(
            &cli.out,
            &config::OutputSpec::default(),
            provenance,
            command_name,
            0.0,
            1.0,
        )?;
        let outcome = commands::selftest::run(&mut writer);
        return finish(writer, outcome);
    }

    let Some(path) = cli.config.as_deref() else {
        return Err(CliError::Config(format!(
            "subcommand `{command_name}` requires --config <path>"
        )));
    };
    let rc: ResolvedConfig = load_config(path, cli.tol_scale)?;
    let provenance = Provenance {
        config_hash: rc.config_hash.clone(),
        version: env!("CARGO_PKG_VERSION"),
    };
    let mut writer = ReportWriter::create(
        &cli.out,
        &rc.config.outputs,
        provenance,
        command_name,
        rc.coupling,
        rc.applied_scale,
    )?;
    let outcome = match cli.command {
        Command::Enclosure => commands::enclosure::run(&rc, &mut writer),
        Command::Scan => commands::scan::run(&rc, &mut writer),
        Command::Nrlimit => commands::nrlimit::run(&rc, &mut writer),
        Command::Selftest => unreachable!("handled above"),
    };
    finish(writer, outcome)
}

/// Flushes the report even when the command failed, appending a failure
/// marker so partial results stay interpretable.
fn finish(mut writer: ReportWriter, outcome: Result<Verdict>) -> Result<Verdict> {
    match outcome {
        Ok(v) => {
            writer.finish()?;
            Ok(v)
        }
        Err(e) => {
            let _ = writer.write(
                "note",
                FailurePayload {
                    note: format!("run aborted: {e}"),
                    exit_code: e.exit_code(),
                },
            );
            let _ = writer.finish();
            Err(e)
        }
    }
}
