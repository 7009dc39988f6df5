//! Error and exit-code contract of the command-line driver.
//!
//! - exit 0: every mathematical verdict passed;
//! - exit 1: computations succeeded but a verdict failed (the offending
//!   records carry the failure);
//! - exit 2: invalid configuration or violated precondition, detected before
//!   any numerics ran;
//! - exit 3: the numerics themselves failed to converge or degenerated.

use halfline_dirac::SpectralError;

#[derive(Debug)]
pub enum CliError {
    /// Invalid config or precondition (exit 2).
    Config(String),
    /// Numerical failure during computation (exit 3).
    Numerics(SpectralError),
    /// Filesystem problem with configured paths (exit 2).
    Io(std::io::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerics(_) => 3,
            CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numerics(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Wraps a library error raised while computing (not while validating).
pub fn numerics(e: SpectralError) -> CliError {
    CliError::Numerics(e)
}

/// Outcome of a subcommand whose computations all succeeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Failed,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Failed => 1,
        }
    }

    pub fn and(self, other: Verdict) -> Verdict {
        if self == Verdict::Pass && other == Verdict::Pass {
            Verdict::Pass
        } else {
            Verdict::Failed
        }
    }
}
