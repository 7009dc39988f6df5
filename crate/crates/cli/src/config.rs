//! Run configuration: a single JSON document describing the physical
//! parameters, the boundary condition, the potential, and per-subcommand
//! sections. Field names and structure are documented in the repository
//! README.

use std::path::Path;

use halfline_dirac::evans::{ScanRegion, DEFAULT_ODE_RTOL};
use halfline_dirac::mat2::Mat2;
use halfline_dirac::potential::{Potential, PotentialTerm, ProfileShape};
use halfline_dirac::resolvent::BoundaryCondition;
use halfline_dirac::spectral::PhysicalParams;
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Complex number written either as a bare real number or as `{re, im}`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Parts {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl ComplexSpec {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexSpec::Real(re) => Complex64::new(re, 0.0),
            ComplexSpec::Parts { re, im } => Complex64::new(re, im),
        }
    }
}

/// Support profile of one potential term.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Step { start: f64, end: f64 },
    TruncatedGaussian { center: f64, width: f64, cutoff: f64 },
    Bump { start: f64, end: f64 },
}

impl ProfileSpec {
    fn shape(self) -> ProfileShape {
        match self {
            ProfileSpec::Step { start, end } => ProfileShape::Step { start, end },
            ProfileSpec::TruncatedGaussian { center, width, cutoff } => {
                ProfileShape::TruncatedGaussian { center, width, cutoff }
            }
            ProfileSpec::Bump { start, end } => ProfileShape::Bump { start, end },
        }
    }
}

/// Matrix part of one term: scalar multiple of the identity or a general
/// 2x2 complex matrix in row-major order.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixSpec {
    Scalar(ComplexSpec),
    Entries([[ComplexSpec; 2]; 2]),
}

impl MatrixSpec {
    fn matrix(self) -> Mat2 {
        match self {
            MatrixSpec::Scalar(a) => Mat2::identity().scale(a.value()),
            MatrixSpec::Entries(rows) => Mat2::new(
                rows[0][0].value(),
                rows[0][1].value(),
                rows[1][0].value(),
                rows[1][1].value(),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub profile: ProfileSpec,
    pub matrix: MatrixSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub terms: Vec<TermSpec>,
    /// When set, the potential is rescaled so that `v = |V|_1 / c` equals
    /// this value exactly.
    #[serde(default)]
    pub coupling: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub mass: f64,
    pub light_speed: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    /// Real interval `[lo, hi]` of the rectangle.
    pub re: [f64; 2],
    /// Imaginary interval `[lo, hi]` of the rectangle.
    pub im: [f64; 2],
    /// Winding-map resolution `[nx, ny]`; `[0, 0]` skips the map.
    #[serde(default)]
    pub grid: [usize; 2],
    /// Override of the default margin kept from the essential spectrum.
    #[serde(default)]
    pub spectrum_margin: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NrLimitSpec {
    /// Spectral parameter of the resolvent-convergence table.
    pub z: ComplexSpec,
    /// Speeds of light; a doubling sequence activates the ratio verdict.
    pub c_list: Vec<f64>,
    /// Branch shifts to tabulate: subset of `["plus", "minus"]`.
    #[serde(default = "default_shifts")]
    pub shifts: Vec<String>,
    /// Spatial sample grid `0, step, 2*step, ..., <= max` for the kernels.
    #[serde(default = "default_grid_max")]
    pub grid_max: f64,
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    /// Ray angles (radians, in `(0, pi)`) for the gap-edge reduction table.
    #[serde(default = "default_thetas")]
    pub reduction_thetas: Vec<f64>,
    /// Distances `|z - mc^2|` along each ray, largest first.
    #[serde(default = "default_magnitudes")]
    pub reduction_magnitudes: Vec<f64>,
}

fn default_shifts() -> Vec<String> {
    vec!["plus".into(), "minus".into()]
}
fn default_grid_max() -> f64 {
    2.7
}
fn default_grid_step() -> f64 {
    0.3
}
fn default_thetas() -> Vec<f64> {
    vec![1.1, 2.0, 2.9]
}
fn default_magnitudes() -> Vec<f64> {
    (1..=8).map(|k| 10f64.powi(-k)).collect()
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TolSpec {
    /// Relative tolerance of the shooting integrator (default 1e-10).
    #[serde(default)]
    pub ode_rtol: Option<f64>,
    /// Node count of the composite discretization rule (default 48).
    #[serde(default)]
    pub bs_nodes: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// JSON-lines report file, relative to `--out`.
    #[serde(default = "default_jsonl")]
    pub jsonl: String,
    /// Also write the CSV tables next to the report.
    #[serde(default)]
    pub csv: bool,
}

fn default_jsonl() -> String {
    "records.jsonl".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            jsonl: default_jsonl(),
            csv: false,
        }
    }
}

/// Self-test hook: deliberately corrupts the derived enclosure radii before
/// the membership verdict so the exit-1 path can be exercised end to end.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultSpec {
    /// Factor multiplied onto every derived disk radius (use < 1).
    pub shrink_derived_radius: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsSpec,
    /// Boundary angle `alpha` in `[0, pi/2]`.
    pub alpha: f64,
    pub potential: PotentialSpec,
    #[serde(default)]
    pub scan: Option<ScanSpec>,
    #[serde(default)]
    pub nrlimit: Option<NrLimitSpec>,
    #[serde(default)]
    pub tolerances: TolSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default)]
    pub fault_injection: Option<FaultSpec>,
}

/// Everything a subcommand needs, validated and converted to library types.
pub struct ResolvedConfig {
    pub config: RunConfig,
    pub params: PhysicalParams,
    pub bc: BoundaryCondition,
    pub potential: Potential,
    /// Effective coupling `v = |V|_1 / c` of the (possibly rescaled)
    /// potential.
    pub coupling: f64,
    /// Scale factor applied to reach the requested coupling (1 when the
    /// `coupling` field is absent).
    pub applied_scale: f64,
    /// FNV-1a hash of the raw config document.
    pub config_hash: String,
    pub ode_rtol: f64,
    pub bs_nodes: usize,
}

/// 64-bit FNV-1a over the raw bytes of the config document.
pub fn fnv1a_hash(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    format!("{h:016x}")
}

pub fn load_config(path: &Path, tol_scale: f64) -> Result<ResolvedConfig> {
    let raw = std::fs::read(path).map_err(|e| {
        CliError::Config(format!("cannot read config {}: {e}", path.display()))
    })?;
    let config: RunConfig = serde_json::from_slice(&raw).map_err(|e| {
        CliError::Config(format!(
            "config {} is not valid (line {}, column {}): {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    resolve(config, &raw, tol_scale)
}

pub fn resolve(config: RunConfig, raw: &[u8], tol_scale: f64) -> Result<ResolvedConfig> {
    if !(tol_scale > 0.0 && tol_scale.is_finite()) {
        return Err(CliError::Config(format!(
            "--tol-scale must be finite and positive, got {tol_scale}"
        )));
    }
    let params = PhysicalParams::new(config.params.mass, config.params.light_speed)
        .map_err(|e| CliError::Config(format!("params: {e}")))?;
    let bc = BoundaryCondition::new(config.alpha)
        .map_err(|e| CliError::Config(format!("alpha: {e}")))?;
    if config.potential.terms.is_empty() {
        return Err(CliError::Config(
            "potential.terms: at least one term is required (use a zero matrix for V = 0)"
                .into(),
        ));
    }
    let terms: Vec<PotentialTerm> = config
        .potential
        .terms
        .iter()
        .map(|t| PotentialTerm {
            shape: t.profile.shape(),
            matrix: t.matrix.matrix(),
        })
        .collect();
    let base = Potential::new(terms)
        .map_err(|e| CliError::Config(format!("potential.terms: {e}")))?;
    let (potential, applied_scale) = match config.potential.coupling {
        Some(v) => {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!(
                    "potential.coupling must be finite and >= 0, got {v}"
                )));
            }
            base.scale_to_coupling(v, params.c)
                .map_err(|e| CliError::Config(format!("potential.coupling: {e}")))?
        }
        None => (base, 1.0),
    };
    let coupling = potential.coupling(params.c);
    if let Some(t) = config.tolerances.ode_rtol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!(
                "tolerances.ode_rtol must be finite and positive, got {t}"
            )));
        }
    }
    if let Some(n) = config.tolerances.bs_nodes {
        if n < 4 {
            return Err(CliError::Config(format!(
                "tolerances.bs_nodes must be at least 4, got {n}"
            )));
        }
    }
    let ode_rtol = config.tolerances.ode_rtol.unwrap_or(DEFAULT_ODE_RTOL) * tol_scale;
    let bs_nodes = config.tolerances.bs_nodes.unwrap_or(48);
    Ok(ResolvedConfig {
        config_hash: fnv1a_hash(raw),
        params,
        bc,
        potential,
        coupling,
        applied_scale,
        ode_rtol,
        bs_nodes,
        config,
    })
}

impl ResolvedConfig {
    /// Scan region from the `scan` section (precondition: section present).
    pub fn scan_region(&self) -> Result<ScanRegion> {
        let spec = self.scan_spec()?;
        let re = (spec.re[0], spec.re[1]);
        let im = (spec.im[0], spec.im[1]);
        let built = match spec.spectrum_margin {
            Some(m) => ScanRegion::with_margin(re, im, m, self.params),
            None => ScanRegion::new(re, im, self.params),
        };
        built.map_err(|e| CliError::Config(format!("scan region: {e}")))
    }

    pub fn scan_spec(&self) -> Result<&ScanSpec> {
        self.config
            .scan
            .as_ref()
            .ok_or_else(|| CliError::Config("config has no `scan` section".into()))
    }

    pub fn nrlimit_spec(&self) -> Result<&NrLimitSpec> {
        self.config
            .nrlimit
            .as_ref()
            .ok_or_else(|| CliError::Config("config has no `nrlimit` section".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_and_resolves() {
        let raw = br#"{
            "params": {"mass": 1.0, "light_speed": 1.0},
            "alpha": 0.0,
            "potential": {
                "terms": [{
                    "profile": {"kind": "step", "start": 0.0, "end": 6.0},
                    "matrix": {"scalar": -1.0}
                }],
                "coupling": 0.5
            }
        }"#;
        let config: RunConfig = serde_json::from_slice(raw).unwrap();
        let rc = resolve(config, raw, 1.0).unwrap();
        assert!((rc.coupling - 0.5).abs() < 1e-12);
        assert!((rc.applied_scale - 0.5 / 6.0).abs() < 1e-12);
        assert_eq!(rc.bs_nodes, 48);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let raw = br#"{
            "params": {"mass": 1.0, "light_speed": 1.0, "spin": 2},
            "alpha": 0.0,
            "potential": {"terms": []}
        }"#;
        let err = serde_json::from_slice::<RunConfig>(raw).unwrap_err();
        assert!(err.to_string().contains("spin"));
    }

    #[test]
    fn matrix_entries_and_complex_forms() {
        let raw = br#"{
            "params": {"mass": 1.0, "light_speed": 2.0},
            "alpha": 0.7,
            "potential": {
                "terms": [{
                    "profile": {"kind": "bump", "start": 0.5, "end": 5.5},
                    "matrix": {"entries": [[{"re": -0.3}, {"re": 0.5, "im": 0.2}],
                                            [0.0, -0.4]]}
                }]
            }
        }"#;
        let config: RunConfig = serde_json::from_slice(raw).unwrap();
        let rc = resolve(config, raw, 1.0).unwrap();
        assert!(rc.coupling > 0.0);
        assert_eq!(rc.applied_scale, 1.0);
    }

    #[test]
    fn bad_alpha_is_a_config_error() {
        let raw = br#"{
            "params": {"mass": 1.0, "light_speed": 1.0},
            "alpha": 3.0,
            "potential": {
                "terms": [{
                    "profile": {"kind": "step", "start": 0.0, "end": 1.0},
                    "matrix": {"scalar": 1.0}
                }]
            }
        }"#;
        let config: RunConfig = serde_json::from_slice(raw).unwrap();
        match resolve(config, raw, 1.0) {
            Err(CliError::Config(msg)) => assert!(msg.contains("alpha")),
            Err(other) => panic!("expected config error, got {other}"),
            Ok(_) => panic!("expected config error, got success"),
        }
    }

    #[test]
    fn fnv_hash_is_stable() {
        assert_eq!(fnv1a_hash(b""), "cbf29ce484222325");
        assert_eq!(fnv1a_hash(b"a"), "af63dc4c8601ec8c");
    }
}
