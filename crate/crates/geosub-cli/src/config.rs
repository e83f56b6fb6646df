//! Run configuration: built-in defaults, then a JSON config file, then
//! `GEOSUB_*` environment variables, then command-line flags, each layer
//! overriding the one below.
//!
//! The merged configuration is what every command consumes, and it is
//! what gets echoed next to file output — reloading an echoed config
//! through `--config` reproduces the run exactly.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use geosub::gcp::GcpParams;
use geosub::gscpp::JumpLaw;
use geosub::gspp::GsppParams;
use geosub::spp::SppParams;
use geosub::{SeriesControl, SubordinatorSpec};

use crate::error::CliError;

/// Process a command operates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Process {
    /// Geometric counting process.
    Gcp,
    /// Subordinated Poisson process.
    Spp,
    /// Geometric-clock subordinated Poisson process.
    Gspp,
    /// Compound variant (additive jumps).
    Gscpp,
    /// Multiplicative variant (positive factors).
    Gsmpp,
}

impl Process {
    pub fn name(self) -> &'static str {
        match self {
            Process::Gcp => "gcp",
            Process::Spp => "spp",
            Process::Gspp => "gspp",
            Process::Gscpp => "gscpp",
            Process::Gsmpp => "gsmpp",
        }
    }
}

/// Output encoding.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default,
)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// Comma-separated values with a mandatory header row.
    #[default]
    Csv,
    /// One JSON object with the merged config and typed rows.
    Json,
}

/// Command-line flags; every one can also come from a `GEOSUB_*`
/// environment variable, and flags beat the environment.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// JSON configuration file; environment variables and flags override it
    #[arg(long, global = true, env = "GEOSUB_CONFIG", value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Process to operate on
    #[arg(long, global = true, env = "GEOSUB_PROCESS", value_enum)]
    pub process: Option<Process>,

    /// Subordinator family: stable or tempered_stable (others need the config file)
    #[arg(long, global = true, env = "GEOSUB_FAMILY")]
    pub family: Option<String>,

    /// Stability index in (0, 1)
    #[arg(long, global = true, env = "GEOSUB_ALPHA", allow_negative_numbers = true)]
    pub alpha: Option<f64>,

    /// Tempering parameter, positive
    #[arg(long, global = true, env = "GEOSUB_NU", allow_negative_numbers = true)]
    pub nu: Option<f64>,

    /// Poisson rate of the inner process
    #[arg(long, global = true, env = "GEOSUB_LAMBDA", allow_negative_numbers = true)]
    pub lambda: Option<f64>,

    /// Mean of the geometric clock's exponential rate
    #[arg(long, global = true, env = "GEOSUB_MU", allow_negative_numbers = true)]
    pub mu: Option<f64>,

    /// Evaluation time
    #[arg(long, global = true, env = "GEOSUB_T", allow_negative_numbers = true)]
    pub t: Option<f64>,

    /// Comma-separated evaluation times (overrides --t where a grid applies)
    #[arg(
        long = "t-grid",
        global = true,
        env = "GEOSUB_T_GRID",
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub t_grid: Option<Vec<f64>>,

    /// Largest count in pmf tables
    #[arg(long = "k-max", global = true, env = "GEOSUB_K_MAX")]
    pub k_max: Option<u64>,

    /// Per-shock survival probability (extreme shock model)
    #[arg(long, global = true, env = "GEOSUB_Q", allow_negative_numbers = true)]
    pub q: Option<f64>,

    /// Damage threshold (cumulative shock model)
    #[arg(long, global = true, env = "GEOSUB_THRESHOLD")]
    pub threshold: Option<u64>,

    /// JSON file holding the jump or factor law
    #[arg(long, global = true, env = "GEOSUB_JUMPS", value_name = "PATH")]
    pub jumps: Option<PathBuf>,

    /// Number of Monte Carlo draws
    #[arg(long, global = true, env = "GEOSUB_N")]
    pub n: Option<u64>,

    /// Master seed for all randomness
    #[arg(long, global = true, env = "GEOSUB_SEED")]
    pub seed: Option<u64>,

    /// Output file (sweep: output directory); stdout when absent
    #[arg(long, global = true, env = "GEOSUB_OUT", value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, env = "GEOSUB_FORMAT", value_enum)]
    pub format: Option<OutputFormat>,

    /// Absolute series tolerance
    #[arg(long, global = true, env = "GEOSUB_TOL", allow_negative_numbers = true)]
    pub tol: Option<f64>,

    /// Series term budget
    #[arg(long = "max-terms", global = true, env = "GEOSUB_MAX_TERMS")]
    pub max_terms: Option<usize>,
}

/// The fully merged run configuration.
///
/// Every field is optional so layering stays uniform; the accessors
/// below carry the defaults and turn missing required fields into
/// actionable usage errors.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub process: Option<Process>,
    pub subordinator: Option<SubordinatorSpec>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub t: Option<f64>,
    pub t_grid: Option<Vec<f64>>,
    pub k_max: Option<u64>,
    pub q: Option<f64>,
    pub threshold: Option<u64>,
    pub jumps: Option<JumpLaw>,
    pub n: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub tol: Option<f64>,
    pub max_terms: Option<usize>,
}

impl RunConfig {
    /// Loads the config file (when given) and applies the flag and
    /// environment overrides on top.
    pub fn load(o: &Overrides) -> Result<RunConfig, CliError> {
        let mut cfg = match &o.config {
            Some(path) => read_json::<RunConfig>(path, "config file")?,
            None => RunConfig::default(),
        };
        cfg.subordinator = resolve_subordinator(cfg.subordinator.take(), o)?;
        if let Some(path) = &o.jumps {
            cfg.jumps = Some(read_json::<JumpLaw>(path, "jump law file")?);
        }

        macro_rules! overlay {
            ($($field:ident),*) => { $( if o.$field.is_some() { cfg.$field = o.$field.clone(); } )* };
        }
        overlay!(
            process, lambda, mu, t, t_grid, k_max, q, threshold, n, seed, out, format, tol,
            max_terms
        );
        Ok(cfg)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn format(&self) -> OutputFormat {
        self.format.unwrap_or_default()
    }

    /// Monte Carlo draw count (simulate, validate, sweep bands).
    pub fn n(&self) -> u64 {
        self.n.unwrap_or(10_000)
    }

    pub fn k_max(&self) -> usize {
        self.k_max.unwrap_or(20) as usize
    }

    pub fn series_control(&self) -> SeriesControl {
        SeriesControl {
            abs_tol: self.tol.unwrap_or(1e-12),
            max_terms: self.max_terms.unwrap_or(10_000),
            ..SeriesControl::default()
        }
    }

    pub fn require_process(&self) -> Result<Process, CliError> {
        self.process
            .ok_or_else(|| CliError::usage("pass --process {gcp|spp|gspp|gscpp|gsmpp}"))
    }

    pub fn require_t(&self) -> Result<f64, CliError> {
        self.t
            .ok_or_else(|| CliError::usage("pass --t <time>"))
    }

    /// The evaluation grid: `--t-grid` when present, else `--t` as a
    /// one-point grid.
    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        match (&self.t_grid, self.t) {
            (Some(grid), _) if !grid.is_empty() => Ok(grid.clone()),
            (_, Some(t)) => Ok(vec![t]),
            _ => Err(CliError::usage("pass --t <time> or --t-grid <t1,t2,...>")),
        }
    }

    pub fn require_lambda(&self) -> Result<f64, CliError> {
        self.lambda
            .ok_or_else(|| CliError::usage("pass --lambda <rate>"))
    }

    pub fn require_mu(&self) -> Result<f64, CliError> {
        self.mu
            .ok_or_else(|| CliError::usage("pass --mu <clock mean>"))
    }

    pub fn require_subordinator(&self) -> Result<&SubordinatorSpec, CliError> {
        self.subordinator.as_ref().ok_or_else(|| {
            CliError::usage(
                "pass --family stable --alpha <a> (or --family tempered_stable --alpha <a> \
                 --nu <v>), or put a subordinator object in the config file",
            )
        })
    }

    pub fn require_jumps(&self) -> Result<&JumpLaw, CliError> {
        self.jumps
            .as_ref()
            .ok_or_else(|| CliError::usage("pass --jumps <path to a jump-law JSON file>"))
    }

    pub fn gcp_params(&self) -> Result<GcpParams, CliError> {
        let p = GcpParams {
            mu: self.require_mu()?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn spp_params(&self) -> Result<SppParams, CliError> {
        let p = SppParams {
            lambda: self.require_lambda()?,
            sub: self.require_subordinator()?.clone(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn gspp_params(&self) -> Result<GsppParams, CliError> {
        let p = GsppParams {
            spp: self.spp_params()?,
            gcp: self.gcp_params()?,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Builds the subordinator from `--family`/`--alpha`/`--nu`, or patches
/// the config file's spec when only the scalars are given.
fn resolve_subordinator(
    from_file: Option<SubordinatorSpec>,
    o: &Overrides,
) -> Result<Option<SubordinatorSpec>, CliError> {
    match o.family.as_deref() {
        Some("stable") => {
            let alpha = o
                .alpha
                .ok_or_else(|| CliError::usage("--family stable needs --alpha"))?;
            Ok(Some(SubordinatorSpec::Stable { alpha }))
        }
        Some("tempered_stable") => {
            let alpha = o
                .alpha
                .ok_or_else(|| CliError::usage("--family tempered_stable needs --alpha"))?;
            let nu = o
                .nu
                .ok_or_else(|| CliError::usage("--family tempered_stable needs --nu"))?;
            Ok(Some(SubordinatorSpec::TemperedStable { alpha, nu }))
        }
        Some(other @ ("gamma" | "inverse_gaussian" | "mixed_stable" | "mixed_tempered")) => {
            Err(CliError::usage(format!(
                "family {other} has parameters beyond --alpha/--nu; configure it as a \
                 subordinator object in the config file"
            )))
        }
        Some(other) => Err(CliError::usage(format!(
            "unknown family {other}; expected stable, tempered_stable, gamma, \
             inverse_gaussian, mixed_stable or mixed_tempered"
        ))),
        None => match (from_file, o.alpha, o.nu) {
            // Scalar flags patch a flag-shaped spec from the file.
            (Some(SubordinatorSpec::Stable { alpha }), fa, None) => {
                Ok(Some(SubordinatorSpec::Stable {
                    alpha: fa.unwrap_or(alpha),
                }))
            }
            (Some(SubordinatorSpec::TemperedStable { alpha, nu }), fa, fnu) => {
                Ok(Some(SubordinatorSpec::TemperedStable {
                    alpha: fa.unwrap_or(alpha),
                    nu: fnu.unwrap_or(nu),
                }))
            }
            (spec @ Some(_), None, None) => Ok(spec),
            (Some(spec), _, _) => Err(CliError::usage(format!(
                "--alpha/--nu do not apply to the configured {} family",
                family_name(&spec)
            ))),
            (None, None, None) => Ok(None),
            (None, _, _) => Err(CliError::usage(
                "--alpha/--nu need --family (or a subordinator in the config file)",
            )),
        },
    }
}

fn family_name(spec: &SubordinatorSpec) -> &'static str {
    match spec {
        SubordinatorSpec::Stable { .. } => "stable",
        SubordinatorSpec::TemperedStable { .. } => "tempered_stable",
        SubordinatorSpec::Gamma { .. } => "gamma",
        SubordinatorSpec::InverseGaussian { .. } => "inverse_gaussian",
        SubordinatorSpec::MixedStable { .. } => "mixed_stable",
        SubordinatorSpec::MixedTempered { .. } => "mixed_tempered",
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading {what} {}", path.display()), e))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::usage(format!("parsing {what} {}: {e}", path.display()))
    })
}
