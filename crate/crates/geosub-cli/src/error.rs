//! CLI failure type: every error maps to a stable exit code and is
//! printed as a machine-readable JSON object on stderr.

use std::fmt;

/// What went wrong, bucketed by exit code.
///
/// * 2 — usage: flags, config file and subcommand are inconsistent;
/// * 3 — domain: a parameter is outside its mathematical domain;
/// * 4 — validity: parameters left a closed form's validity region;
/// * 5 — convergence: a series or sampler failed to converge;
/// * 6 — io: reading or writing a file failed;
/// * 7 — validation: the Monte Carlo battery reported failing checks.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(geosub::Error),
    Io(String),
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }

    /// Process exit code for this failure.
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(e) => match e {
                geosub::Error::Domain(_)
                | geosub::Error::Range { .. }
                | geosub::Error::NonFiniteMoment(_) => 3,
                geosub::Error::ValidityRegion { .. } => 4,
                geosub::Error::Convergence { .. }
                | geosub::Error::SeriesOverflow { .. }
                | geosub::Error::SamplerDegenerate(_) => 5,
            },
            CliError::Io(_) => 6,
            CliError::ChecksFailed { .. } => 7,
        }
    }

    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self.code() {
            2 => "usage",
            3 => "domain",
            4 => "validity",
            5 => "convergence",
            6 => "io",
            _ => "validation",
        }
    }

    /// Writes the error as one JSON object on stderr.
    pub fn emit(&self) {
        let body = serde_json::json!({
            "error": { "code": self.code(), "kind": self.kind(), "message": self.to_string() }
        });
        eprintln!("{body}");
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Io(msg) => f.write_str(msg),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::ChecksFailed { failed, total } => {
                write!(f, "{failed} of {total} validation checks failed")
            }
        }
    }
}

impl From<geosub::Error> for CliError {
    fn from(e: geosub::Error) -> Self {
        CliError::Lib(e)
    }
}
