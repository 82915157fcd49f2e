//! Run configuration shared by the CLI and the acceptance harness.

use std::fmt;
use std::path::PathBuf;

/// Default seed for the randomized suites.
pub const DEFAULT_SEED: u64 = 20_160_419;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Table1,
    ResolutionU1,
    Schur,
    KnProps,
    WeylReality,
    MoyalFit,
    SwProps,
    BohrProps,
    BerezinU1,
    Theta,
    Acceptance,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::Table1,
        Command::ResolutionU1,
        Command::Schur,
        Command::KnProps,
        Command::WeylReality,
        Command::MoyalFit,
        Command::SwProps,
        Command::BohrProps,
        Command::BerezinU1,
        Command::Theta,
        Command::Acceptance,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Table1 => "table1",
            Command::ResolutionU1 => "resolution_u1",
            Command::Schur => "schur",
            Command::KnProps => "kn_props",
            Command::WeylReality => "weyl_reality",
            Command::MoyalFit => "moyal_fit",
            Command::SwProps => "sw_props",
            Command::BohrProps => "bohr_props",
            Command::BerezinU1 => "berezin_u1",
            Command::Theta => "theta",
            Command::Acceptance => "acceptance",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        Self::ALL.iter().find(|c| c.name() == s).cloned().ok_or_else(|| ConfigError(format!("unknown command {s:?}")))
    }

    /// Table-shaped commands default to CSV, reports to JSON.
    pub fn default_format(&self) -> Format {
        match self {
            Command::Table1 => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Everything a suite reads. `None` fields select the suite's defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub cmd: Command,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    /// Replaces the suite's primary tolerance.
    pub tol: Option<f64>,
    /// Fixed quadrature size where a suite supports one (table1: Gauss-Legendre nodes per
    /// half window; Schur: radial nodes).
    pub quad_degree: Option<usize>,
    /// Largest spin `j` (half-integers allowed).
    pub j: Option<f64>,
    pub t: Option<f64>,
    pub n: Option<i64>,
    pub eps_list: Option<Vec<f64>>,
    /// Thread cap, `QG_THREADS` when set.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(cmd: Command) -> Self {
        Self {
            format: cmd.default_format(),
            cmd,
            out: None,
            seed: DEFAULT_SEED,
            tol: None,
            quad_degree: None,
            j: None,
            t: None,
            n: None,
            eps_list: None,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(t) = self.tol {
            if !(t > 0.0) || !t.is_finite() {
                return Err(ConfigError(format!("tolerance must be positive, got {t}")));
            }
        }
        if let Some(t) = self.t {
            if !(t > 0.0) || !t.is_finite() {
                return Err(ConfigError(format!("heat time must be positive, got {t}")));
            }
        }
        if let Some(n) = self.n {
            if n < 1 {
                return Err(ConfigError(format!("n must be at least 1, got {n}")));
            }
        }
        if let Some(j) = self.j {
            let two_j = 2.0 * j;
            if !(j > 0.0) || (two_j - two_j.round()).abs() > 1e-12 {
                return Err(ConfigError(format!("j must be a positive half-integer, got {j}")));
            }
        }
        if let Some(q) = self.quad_degree {
            if q == 0 {
                return Err(ConfigError("quadrature degree must be positive".into()));
            }
        }
        if let Some(e) = &self.eps_list {
            if e.len() < 3 || e.iter().any(|x| !(*x > 0.0)) {
                return Err(ConfigError("eps list needs at least 3 positive values".into()));
            }
        }
        if self.threads == Some(0) {
            return Err(ConfigError("QG_THREADS must be positive".into()));
        }
        Ok(())
    }

    /// `tol` override or the suite default.
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    /// `2j` from `--j`, or the default.
    pub fn two_j_or(&self, default: i64) -> i64 {
        self.j.map_or(default, |j| (2.0 * j).round() as i64)
    }

    /// Reads `QG_THREADS`.
    pub fn threads_from_env() -> Result<Option<usize>, ConfigError> {
        match std::env::var("QG_THREADS") {
            Ok(s) => s
                .trim()
                .parse::<usize>()
                .map(Some)
                .map_err(|_| ConfigError(format!("QG_THREADS must be a positive integer, got {s:?}"))),
            Err(_) => Ok(None),
        }
    }
}
