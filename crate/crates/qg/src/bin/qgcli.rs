//! `qgcli`: reproduce the `I(t, n)` table, run property suites and the acceptance criteria.
//!
//! Exit status: 0 when every check passes, 1 on a failed check (first failure on stderr),
//! 2 on invalid arguments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qg::config::{Command, ConfigError, Format, RunConfig, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "qgcli", version, about = "Quantization on Lie groups: tables, property suites and acceptance")]
struct Cli {
    /// table1, resolution_u1, schur, kn_props, weyl_reality, moyal_fit, sw_props,
    /// bohr_props, berezin_u1, theta or acceptance.
    #[arg(long)]
    cmd: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; table1 defaults to csv, everything else to json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Replaces the suite's primary tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Fixed quadrature size (table1: Gauss-Legendre nodes per half window; schur: radial nodes).
    #[arg(long)]
    quad_degree: Option<usize>,
    /// Largest spin for sw_props (half-integers allowed).
    #[arg(long)]
    j: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    n: Option<i64>,
    /// Comma-separated ε values for moyal_fit.
    #[arg(long, value_delimiter = ',')]
    eps_list: Option<Vec<f64>>,
}

fn config(cli: Cli) -> Result<RunConfig, ConfigError> {
    let cmd = Command::parse(&cli.cmd)?;
    let mut cfg = RunConfig::new(cmd);
    if let Some(f) = cli.format {
        cfg.format = match f.as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(ConfigError(format!("unknown format {other:?}"))),
        };
    }
    cfg.out = cli.out;
    cfg.seed = cli.seed;
    cfg.tol = cli.tol;
    cfg.quad_degree = cli.quad_degree;
    cfg.j = cli.j;
    cfg.t = cli.t;
    cfg.n = cli.n;
    cfg.eps_list = cli.eps_list;
    cfg.threads = RunConfig::threads_from_env()?;
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cfg = match config(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qgcli: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("qgcli: {e}");
            return ExitCode::from(2);
        }
    }
    let report = qg::suites::run(&cfg);
    let text = match cfg.format {
        Format::Json => report.to_json_string(),
        Format::Csv => report.to_csv_string(),
    };
    let written = match &cfg.out {
        Some(p) => std::fs::write(p, &text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("qgcli: {e}");
        return ExitCode::from(2);
    }
    match report.first_failure() {
        None => ExitCode::SUCCESS,
        Some(f) => {
            eprintln!("qgcli: {}: FAIL {f}", report.cmd);
            ExitCode::from(1)
        }
    }
}
