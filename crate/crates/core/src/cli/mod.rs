//! Command-line front end: `special`, `lemmas`, `decay`, `profile`.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or domain error.

pub mod checks;
pub mod commands;
pub mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
pub use config::{Command, Layers, RunConfig};

/// Environment variable capping the worker thread count.
pub const THREADS_VAR: &str = "LOGDAMP_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "logdamp",
    version,
    about = "Spectral checks for the logarithmically damped wave equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Radial special functions, their bands and the Gamma-ratio identity.
    Special(CommonArgs),
    /// Every invariant suite, one report line each.
    Lemmas(CommonArgs),
    /// Norm decay rates and fitted exponents.
    Decay(CommonArgs),
    /// Residual against the asymptotic profile.
    Profile(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Dimension, or a comma-separated list.
    #[arg(long)]
    pub dim: Option<String>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub t_points: Option<usize>,
    /// Log-spaced grid (default); `--log-grid false` for linear spacing.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub log_grid: Option<bool>,
    /// Check tolerance for `special`, quadrature relative tolerance otherwise.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write CSV or the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Flat `key = value` file; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Extra `key=value` settings (same keys as the config file).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl CommonArgs {
    pub fn layers(&self) -> Result<Layers> {
        let mut overrides = Vec::new();
        for s in &self.set {
            let (k, v) = s.split_once('=').ok_or_else(|| Error::Config {
                field: "set".into(),
                message: format!("expected KEY=VALUE, found `{s}`"),
            })?;
            overrides.push((k.trim().replace('-', "_"), v.trim().to_string()));
        }
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                overrides.push((k.to_string(), v));
            }
        };
        push("dim", self.dim.clone());
        push("t_min", self.t_min.map(|v| v.to_string()));
        push("t_max", self.t_max.map(|v| v.to_string()));
        push("t_points", self.t_points.map(|v| v.to_string()));
        push("log_grid", self.log_grid.map(|v| v.to_string()));
        push("tol", self.tol.map(|v| v.to_string()));
        push("seed", self.seed.map(|v| v.to_string()));
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        Ok(Layers {
            file: self.config.clone(),
            overrides,
        })
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config {
            field: THREADS_VAR.into(),
            message: format!("`{raw}` is not a positive integer"),
        })?;
    // A second initialisation in the same process keeps the first pool.
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
    Ok(())
}

/// Run a parsed command; `Ok(true)` when every check passed.
pub fn run(cli: &Cli) -> Result<bool> {
    configure_threads()?;
    let (command, args) = match &cli.command {
        Sub::Special(a) => (Command::Special, a),
        Sub::Lemmas(a) => (Command::Lemmas, a),
        Sub::Decay(a) => (Command::Decay, a),
        Sub::Profile(a) => (Command::Profile, a),
    };
    let config = RunConfig::resolve(command, &args.layers()?)?;
    match command {
        Command::Special => commands::special(&config),
        Command::Lemmas => commands::lemmas(&config),
        Command::Decay => commands::decay(&config),
        Command::Profile => commands::profile(&config),
    }
}

/// Parse `std::env::args`, run, and map the outcome to an exit code.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
