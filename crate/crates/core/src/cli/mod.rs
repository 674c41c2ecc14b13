//! Experiment commands: `check`, `stationary`, `simulate`, `sweep`, `oracles`.
//!
//! Every command reads a [`RunConfig`] (defaults, optional JSON file, then
//! `--param KEY=VALUE` overrides), writes CSV/JSON into the output
//! directory and maps failures to exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | oracle failure |
//! | 2 | configuration or validation error |
//! | 3 | runtime collapse of a simulation |
//!
//! On failure a JSON object `{command, kind, message, exit_code}` goes to
//! stderr and to `error.json` in the output directory.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::model::ModelError;
use crate::stationary::StationaryError;
use crate::timedep::{TimeDepError, TransformForm};

pub use commands::{run_command, SimSummary, SweepRow};
pub use config::{CommandKind, InitKind, InitSpec, Numerics, OracleSettings, RunConfig, SweepSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Params(#[from] ModelError),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Stationary(#[from] StationaryError),
    #[error(transparent)]
    TimeDep(#[from] TimeDepError),
    #[error("oracles failed: {}", .0.join(", "))]
    OracleFailure(Vec<String>),
    #[error("every sweep row failed")]
    SweepFailed,
}

impl CliError {
    /// Machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "InvalidConfig",
            CliError::Params(ModelError::InvalidParams { .. }) => "InvalidParams",
            CliError::Params(ModelError::NoSignChange { .. }) => "NoSignChange",
            CliError::Io(_) => "Io",
            CliError::Stationary(e) => match e {
                StationaryError::InvalidRadius(_) => "InvalidRadius",
                StationaryError::SeedFailure(_) => "SeedFailure",
                StationaryError::StepFailure(_) => "StepFailure",
                StationaryError::BracketFailure { .. } => "BracketFailure",
                StationaryError::NotStationary { .. } => "NotStationary",
            },
            CliError::TimeDep(e) => match e {
                TimeDepError::StepTooLarge { .. } => "StepTooLarge",
                TimeDepError::RadiusCollapse { .. } => "RadiusCollapse",
                TimeDepError::InvalidInitialData(_) => "InvalidInitialData",
                TimeDepError::InvalidOptions(_) => "InvalidOptions",
                TimeDepError::InvariantViolated { .. } => "InvariantViolated",
            },
            CliError::OracleFailure(_) => "OracleFailure",
            CliError::SweepFailed => "SweepFailed",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::OracleFailure(_) => 1,
            CliError::TimeDep(
                TimeDepError::RadiusCollapse { .. }
                | TimeDepError::InvariantViolated { .. }
                | TimeDepError::StepTooLarge { .. },
            ) => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "radial-tumor", version, about = "Stationary and time-dependent radial tumor experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration; missing fields take defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Seed for randomized initial perturbations (overrides `init.seed`).
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Use the σ-equation stretching coefficient `R'/(cR)`.
    #[arg(long, global = true)]
    pub paper_verbatim_transform: bool,
    /// Dotted-path override such as `mu=3` or `numerics.T=10`; repeatable.
    #[arg(long = "param", global = true, value_name = "KEY=VALUE")]
    pub params: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Validate parameters and report structural conditions.
    Check,
    /// Compute R* and the stationary profiles.
    Stationary,
    /// Run the time-dependent problem against the stationary reference.
    Simulate,
    /// Repeat stationary (and simulation) runs over one parameter.
    Sweep,
    /// Run the singular IVP oracle suite.
    Oracles,
}

impl From<Command> for CommandKind {
    fn from(c: Command) -> Self {
        match c {
            Command::Check => CommandKind::Check,
            Command::Stationary => CommandKind::Stationary,
            Command::Simulate => CommandKind::Simulate,
            Command::Sweep => CommandKind::Sweep,
            Command::Oracles => CommandKind::Oracles,
        }
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    command: &'a str,
    kind: &'a str,
    message: String,
    exit_code: i32,
}

/// Resolves the configuration implied by the flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut overrides = cli.params.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("init.seed={seed}"));
    }
    let mut cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
    cfg.command = Some(cli.command.into());
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if cli.paper_verbatim_transform {
        cfg.numerics.transform = TransformForm::PaperVerbatim;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report_error(command: CommandKind, out_dir: &Path, err: &CliError) {
    let report = ErrorReport {
        command: command.name(),
        kind: err.kind(),
        message: err.to_string(),
        exit_code: err.exit_code(),
    };
    let text = serde_json::to_string_pretty(&report).expect("plain data serializes");
    eprintln!("{text}");
    if std::fs::create_dir_all(out_dir).is_ok() {
        let _ = std::fs::write(out_dir.join("error.json"), text + "\n");
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> i32 {
    let command: CommandKind = cli.command.into();
    let fallback_out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let cfg = match resolve_config(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            report_error(command, &fallback_out, &e);
            return e.exit_code();
        }
    };
    match run_command(command, &cfg, cli.jobs) {
        Ok(()) => 0,
        Err(e) => {
            report_error(command, &cfg.output_dir, &e);
            e.exit_code()
        }
    }
}
