//! `qsbc` — batch experiment runner for the qubit-string bit-commitment
//! laboratory.
//!
//! Four subcommands sweep a parameter grid and emit one machine-readable
//! report (JSON or CSV):
//!
//! * `conceal` — closed-form indistinguishability bounds against
//!   brute-force trace distances and simulated optimal discrimination.
//! * `run` — honest sessions and the one-bit-flip cheat, with acceptance
//!   rates and a sample transcript per grid point.
//! * `attack` — the entanglement attack: cheating-rotation fidelity
//!   against its analytic floor, simulated success, and resource counts.
//! * `ecc` — derived-code parameters, guessing probabilities, and binding
//!   verdicts for a base-code file.
//!
//! Reports embed the configuration, the master seed, and the artifact
//! version; rerunning the same command with the same seed reproduces the
//! output byte for byte. Grid points run in parallel under per-point
//! seeds, so scheduling never changes results.

mod commands;
mod grid;
mod report;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qsbc::ecc::{derive_code, BaseCodeSpec, LinearCode};
use qsbc::protocols::ProtocolId;
use qsbc::states::ChannelModel;
use serde::Serialize;
use serde_json::Value;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "qsbc",
    version,
    about = "Qubit-string bit-commitment laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare concealing bounds with brute-force distances.
    Conceal(SweepArgs),
    /// Simulate honest and cheating commitment sessions.
    Run(SweepArgs),
    /// Solve and simulate the entanglement attack.
    Attack(SweepArgs),
    /// Analyze a base-code file for the code-based protocol.
    Ecc(SweepArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Conceal(_) => "conceal",
            Command::Run(_) => "run",
            Command::Attack(_) => "attack",
            Command::Ecc(_) => "ecc",
        }
    }

    fn args(&self) -> &SweepArgs {
        match self {
            Command::Conceal(a) | Command::Run(a) | Command::Attack(a) | Command::Ecc(a) => a,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Protocols, comma-separated (p1,p2,p3,p5,p6,p8).
    #[arg(long, default_value = "p1")]
    protocol: String,

    /// String lengths: comma list with inclusive ranges (1,2,5 or 1..6).
    #[arg(long, default_value = "1..4")]
    n: String,

    /// Strings per session; same syntax as --n.
    #[arg(long, default_value = "1")]
    m: String,

    /// Overlap angles in radians: numbers or π tokens (pi/4, 3pi/8),
    /// comma lists, and inclusive linspaces a..b:k.
    #[arg(long, default_value = "pi/4")]
    alpha: String,

    /// Channel qubit-loss probability.
    #[arg(long, default_value_t = 0.0)]
    loss: f64,

    /// Channel bit-flip probability.
    #[arg(long, default_value_t = 0.0)]
    flip: f64,

    /// Base-code file: header "eta xi t", then eta rows of space-separated
    /// bits.
    #[arg(long)]
    code: Option<PathBuf>,

    /// Monte-Carlo trials per grid point.
    #[arg(long, default_value_t = 1000)]
    trials: usize,

    /// Master seed; each grid point derives its own stream from it.
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Write the report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Fully parsed configuration shared by all subcommands.
pub struct ResolvedConfig {
    pub subcommand: &'static str,
    pub protocols: Vec<ProtocolId>,
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub alpha: Vec<f64>,
    pub channel: ChannelModel,
    pub code_path: Option<PathBuf>,
    pub trials: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// The configuration block embedded in every report.
#[derive(Serialize)]
struct ConfigEcho<'a> {
    subcommand: &'a str,
    protocols: Vec<String>,
    n: &'a [usize],
    m: &'a [usize],
    alpha: &'a [f64],
    loss: f64,
    flip: f64,
    code: Option<String>,
    trials: usize,
    seed: u64,
    format: &'a str,
}

impl ResolvedConfig {
    fn from_cli(command: &Command) -> Result<Self> {
        let args = command.args();
        Ok(Self {
            subcommand: command.name(),
            protocols: grid::parse_protocols(&args.protocol)?,
            n: grid::parse_usize_list(&args.n)?,
            m: grid::parse_usize_list(&args.m)?,
            alpha: grid::parse_alpha_list(&args.alpha)?,
            channel: ChannelModel::new(args.loss, args.flip)
                .context("invalid channel probabilities")?,
            code_path: args.code.clone(),
            trials: args.trials,
            seed: args.seed,
            format: args.format,
            out: args.out.clone(),
        })
    }

    pub fn echo(&self) -> Result<Value> {
        Ok(serde_json::to_value(ConfigEcho {
            subcommand: self.subcommand,
            protocols: self.protocols.iter().map(|p| p.to_string()).collect(),
            n: &self.n,
            m: &self.m,
            alpha: &self.alpha,
            loss: self.channel.loss_prob,
            flip: self.channel.flip_prob,
            code: self.code_path.as_ref().map(|p| p.display().to_string()),
            trials: self.trials,
            seed: self.seed,
            format: self.format.name(),
        })?)
    }

    /// Load and derive the linear code behind --code, if given.
    pub fn load_code(&self) -> Result<Option<LinearCode>> {
        let Some(path) = &self.code_path else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read code file {}", path.display()))?;
        let base = BaseCodeSpec::from_text(&text)
            .with_context(|| format!("cannot parse code file {}", path.display()))?;
        Ok(Some(
            derive_code(&base).context("base code fails the derivation rules")?,
        ))
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let config = ResolvedConfig::from_cli(&cli.command)?;
    let (report, exit_code) = match cli.command {
        Command::Conceal(_) => commands::cmd_conceal(&config)?,
        Command::Run(_) => commands::cmd_run(&config)?,
        Command::Attack(_) => commands::cmd_attack(&config)?,
        Command::Ecc(_) => commands::cmd_ecc(&config)?,
    };
    let rendered = report.render(config.format)?;
    match &config.out {
        Some(path) => std::fs::write(path, &rendered)
            .with_context(|| format!("cannot write report to {}", path.display()))?,
        None => print!("{rendered}"),
    }
    if exit_code != 0 {
        std::process::exit(exit_code);
    }
    Ok(())
}
