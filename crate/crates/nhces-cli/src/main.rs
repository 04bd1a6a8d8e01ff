//! Command-line front end: reads a JSON run configuration, drives the
//! library, and emits CSV tables. Exit codes: 0 success, 1 verification
//! failure, 2 configuration error, 3 numerical failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "nhces", version, about = "Nonhomothetic CES demand toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-good demand and the expenditure-utility mapping
    Solve(CommonArgs),
    /// Aggregate budget shares over the expenditure cross-section
    Aggregate(CommonArgs),
    /// Expenditure path and panel evolution
    Euler(CommonArgs),
    /// Discrete-choice shares and simulated choices
    Logit(CommonArgs),
    /// Figure data: menu scatter or density curves
    Fig {
        /// Which figure data to emit
        #[arg(value_enum)]
        which: FigKind,
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Run the verification battery; nonzero exit on any failure
    Verify(CommonArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FigKind {
    /// Scatter of (epsilon, log price) from a sampled menu
    Joint,
    /// Density curves for the configured parameter list
    Amoroso,
}

#[derive(Args)]
pub struct CommonArgs {
    /// Path to the JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Override the seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory from the config
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the expenditure list, comma separated
    #[arg(long, value_delimiter = ',')]
    expenditures: Option<Vec<f64>>,
    /// Print the effective configuration and exit
    #[arg(long)]
    dump_config: bool,
}

pub enum CmdError {
    Config(String),
    Numeric(String),
    VerifyFailed,
}

impl CmdError {
    fn exit_code(&self) -> u8 {
        match self {
            CmdError::VerifyFailed => 1,
            CmdError::Config(_) => 2,
            CmdError::Numeric(_) => 3,
        }
    }
}

fn with_config(
    args: CommonArgs,
    f: impl FnOnce(&RunConfig) -> Result<(), CmdError>,
) -> Result<(), CmdError> {
    let mut cfg = RunConfig::load(&args.config)?;
    cfg.apply_overrides(args.seed, args.out.as_deref(), args.expenditures.as_deref());
    cfg.validate()?;
    if args.dump_config {
        let text = serde_json::to_string_pretty(&cfg)
            .map_err(|e| CmdError::Config(format!("cannot serialize config: {e}")))?;
        println!("{text}");
        return Ok(());
    }
    f(&cfg)
}

fn run() -> Result<(), CmdError> {
    match Cli::parse().command {
        Command::Solve(args) => with_config(args, commands::cmd_solve),
        Command::Aggregate(args) => with_config(args, commands::cmd_aggregate),
        Command::Euler(args) => with_config(args, commands::cmd_euler),
        Command::Logit(args) => with_config(args, commands::cmd_logit),
        Command::Fig { which, args } => with_config(args, move |cfg| commands::cmd_fig(cfg, which)),
        Command::Verify(args) => with_config(args, commands::cmd_verify),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CmdError::Config(msg) => eprintln!("config error: {msg}"),
                CmdError::Numeric(msg) => eprintln!("numerical failure: {msg}"),
                CmdError::VerifyFailed => eprintln!("verification failed"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
