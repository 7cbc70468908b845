//! `clgpn` — fit and inspect circular–linear hidden Markov models.
//!
//! Subcommands: `simulate` writes synthetic series from the built-in
//! generator designs, `fit` samples the posterior and writes draw-level
//! outputs, `select` sweeps the number of regimes and tabulates
//! information criteria, `score` holds out values and scores the model's
//! imputations, `summarize` adds interpretation tables to a fit, and
//! `diagnose` reports mixing statistics for existing draw files.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 numerical failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "clgpn",
    version,
    about = "Hidden Markov models for circular-linear time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic series from one of the built-in designs (a, b, c)
    Simulate(SimulateArgs),
    /// Sample the posterior and write draws, states, and summaries
    Fit(FitArgs),
    /// Fit a range of regime counts and tabulate information criteria
    Select(SelectArgs),
    /// Hold out values, refit, and score the imputations
    Score(ScoreArgs),
    /// Fit and write interpretation tables (transitions, regime features)
    Summarize(FitArgs),
    /// Report mixing diagnostics for existing draw files
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Generator design: a, b, or c
    #[arg(long)]
    scheme: String,
    /// Number of time points
    #[arg(long = "T")]
    t: usize,
    /// Generator seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory (created if absent)
    #[arg(long)]
    out: PathBuf,
    /// Also write a masked copy with this fraction of values dropped
    #[arg(long)]
    missing_fraction: Option<f64>,
    /// Seed for the drop pattern (default: seed + 1)
    #[arg(long)]
    missing_seed: Option<u64>,
    /// Drop single coordinates instead of whole (angle, linear) pairs
    #[arg(long)]
    coordinate_drops: bool,
    /// Token written for missing values (default NA)
    #[arg(long)]
    missing_token: Option<String>,
}

/// Flags shared by every command that reads a dataset and runs chains.
#[derive(Args)]
pub struct CommonFitArgs {
    /// Input dataset (CSV: time,direction,linear)
    data: PathBuf,
    /// Output directory (created if absent)
    #[arg(long)]
    out: PathBuf,
    /// Line-oriented key = value run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Chain seed (overrides the configuration file)
    #[arg(long)]
    seed: Option<u64>,
    /// Independent chains to run on distinct streams of one seed
    #[arg(long)]
    chains: Option<usize>,
    /// Model variant: clgpn, cldpn, or ind
    #[arg(long)]
    variant: Option<String>,
    /// Direction column is in degrees
    #[arg(long)]
    degrees: bool,
    /// Natural-log-transform the linear column
    #[arg(long)]
    log_linear: bool,
    /// Token marking missing values in the input
    #[arg(long)]
    missing_token: Option<String>,
}

#[derive(Args)]
pub struct FitArgs {
    #[command(flatten)]
    common: CommonFitArgs,
    /// Number of hidden regimes
    #[arg(long = "K")]
    k: Option<usize>,
}

#[derive(Args)]
pub struct SelectArgs {
    #[command(flatten)]
    common: CommonFitArgs,
    /// Smallest regime count to fit
    #[arg(long, default_value_t = 1)]
    k_min: usize,
    /// Largest regime count to fit
    #[arg(long, default_value_t = 4)]
    k_max: usize,
}

#[derive(Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    common: CommonFitArgs,
    /// Number of hidden regimes
    #[arg(long = "K")]
    k: Option<usize>,
    /// Fraction of values to hold out
    #[arg(long, default_value_t = 0.1)]
    missing_fraction: f64,
    /// Seed for the drop pattern
    #[arg(long, default_value_t = 1)]
    missing_seed: u64,
    /// Drop single coordinates instead of whole (angle, linear) pairs
    #[arg(long)]
    coordinate_drops: bool,
}

#[derive(Args)]
pub struct DiagnoseArgs {
    /// Draw files written by fit (draws.csv)
    #[arg(required = true)]
    draws: Vec<PathBuf>,
    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match &cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Fit(args) => commands::fit(args),
        Command::Select(args) => commands::select(args),
        Command::Score(args) => commands::score(args),
        Command::Summarize(args) => commands::summarize(args),
        Command::Diagnose(args) => commands::diagnose(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
