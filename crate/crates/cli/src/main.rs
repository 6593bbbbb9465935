//! `bevtraj`: generate synthetic BEV datasets, train and evaluate the
//! GCN + LSTM trajectory model, and plot predictions.

mod config;
mod error;
mod evaluate;
mod generate;
mod manifest;
mod plot;
mod predict;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::FileConfig;

#[derive(Debug, Parser)]
#[command(
    name = "bevtraj",
    version,
    about = "BEV scene-graph ego trajectory prediction"
)]
struct Cli {
    /// Worker threads; 1 forces fully serial execution.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// TOML file with [generate], [model], [train] and [search] tables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Log level filter (error, warn, info, debug).
    #[arg(long, global = true, default_value = "info")]
    log: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic scene dataset.
    Generate(generate::GenerateArgs),
    /// Train a model on a dataset.
    Train(train::TrainArgs),
    /// Evaluate a checkpoint against the persistence baseline.
    Evaluate(evaluate::EvaluateArgs),
    /// Predict one trajectory and write a coordinate table.
    Predict(predict::PredictArgs),
    /// Predict one trajectory and draw it as SVG with a coordinate table.
    Plot(predict::PredictArgs),
}

/// Settings shared by every command.
pub struct Context {
    pub file: FileConfig,
    pub threads: Option<usize>,
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(error::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    let ctx = Context {
        file: FileConfig::load(cli.config.as_deref())?,
        threads: cli.threads,
    };
    match cli.command {
        Command::Generate(a) => generate::run(&ctx, &a),
        Command::Train(a) => train::run(&ctx, &a),
        Command::Evaluate(a) => evaluate::run(&ctx, &a),
        Command::Predict(a) => predict::run(&ctx, &a, false),
        Command::Plot(a) => predict::run(&ctx, &a, true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .parse_filters(&cli.log)
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::from(error::EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error::exit_code(&e) as u8)
        }
    }
}
