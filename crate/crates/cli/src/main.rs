//! `knownet`: ingestion, analysis, null models, simulation and reports.

mod analyze;
mod error;
mod ingest;
mod null;
mod output;
mod report;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "knownet", version, about = "Knowledge-network analysis toolkit")]
struct Cli {
    /// Worker threads; defaults to one per core. Outputs do not depend on it.
    #[arg(long, global = true, env = "KNOWNET_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a Metamath database or an edge list into a network directory.
    Ingest(ingest::IngestArgs),
    /// Structural and functional metrics of a network directory.
    Analyze(analyze::AnalyzeArgs),
    /// Degree-preserving null-model ensembles and Z-scores.
    Null(null::NullArgs),
    /// Grow a network with the logical/societal link model.
    Simulate(simulate::SimulateArgs),
    /// Align the metrics of several analyzed networks.
    Report(report::ReportArgs),
}

/// Output directory shared by all commands.
#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Directory receiving all outputs; created if absent.
    #[arg(long)]
    pub out: PathBuf,
    /// Replace the output directory of an earlier run.
    #[arg(long)]
    pub force: bool,
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::computation(format!("cannot start thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Ingest(a) => ingest::run(a),
        Command::Analyze(a) => analyze::run(a),
        Command::Null(a) => null::run(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Report(a) => report::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
