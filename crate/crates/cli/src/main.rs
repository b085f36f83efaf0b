mod explain;
mod input;
mod polynomialize;
mod scan;
mod sensitivity;
mod style;

use std::path::PathBuf;
use std::process::ExitCode;

use acr_core::analysis::{AnalysisOptions, DEFAULT_SAMPLES, DEFAULT_SEED};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Detects local absolute concentration robustness in power-law reaction systems.
#[derive(Debug, Parser)]
#[command(name = "acr-scan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze network or matrix files; directories are searched recursively for `*.crn`.
    Scan {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Sensitivities, degeneracy and zero-sensitivity verdicts at given steady states.
    Sensitivity {
        network: PathBuf,
        /// File of lines `k: <rates> x: <concentrations>`.
        #[arg(long)]
        points: PathBuf,
        /// Restrict zero-sensitivity verdicts to one species.
        #[arg(long)]
        species: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rewrite a generalized polynomial system as a polynomial system.
    Polynomialize {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Show every intermediate object of the analysis of one file.
    Explain {
        file: PathBuf,
        /// Restrict the per-species section to one species.
        #[arg(long)]
        species: Option<String>,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct SamplingArgs {
    /// Seed for the non-degeneracy sampler.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Number of random kernel samples after the barycenter.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

impl SamplingArgs {
    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            seed: self.seed,
            samples: self.samples,
        }
    }
}

/// Process outcome: 0 success, 1 input error, 2 internal error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Ok = 0,
    InputError = 1,
    Internal = 2,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Scan {
            paths,
            output,
            sampling,
        } => scan::run(&paths, output.format, &sampling.options()),
        Command::Sensitivity {
            network,
            points,
            species,
            output,
        } => sensitivity::run(&network, &points, species.as_deref(), output.format),
        Command::Polynomialize { file, output } => polynomialize::run(&file, output.format),
        Command::Explain {
            file,
            species,
            sampling,
        } => explain::run(&file, species.as_deref(), &sampling.options()),
    };
    ExitCode::from(outcome as u8)
}
