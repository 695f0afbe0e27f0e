//! `spinref`: run cooling pipelines, single phases, recurrence analysis,
//! polymer pulse checks, compiler equivalence suites and step-count scaling.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::Common;

#[derive(Debug, Parser)]
#[command(name = "spinref", version, about = "Algorithmic cooling on a simulated polymer machine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Whole input as one region, no initial permutation.
    Direct,
    /// Stride shuffle, then blocks of n^(1/3).
    Stride,
    /// Uniform random shuffle, then blocks of n^(1/3).
    Uniform,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full three-phase run; writes round CSVs, ledgers and a summary.
    Pipeline {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "direct")]
        mode: ModeArg,
    },
    /// One phase on freshly sampled bits.
    Phase {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        phase: u8,
        #[command(flatten)]
        common: Common,
    },
    /// Recurrence orbits, bounds and constants; no sampling.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Permutation induced by a pulse sequence on a polymer ring.
    Arch {
        #[arg(long, default_value = "ABC")]
        pattern: String,
        #[arg(long, default_value_t = 3)]
        periods: usize,
        /// Pulses separated by ';', e.g. "P(A,B);P(C,A);HEAD SWAP".
        #[arg(long)]
        seq: Option<String>,
        /// Boundary index of the head atom (ABC patterns).
        #[arg(long)]
        d_site: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Compiled programs against the abstract phase rules.
    Equiv {
        /// Check one phase only; the default runs the standard suite.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        phase: Option<u8>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Step counts over sizes and fitted exponents per architecture.
    Bench {
        /// single, two_tape or two_tape_ca; all when omitted.
        #[arg(long)]
        arch: Option<String>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
pub enum Failure {
    /// Bad input or configuration; exit 1.
    Invalid(String),
    /// A check did not hold; exit 2.
    Check(String),
}

impl From<spinref_core::Error> for Failure {
    fn from(e: spinref_core::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Pipeline { common, mode } => commands::pipeline(&common, mode.into()),
        Command::Phase { phase, common } => commands::phase(phase, &common),
        Command::Analyze { common } => commands::analyze(&common),
        Command::Arch { pattern, periods, seq, d_site, common } => {
            commands::arch(&pattern, periods, seq.as_deref(), d_site, &common)
        }
        Command::Equiv { phase, width, k, common } => commands::equiv(phase, width, k, &common),
        Command::Bench { arch, sizes, common } => commands::bench(arch.as_deref(), sizes, &common),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(2)
        }
    }
}

impl From<ModeArg> for spinref_core::cooling::PipelineMode {
    fn from(m: ModeArg) -> Self {
        use spinref_core::cooling::{PipelineMode, Shuffle};
        match m {
            ModeArg::Direct => PipelineMode::BinomialDirect,
            ModeArg::Stride => PipelineMode::ShuffledBlocks(Shuffle::Stride),
            ModeArg::Uniform => PipelineMode::ShuffledBlocks(Shuffle::Uniform),
        }
    }
}
