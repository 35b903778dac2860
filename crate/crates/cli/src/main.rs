//! `hyperinv` command-line front end.

mod commands;
mod document;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hyperinv::suites::Suite;

#[derive(Parser)]
#[command(name = "hyperinv", version, about = "Invariants of completely symmetric higher-rank matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Determinant (odd rank: vanishing epsilon value plus the Cayley value)
    Det {
        file: PathBuf,
        #[arg(long)]
        pretty: bool,
    },
    /// Discriminants C_0..C_d relative to a metric
    Invariants {
        file: PathBuf,
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        pretty: bool,
    },
    /// Contravariant inverse
    Inverse {
        file: PathBuf,
        #[arg(long)]
        pretty: bool,
    },
    /// Run a seeded identity suite
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long)]
        pretty: bool,
    },
    /// Sixth-rank lift of a third-rank tensor
    Lift {
        file: PathBuf,
        #[arg(long)]
        pretty: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Rank2,
    Rank4,
    Odd,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Rank2 => Suite::Rank2,
            SuiteArg::Rank4 => Suite::Rank4,
            SuiteArg::Odd => Suite::Odd,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Det { file, pretty } => commands::det(&file, pretty),
        Command::Invariants { file, metric, pretty } => commands::invariants(&file, &metric, pretty),
        Command::Inverse { file, pretty } => commands::inverse(&file, pretty),
        Command::Verify {
            suite,
            dim,
            seed,
            samples,
            pretty,
        } => commands::verify(suite.into(), dim, seed, samples, pretty),
        Command::Lift { file, pretty } => commands::lift(&file, pretty),
    };
    match outcome {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err((output, err)) => {
            if let Some(output) = output {
                print!("{output}");
            }
            eprintln!("hyperinv: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
