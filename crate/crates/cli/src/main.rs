use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::{Check, ExperimentConfig};

#[derive(Parser)]
#[command(name = "paycomm", version, about = "Exact payment and communication experiments on truthful mechanisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Protocol bits of f next to the number of distinct payments per alternative.
    GapReport(Common),
    /// Runs the invariant checks; exits with 1 if any fails.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of the checks (default: all).
        #[arg(long, value_delimiter = ',')]
        check: Vec<Check>,
    },
    /// Monte-Carlo means of the randomized payments against their exact expectations.
    TieBench {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Comma-separated valuations; defaults to a fixed profile per construction.
        #[arg(long)]
        profile: Option<String>,
    },
    /// Transcript of one protocol run.
    Trace {
        #[command(flatten)]
        common: Common,
        /// Comma-separated valuations, e.g. `3,0` or `2,b:110,b:010`.
        #[arg(long)]
        profile: String,
    },
}

#[derive(Args)]
struct Common {
    /// `all`, a construction name such as `proof2`, or an id such as `proof2:k=5`.
    #[arg(long, default_value = "all")]
    construction: String,
    /// `3`, `1..=4`, `1-4` or `1,3`; defaults to each construction's default.
    #[arg(long)]
    k: Option<String>,
    #[arg(long, env = "PAYCOMM_SEED", default_value_t = 0)]
    seed: u64,
    /// Largest number of profiles an exhaustive check may enumerate.
    #[arg(long, default_value_t = paycomm_core::domain::DEFAULT_CAP)]
    cap: u64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self, checks: Vec<Check>) -> Result<ExperimentConfig, commands::Failure> {
        ExperimentConfig::new(&self.construction, self.k.as_deref(), checks, self.seed, self.out.clone(), self.cap)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GapReport(c) => c.config(Vec::new()).and_then(|cfg| commands::gap_report(&cfg)),
        Command::Verify { common, check } => common.config(check).and_then(|cfg| commands::verify(&cfg)),
        Command::TieBench { common, samples, profile } => {
            common.config(Vec::new()).and_then(|cfg| commands::tie_bench(&cfg, samples, profile.as_deref()))
        }
        Command::Trace { common, profile } => common.config(Vec::new()).and_then(|cfg| commands::trace(&cfg, &profile)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("paycomm: {e}");
            ExitCode::from(e.code())
        }
    }
}
