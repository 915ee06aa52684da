use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pbox_cli::{
    cmd_bounds, cmd_check, cmd_enumerate_mescs, cmd_extremes, cmd_fan, cmd_validate, CliError,
    Format, Output,
};
use pbox_core::Method;

#[derive(Parser)]
#[command(name = "pbox", version, about = "Extreme points, normal fans and expectation bounds of p-boxes")]
struct Cli {
    /// Worker threads for enumeration (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a p-box document and report every violated invariant.
    Validate { file: PathBuf },
    /// List the extreme distribution functions with their witness cones.
    Extremes {
        file: PathBuf,
        #[arg(long, default_value = "structural")]
        method: Method,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Show approximate decimals with this many places (table only).
        #[arg(long, num_args = 0..=1, default_missing_value = "4")]
        decimal: Option<usize>,
    },
    /// Export the fan graph; writes DOT to stdout when no target is given.
    Fan {
        file: PathBuf,
        /// DOT output path, `-` for stdout.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// JSON output path, `-` for stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Lower and upper expectation of a gamble.
    Bounds {
        file: PathBuf,
        /// Comma-separated gamble values, e.g. "1,2,3/2".
        #[arg(long, allow_hyphen_values = true)]
        gamble: String,
        /// Also evaluate the gamble at this mass vector.
        #[arg(long)]
        at_distribution: Option<String>,
        #[arg(long, num_args = 0..=1, default_missing_value = "4")]
        decimal: Option<usize>,
    },
    /// Cross-check enumeration and bounds against the brute-force oracle.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dump every structural generator family for a domain of size N.
    EnumerateMescs {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

fn run(cli: Cli) -> Result<Output, CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Failed(e.to_string()))?;
    }
    match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Extremes {
            file,
            method,
            format,
            decimal,
        } => cmd_extremes(&file, method, format, decimal),
        Command::Fan { file, dot, json } => cmd_fan(&file, dot.as_deref(), json.as_deref()),
        Command::Bounds {
            file,
            gamble,
            at_distribution,
            decimal,
        } => cmd_bounds(&file, &gamble, at_distribution.as_deref(), decimal),
        Command::Check { file, trials, seed } => cmd_check(&file, trials, seed),
        Command::EnumerateMescs { n, format } => cmd_enumerate_mescs(n, format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("pbox: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
