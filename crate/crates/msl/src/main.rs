use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use msl::config::{Config, Experiment, DEFAULT_TRIALS};
use msl::{exit, run};
use msl_core::algorithms::AlgorithmSpec;
use msl_core::fixtures::WeightModel;

#[derive(Parser)]
#[command(name = "msl", version, about = "Matroid secretary experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a key = value config file.
    Run { config: PathBuf },
    /// Check every wrapper's ratio bound on the built-in fixtures.
    Ledger {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[command(flatten)]
        out: Outputs,
    },
    /// Evaluate one algorithm on a matroid file.
    Eval {
        #[arg(long)]
        matroid: PathBuf,
        /// classical[s], rb, uni[k], pav or tgreedy[rho].
        #[arg(long)]
        alg: String,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Enumerate every order and coin outcome instead of sampling.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value = "uniform")]
        weights: String,
        #[command(flatten)]
        out: Outputs,
    },
    /// Compose leaf algorithms over the decomposition in a matroid file.
    Compose {
        #[arg(long)]
        matroid: PathBuf,
        #[arg(long, default_value = "tgreedy")]
        leaf: String,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "uniform")]
        weights: String,
        #[command(flatten)]
        out: Outputs,
    },
}

#[derive(Args)]
struct Outputs {
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

fn fail(e: msl::Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn usage(message: String) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(exit::PARSE as u8)
}

fn weights(s: &str) -> Result<WeightModel, String> {
    WeightModel::parse(s).ok_or_else(|| format!("unknown weight model {s:?} (uniform or heavy)"))
}

fn spec(s: &str) -> Result<AlgorithmSpec, String> {
    s.parse().map_err(|e: msl_core::Error| e.to_string())
}

fn config(command: Command) -> Result<Result<Config, msl::Error>, String> {
    Ok(match command {
        Command::Run { config } => Config::load(&config),
        Command::Ledger { seed, trials, out } => {
            let mut c = Config::new(Experiment::Ledger, seed);
            c.trials = trials;
            c.out_csv = out.out_csv;
            c.out_json = out.out_json;
            Ok(c)
        }
        Command::Eval { matroid, alg, trials, seed, exact, weights: w, out } => {
            let mut c = Config::new(Experiment::Eval, seed);
            c.matroid = Some(matroid);
            c.alg = Some(spec(&alg)?);
            c.trials = trials;
            c.exact = exact;
            c.weights = weights(&w)?;
            c.out_csv = out.out_csv;
            c.out_json = out.out_json;
            Ok(c)
        }
        Command::Compose { matroid, leaf, trials, seed, weights: w, out } => {
            let mut c = Config::new(Experiment::Compose, seed);
            c.matroid = Some(matroid);
            c.leaf = spec(&leaf)?;
            c.trials = trials;
            c.weights = weights(&w)?;
            c.out_csv = out.out_csv;
            c.out_json = out.out_json;
            Ok(c)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config(cli.command) {
        Err(message) => return usage(message),
        Ok(Err(e)) => return fail(e),
        Ok(Ok(c)) => c,
    };
    match run(&cfg) {
        Ok(summary) => {
            for line in summary.lines() {
                println!("{line}");
            }
            let failures = summary.ledger_failures();
            if failures > 0 {
                eprintln!("{failures} ledger row(s) violated their bound");
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => fail(e),
    }
}
