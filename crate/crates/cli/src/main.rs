mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tableau_core::tableau::OrderConfig;

#[derive(Debug, Parser)]
#[command(name = "todo-tableau", version, about = "Tableau reasoner with configurable rule order, plus benchmarking and order-selection learning")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "TODO_TABLEAU_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Engine {
    /// Rule priority string, 6 digits (AOEFLG) or 7 digits (IAOEFLG); 0 is highest.
    #[arg(long, default_value = "012312", value_parser = parse_config)]
    config: OrderConfig,
    /// Wall-clock budget in milliseconds.
    #[arg(long, default_value_t = tableau_core::tableau::DEFAULT_TIMEOUT_MS)]
    timeout: u64,
}

fn parse_config(s: &str) -> Result<OrderConfig, String> {
    OrderConfig::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse an ontology and print it back in canonical form.
    Parse {
        file: PathBuf,
        /// Print axiom counts instead of the document.
        #[arg(long)]
        summary: bool,
    },
    /// Test satisfiability of a class expression against an ontology.
    Check {
        file: PathBuf,
        /// Class expression in functional syntax, e.g. `ObjectSomeValuesFrom(:r :A)`.
        #[arg(long)]
        concept: String,
        #[command(flatten)]
        engine: Engine,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Compute the direct subsumption hierarchy of the named classes.
    Classify {
        file: PathBuf,
        #[command(flatten)]
        engine: Engine,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Extract the 48 ontology features.
    Features {
        /// Ontology files or directories of `.ofs` files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Classify every ontology under all seven studied orders and record runtimes.
    Bench {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = tableau_core::tableau::DEFAULT_TIMEOUT_MS)]
        timeout: u64,
        #[arg(long, default_value_t = tableau_core::bench::DEFAULT_REPEATS)]
        repeats: usize,
        /// Ontologies benchmarked in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Drop benchmark rows whose runtime spread is below delta or that timed out everywhere.
    Filter {
        runs: PathBuf,
        #[arg(long, default_value_t = tableau_core::bench::DEFAULT_DELTA_MS)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Per-configuration mean and std of runtimes and the Good/Bad threshold.
    Threshold {
        runs: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Label each benchmark row Good/Bad per configuration.
    Label {
        runs: PathBuf,
        /// Threshold in ms; computed from the same table when omitted.
        #[arg(long)]
        threshold: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Train the per-configuration classifiers and write a model bundle.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = tableau_learn::cv::DEFAULT_FOLDS)]
        folds: usize,
        /// Fraction held out for the F1 estimate (0 disables).
        #[arg(long, default_value_t = tableau_learn::bundle::DEFAULT_HOLDOUT)]
        holdout: f64,
    },
    /// Choose an order for an ontology with a trained bundle.
    Predict {
        #[arg(long)]
        model: PathBuf,
        file: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Predict an order, then classify with it.
    Run {
        #[arg(long)]
        model: PathBuf,
        file: PathBuf,
        #[arg(long, default_value_t = tableau_core::tableau::DEFAULT_TIMEOUT_MS)]
        timeout: u64,
        /// Also classify under all seven orders and report speedups.
        #[arg(long)]
        compare_all: bool,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Timeout(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Timeout(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Timeout(m) => m,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::dispatch(cli.command, cli.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("todo-tableau: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
