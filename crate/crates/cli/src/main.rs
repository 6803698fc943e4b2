//! Command-line front end for load-sharing gateway-diversity outage analysis.

mod commands;
mod scenario;
mod table;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::table::Format;

#[derive(Debug, Parser)]
#[command(name = "sgd-outage", version, about = "System outage probability of smart gateway diversity networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Seed for randomized subcommands
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact SOP of a scenario file
    Sop {
        scenario: PathBuf,
        /// direct, cfe, recursive, fft or general (default: recursive, or
        /// general when capacities differ)
        #[arg(long)]
        method: Option<sgd_outage::sgd::ExactMethod>,
        /// Write the table here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Approximate tails next to the exact value
    Approx {
        scenario: PathBuf,
        /// Comma-separated subset of BA, PA, NA, RNA, CB
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<sgd_outage::approx::ApproxMethod>>,
        /// Use this threshold L instead of the one implied by the demand
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Random-configuration studies; one file per study in the output directory
    Study {
        /// Scenario file whose [experiment] block sets the study parameters
        spec: Option<PathBuf>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "errors,sop-sweep,improve-sweep")]
        which: Vec<commands::Study>,
        /// Output directory
        #[arg(long, env = "SGD_OUTAGE_OUT_DIR", default_value = "sgd-outage-out")]
        out: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Timing of the exact methods over doubling N
    Bench {
        #[arg(long, default_value_t = 256)]
        n_min: usize,
        #[arg(long, default_value_t = 4096)]
        n_max: usize,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input.
    Input(String),
    /// Invalid experiment grid.
    Grid(String),
    Core(sgd_outage::Error),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use sgd_outage::Error as E;
        match self {
            CliError::Input(_) => 2,
            CliError::Grid(_) => 3,
            CliError::Core(E::SizeLimit { .. }) => 4,
            CliError::Core(E::Internal(_)) | CliError::Io(_) => 1,
            CliError::Core(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Grid(msg) => write!(f, "invalid grid: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl From<sgd_outage::Error> for CliError {
    fn from(e: sgd_outage::Error) -> Self {
        CliError::Core(e)
    }
}

fn emit(table: &table::Table, format: Format, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = table.render(format);
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sop { scenario, method, out, output } => {
            let table = commands::sop(&scenario, method)?;
            emit(&table, output.format, out.as_ref())
        }
        Command::Approx { scenario, methods, threshold, out, output } => {
            let table = commands::approx(&scenario, methods.as_deref(), threshold)?;
            emit(&table, output.format, out.as_ref())
        }
        Command::Study { spec, which, out, output } => {
            let table = commands::study(spec.as_deref(), &which, &out, output.format, output.seed)?;
            emit(&table, output.format, None)
        }
        Command::Bench { n_min, n_max, repetitions, out, output } => {
            let table = commands::bench(n_min, n_max, repetitions, output.seed)?;
            emit(&table, output.format, out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sgd-outage: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
