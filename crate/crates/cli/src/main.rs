#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(name = "shockfront", version, about = "Front tracking for convex scalar conservation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track fronts from a run configuration and write snapshots.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated snapshot times.
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Keep cell averages instead of rounding them to flux nodes.
        #[arg(long)]
        no_snap: bool,
    },
    /// Print the entropy fan of a Riemann problem.
    Riemann {
        #[arg(long)]
        flux: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        ul: f64,
        #[arg(long, allow_hyphen_values = true)]
        ur: f64,
        /// Node spacing used to interpolate a smooth flux.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Distances between two step functions.
    Distance {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Transport exponents; `inf` selects W∞.
        #[arg(long, value_delimiter = ',', default_value = "1,2,inf", value_parser = commands::parse_exponent)]
        p: Vec<f64>,
    },
    /// Run a refinement study and print its EOC tables.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        /// Output file; with several times one file per time is written.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for shockfront::harness::Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Self::Csv,
            OutputFormat::Json => Self::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { config, times, output, no_snap } => commands::solve(&config, &times, output.as_deref(), no_snap),
        Command::Riemann { flux, ul, ur, delta } => commands::riemann(&flux, ul, ur, delta),
        Command::Distance { a, b, p } => commands::distance(&a, &b, &p),
        Command::Convergence { config, format, out } => {
            return commands::convergence(&config, format.into(), out.as_deref());
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
