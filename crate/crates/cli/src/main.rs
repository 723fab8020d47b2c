//! `santalo`: polar volumes, Santaló points and regions, floating bodies,
//! affine surface area and theorem checks from the command line.
//!
//! Exit codes: 0 ok, 2 input error, 3 numerical error, 4 verification failure.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Report;

#[derive(Parser, Debug)]
#[command(name = "santalo", version, about = "Santaló regions and polar-body volumes of convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// |K^x| by the spherical, dual-domain and section routes
    Polar {
        #[command(flatten)]
        common: Common,
        /// Interior point, comma separated
        #[arg(long, value_parser = parse_vec)]
        x: Floats,
    },
    /// Santaló point, volume product and solver diagnostics
    Santalo {
        #[command(flatten)]
        common: Common,
    },
    /// Radial function and volume of S(K, t)
    Region {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
        /// Number of directions in the radial table
        #[arg(long, default_value_t = 64)]
        dirs: usize,
    },
    /// Floating body approximation and its comparison with Santaló regions
    Floating {
        #[command(flatten)]
        common: Common,
        /// Relative cap volume in (0, 1/2)
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 64)]
        dirs: usize,
    },
    /// Affine surface area from Santaló-region volumes
    Asa {
        #[command(flatten)]
        common: Common,
        /// Increasing t schedule, comma separated (default {8,32,128,512,2048}·p)
        #[arg(long, value_parser = parse_vec)]
        t: Option<Floats>,
    },
    /// Directional verification of the inclusion and limit theorems
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = verify::Suite::All)]
        suite: verify::Suite,
        #[arg(long, default_value_t = 64)]
        dirs: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Body spec: a JSON file or inline JSON
    #[arg(long)]
    body: String,
    /// Sphere-rule level (default depends on the dimension)
    #[arg(long)]
    level: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance (command specific; radial tolerances are relative to diam K)
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numeric(String),
}

impl From<santalo_core::GeomError> for CliError {
    fn from(e: santalo_core::GeomError) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

/// Comma-separated list of numbers.
#[derive(Debug, Clone)]
pub struct Floats(Vec<f64>);

fn parse_vec(s: &str) -> Result<Floats, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()
        .map(Floats)
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("SANTALO_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("SANTALO_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(CliError::Input("SANTALO_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Numeric(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(Report, Common), CliError> {
    configure_threads()?;
    Ok(match cli.command {
        Command::Polar { common, x } => (commands::polar(&common, &x.0)?, common),
        Command::Santalo { common } => (commands::santalo(&common)?, common),
        Command::Region { common, t, dirs } => (commands::region(&common, t, dirs)?, common),
        Command::Floating { common, delta, dirs } => (commands::floating(&common, delta, dirs)?, common),
        Command::Asa { common, t } => (commands::asa(&common, t.as_ref().map(|f| f.0.as_slice()))?, common),
        Command::Verify { common, suite, dirs } => (verify::run(&common, suite, dirs)?, common),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, common)) => {
            if let Err(e) = report.write(common.format, common.out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if report.failed {
                eprintln!("verification failed");
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliError::Input(m)) => {
            eprintln!("input error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(m)) => {
            eprintln!("numerical error: {m}");
            ExitCode::from(3)
        }
    }
}
