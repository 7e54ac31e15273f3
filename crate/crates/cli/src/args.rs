//! Flag definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "gheb", version, about = "Global Hölderian error bounds for real polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline and write a JSON report.
    Analyze(CommonArgs),
    /// Print the stability label of each `--t` level.
    Classify(CommonArgs),
    /// Fit an error-bound certificate at each `--t` level.
    Verify(CommonArgs),
    /// Sample the psi curve at each `--t` level.
    Psi(CommonArgs),
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Analyze(a) | Command::Classify(a) | Command::Verify(a) | Command::Psi(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Polynomial in x, y, z, e.g. "(y^2-1)^2 + (x*y-1)^2".
    #[arg(long, conflicts_with = "poly_file", required_unless_present = "poly_file")]
    pub poly: Option<String>,
    /// File holding the polynomial text.
    #[arg(long)]
    pub poly_file: Option<PathBuf>,
    /// Level to classify, certify or sample; repeatable.
    #[arg(long = "t", allow_negative_numbers = true)]
    pub t: Vec<f64>,
    /// JSON tolerance configuration, e.g. the `config` section of a report.
    /// Individual flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub radius0: Option<f64>,
    #[arg(long)]
    pub radius_growth: Option<f64>,
    #[arg(long)]
    pub radius_steps: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub grad_tol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub cluster_tol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m_offset: Option<f64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format. `psi` and `classify` default to csv, the others to json.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}
