//! Command-line runner for the half-line collocation solvers.
//!
//! Subcommands: `solve` (one run, series to stdout), `table` (the u_max
//! comparison across the five benchmark κ values), `coeffs` (absolute
//! coefficient dump of a converged solve). Data goes to stdout or `--out`;
//! run summaries go to stderr. Exit codes: 0 success, 1 non-convergence,
//! 2 bad arguments.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "volterra",
    version,
    about = "Spectral collocation solvers for the population model kappa*u' = u - u^2 - u*Int(u)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver and emit a (t, u, y) series over [0, t-end]
    Solve(SolveArgs),
    /// Reproduce the u_max comparison table over the five benchmark kappas
    Table(TableArgs),
    /// Dump |a_i| of a converged spectral solve (plus lambda for hfc)
    Coeffs(CoeffsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Rational Chebyshev collocation
    Rcc,
    /// Transformed Hermite-function collocation
    Hfc,
    /// Adaptive Runge-Kutta reference integrator
    Oracle,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Rcc => "rcc",
            Method::Hfc => "hfc",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    /// Nondimensional toxicity parameter (> 0)
    #[arg(long)]
    pub kappa: f64,
    /// Scaled initial population
    #[arg(long, default_value_t = 0.1)]
    pub u0: f64,
    /// Truncation degree N (required for rcc/hfc)
    #[arg(long)]
    pub n: Option<usize>,
    /// Algebraic map length L (rcc); default: tuned value for benchmark
    /// (kappa, N) pairs, else 1
    #[arg(long)]
    pub map_length: Option<f64>,
    /// Log-sinh map steepness k (hfc); default: tuned value for benchmark
    /// (kappa, N) pairs, else 0.5
    #[arg(long)]
    pub steepness: Option<f64>,
    /// Domain scaling l (hfc); default 1
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    /// Output grid size over [0, t-end] (at least 2)
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the data series here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct TableArgs {
    /// Write the table here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct CoeffsArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.1)]
    pub u0: f64,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub map_length: Option<f64>,
    #[arg(long)]
    pub steepness: Option<f64>,
    #[arg(long)]
    pub scale: Option<f64>,
    /// Write the dump here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => commands::cmd_solve(args),
        Command::Table(args) => commands::cmd_table(args),
        Command::Coeffs(args) => commands::cmd_coeffs(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("volterra: error: {msg}");
            ExitCode::from(2)
        }
    }
}
