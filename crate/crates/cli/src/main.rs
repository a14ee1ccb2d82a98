//! `negacopula`: fit, simulate, evaluate and audit the negative-dependence
//! copula from the command line.
//!
//! Exit codes: 0 success, 1 audit failure, 2 usage or data error,
//! 3 model not applicable (non-negative dependence in the data).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use negacopula::marginals::{Family, MarginalModel};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "negacopula",
    version,
    about = "Negative-dependence copula toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit margins by AIC, θ by rank inversion, and run KS bootstrap checks.
    Fit(FitArgs),
    /// Draw pairs from the copula, optionally mapped through margins.
    Sample(SampleArgs),
    /// Closed-form Spearman's rho and Kendall's tau.
    Measures(MeasuresArgs),
    /// Numerical checks of the dependence properties.
    Audit(AuditArgs),
    /// Long-format grids for plotting.
    PlotData(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum MethodArg {
    Rho,
    Tau,
}

#[derive(Debug, Clone, Args, Serialize)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    xcol: String,
    #[arg(long)]
    ycol: String,
    /// Parametric bootstrap replicates per margin (at least 100).
    #[arg(long, default_value_t = 10_000)]
    bootstrap: usize,
    #[arg(long, env = "NEGACOPULA_SEED", default_value_t = 42)]
    seed: u64,
    /// Candidate marginal families.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "exponential,weibull,gamma,lognormal"
    )]
    families: Vec<Family>,
    #[arg(long, value_enum, default_value_t = MethodArg::Rho)]
    method: MethodArg,
    /// Conditioning x values for curves of P(Y ≤ y | X = x).
    #[arg(long, value_delimiter = ',')]
    at: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    curve_points: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SampleArgs {
    #[arg(long, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, env = "NEGACOPULA_SEED", default_value_t = 42)]
    seed: u64,
    /// Margin of X, e.g. `gamma:7.171,1.375`; requires --margin-y.
    #[arg(long, requires = "margin_y")]
    margin_x: Option<MarginalModel<f64>>,
    #[arg(long, requires = "margin_x")]
    margin_y: Option<MarginalModel<f64>>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct MeasuresArgs {
    #[arg(long, allow_negative_numbers = true, required_unless_present = "grid")]
    theta: Option<f64>,
    /// Emit the ρ(θ), τ(θ) curve on this many log-spaced θ values as CSV.
    #[arg(long, conflicts_with = "theta")]
    grid: Option<usize>,
    #[arg(long, default_value_t = 1e-2)]
    theta_min: f64,
    #[arg(long, default_value_t = 1e2)]
    theta_max: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct AuditArgs {
    #[arg(long, allow_negative_numbers = true, required_unless_present_all = ["theta1", "theta2"])]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "theta2")]
    theta1: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "theta1")]
    theta2: Option<f64>,
    /// Lattice resolution for the grid checks.
    #[arg(long, default_value_t = 200)]
    grid: usize,
    #[arg(long, default_value_t = 399)]
    laplacian_grid: usize,
    /// Random rectangles and quadruples.
    #[arg(long, default_value_t = 10_000)]
    n_random: usize,
    #[arg(long, env = "NEGACOPULA_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PlotWhat {
    /// C(u, v) on the unit square.
    Cdf,
    /// c(u, v) on the unit square.
    Pdf,
    /// H(x, y) of a fitted model.
    JointCdf,
    /// P(Y ≤ y | X = x) of a fitted model at the --at values.
    Cond,
}

#[derive(Debug, Clone, Args, Serialize)]
struct PlotArgs {
    #[arg(long, value_enum)]
    what: PlotWhat,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Points per axis (at least 2).
    #[arg(long, default_value_t = 101)]
    grid: usize,
    /// Fit report from `negacopula fit`; supplies margins and θ.
    #[arg(long, conflicts_with_all = ["margin_x", "margin_y"])]
    report: Option<PathBuf>,
    #[arg(long, requires = "margin_y")]
    margin_x: Option<MarginalModel<f64>>,
    #[arg(long, requires = "margin_x")]
    margin_y: Option<MarginalModel<f64>>,
    #[arg(long, value_delimiter = ',')]
    at: Vec<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => commands::fit(&args),
        Command::Sample(args) => commands::sample(&args),
        Command::Measures(args) => commands::measures(&args),
        Command::Audit(args) => commands::audit(&args),
        Command::PlotData(args) => commands::plot_data(&args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
