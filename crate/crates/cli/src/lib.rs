//! Command-line front end: operator-algebra checks, channel predictions,
//! trace fitting, the ratio bound, synthetic traces and the full pipeline.
//!
//! Every run produces a [`RunReport`]; `--report FILE` stores it as JSON.
//! Exit codes: 0 ok, 1 domain error, 2 usage error.

mod commands;
mod report;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

pub use report::{Quantity, RunReport, Status};

#[derive(Debug, Parser)]
#[command(name = "oscillaton", version, about = "Oscillaton mixing toolkit")]
struct Cli {
    /// Write the JSON run report to this file
    #[arg(long, global = true, value_name = "FILE")]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check commutators, the single-oscillaton photon operator and φ_n orthonormality
    Verify(VerifyArgs),
    /// Rate ratio, pair-channel decomposition and inelastic frequency for one γ
    Predict(PredictArgs),
    /// Fit a Gaussian to a scan trace
    Fit(FitArgs),
    /// Error factor and bounds on R and γ from a parameter file
    Bound(BoundArgs),
    /// Write a synthetic scan trace
    Gen(GenArgs),
    /// Fit both traces and compute the bound
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Number of mixing angles, evenly spaced over [-0.5, 0.5]
    #[arg(long, default_value_t = 20)]
    gamma_grid: usize,
    #[arg(long, default_value_t = oscillaton::fock::DEFAULT_LEVEL_CUTOFF)]
    levels: usize,
    #[arg(long, default_value_t = oscillaton::fock::DEFAULT_OSC_CUTOFF)]
    osc: usize,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long, allow_hyphen_values = true)]
    gamma: f64,
    /// Oscillaton mass in kg
    #[arg(long, default_value_t = 0.0)]
    mass: f64,
    /// Incident angular frequency in rad/s (default: 780 nm)
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, default_value_t = oscillaton::fock::DEFAULT_LEVEL_CUTOFF)]
    levels: usize,
    #[arg(long, default_value_t = oscillaton::fock::DEFAULT_OSC_CUTOFF)]
    osc: usize,
    /// Level of the incident oscillaton
    #[arg(long, default_value_t = 0)]
    initial_level: usize,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long, value_name = "FILE")]
    trace: PathBuf,
    /// Hold the Gaussian width fixed (GHz)
    #[arg(long, value_name = "W")]
    fix_width: Option<f64>,
}

#[derive(Debug, Args)]
struct BoundArgs {
    /// Parameter JSON (default: packaged table)
    #[arg(long, value_name = "FILE")]
    params: Option<PathBuf>,
    /// Override the 780 nm detector voltage (V)
    #[arg(long)]
    v780: Option<f64>,
    /// Override the 1560 nm detector voltage (V)
    #[arg(long)]
    v1560: Option<f64>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Peak height in V
    #[arg(long, allow_hyphen_values = true)]
    peak: f64,
    /// Gaussian σ in GHz
    #[arg(long)]
    width: f64,
    /// Noise standard deviation in V
    #[arg(long)]
    noise: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Absorption dip instead of an emission peak
    #[arg(long)]
    dip: bool,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    center: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    baseline: f64,
    #[arg(long, default_value_t = 501)]
    samples: usize,
    /// Total scan range in GHz
    #[arg(long, default_value_t = oscillaton::trace::TraceSpec::DEFAULT_SPAN)]
    span: f64,
    #[arg(long)]
    label: Option<String>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long, value_name = "FILE")]
    trace780: PathBuf,
    #[arg(long, value_name = "FILE")]
    trace1560: PathBuf,
    /// Parameter JSON (default: packaged table)
    #[arg(long, value_name = "FILE")]
    params: Option<PathBuf>,
}

/// Runs one command line (without the program name).
///
/// The report is also written to `--report FILE` when given; a failure to
/// write it turns the run into an error.
pub fn dispatch<I, S>(args: I) -> (i32, RunReport)
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = std::iter::once("oscillaton".to_string())
        .chain(args.into_iter().map(Into::into))
        .collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(err) => return usage_report(&argv, err),
    };

    let mut report = commands::run(&cli.command);
    if let Some(path) = &cli.report {
        if let Err(e) = report.write(path) {
            report.fail(format!("cannot write report {}: {e}", path.display()));
        }
    }
    let code = if report.is_ok() { 0 } else { 1 };
    (code, report)
}

fn usage_report(argv: &[String], err: clap::Error) -> (i32, RunReport) {
    let command = argv.get(1).cloned().unwrap_or_default();
    let mut report = RunReport::new(command, serde_json::json!({ "argv": &argv[1..] }));
    let text = err.render().to_string();
    match err.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            report.message = Some(text);
            (0, report)
        }
        _ => {
            report.fail(text);
            (2, report)
        }
    }
}
