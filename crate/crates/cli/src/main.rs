#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use ancient_core::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "ancient", version, about = "Ancient solutions of the heat equation: synthesis and checks")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the main tolerance of the selected checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// TOML file whose keys mirror the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a spectral measure's solution and its heat residual.
    Synth(SynthArgs),
    /// Complete-monotonicity check in backward time.
    CheckCm(CmArgs),
    /// Recover the cumulative spectral function by Laplace inversion.
    Invert(InvertArgs),
    /// Exact caloric polynomial algebra.
    #[command(subcommand)]
    Caloric(CaloricCommand),
    /// Dimension of the space of polynomially growing ancient solutions.
    Dim(DimArgs),
    /// Paraboloid volumes, Gram matrices and the trace/determinant iteration.
    Geom(GeomArgs),
    /// Finite-difference and kernel checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct SynthArgs {
    /// Measure file (JSON); a random measure is drawn when absent.
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Dimension of the random measure.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Atom count of the random measure.
    #[arg(long, default_value_t = 5)]
    pub atoms: usize,
    #[arg(long, default_value_t = 4.0)]
    pub s_max: f64,
    /// Spatial points, `;`-separated, coordinates `,`-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    /// Times, `,`-separated list or `a:b:step`.
    #[arg(long, allow_hyphen_values = true, default_value = "-1")]
    pub t: String,
    /// Writes the measure used to this path.
    #[arg(long)]
    pub save_measure: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct CmArgs {
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Built-in profile instead of a measure: `gaussian` (e^{-t^2}) or `exp` (e^{-t}).
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, default_value = "0.5:5:0.5")]
    pub grid: String,
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct InvertArgs {
    #[arg(long)]
    pub measure: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, default_value = "0:6:0.01")]
    pub s_grid: String,
    /// `fourier`, `euler` or `talbot`.
    #[arg(long, default_value = "fourier")]
    pub method: String,
    /// Real part of the inversion contour; chosen per point when absent.
    #[arg(long)]
    pub abscissa: Option<f64>,
    /// Times at which to check the identity for the Laplacian of h.
    #[arg(long)]
    pub identity: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum CaloricCommand {
    /// Caloric polynomial with the given initial data.
    Extend(PolyArgs),
    /// Chain `u_0, u_1, ...` of a caloric polynomial.
    Decompose(PolyArgs),
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct PolyArgs {
    pub polynomial: String,
    /// Spatial dimension; inferred from the variables when absent.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct DimArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub qmax: u32,
    /// Largest q cross-checked against the exact null space.
    #[arg(long, default_value_t = 8)]
    pub oracle_max: u32,
    /// Also report the backward-uniqueness system.
    #[arg(long)]
    pub backward: bool,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct GeomArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value = "0.5,1,2")]
    pub r: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value = "1,0.5,0.25,0.1")]
    pub eps: String,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    /// `all`, `richardson`, `kernel`, `li-yau`, `forward-bound`,
    /// `mean-value`, `caccioppoli` or `high-dt`.
    #[arg(long, default_value = "all")]
    pub check: String,
    /// Finest grid spacing.
    #[arg(long, default_value_t = 0.01)]
    pub h: f64,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Final time of the forward solve.
    #[arg(long, default_value_t = 0.5)]
    pub t_final: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

/// Exit status for usage and input errors.
const USAGE: u8 = 2;

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::InvalidInput(_) | Error::Io { .. } | Error::DimensionMismatch { .. } => USAGE,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let mut args: Vec<String> = std::env::args().collect();
    if let Some(path) = config::config_path(&args) {
        match config::splice(&args, path.as_ref()) {
            Ok(a) => args = a,
            Err(e) => {
                eprintln!("error: config: {e}");
                return ExitCode::from(USAGE);
            }
        }
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if cli.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(USAGE);
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            eprintln!("error: --tol must be positive");
            return ExitCode::from(USAGE);
        }
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(USAGE);
    }
    match commands::run(&cli) {
        Ok(outcome) => {
            let report = outcome.report;
            let written = match (&outcome.text, cli.out.as_deref()) {
                (Some(text), out) => {
                    println!("{text}");
                    out.map_or(Ok(()), |p| report.emit(Some(p)))
                }
                (None, out) => report.emit(out),
            };
            if let Err(e) = written {
                eprintln!("error: writing output: {e}");
                return ExitCode::from(USAGE);
            }
            let failed = report.failures();
            if failed > 0 {
                eprintln!("{failed} check(s) failed");
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
