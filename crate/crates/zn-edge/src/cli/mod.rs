//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invariant or acceptance failure, 2 invalid
//! configuration, 3 solver non-convergence.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::cft_oracle::DEFAULT_RADIUS;
use crate::error::{Error, Result};
use crate::spectra::{DEFAULT_SEED, DEFAULT_TOL};

pub mod cocycle;
pub mod config;
pub mod report;
pub mod spectrum;
pub mod verify;

pub use cocycle::cmd_cocycle;
pub use config::{default_lambda, Command, Fault, OutputFormat, RunConfig};
pub use report::{
    CocycleReport, Report, ResidualSummary, SpectrumReport, TwistReference, VerifyReport, SCHEMA_VERSION,
    SPECTRUM_COLUMNS,
};
pub use spectrum::{cmd_spectrum, cmd_twisted_spectrum, resolved_levels};
pub use verify::cmd_verify;

use config::{DEFAULT_LEVELS, DEFAULT_N, DEFAULT_P, DEFAULT_SITES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "zn-edge", version, about = "Z_N SPT edge chains: spectra, CFT matching and cohomology checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Run the algebra, symmetry, Hamiltonian and cocycle invariant suites.
    Verify(Args),
    /// Lowest levels of the untwisted chain, labelled and matched to the compact boson.
    Spectrum(Args),
    /// Lowest levels with one unit of Z_N flux, matched to the shifted spectrum.
    TwistedSpectrum(Args),
    /// 3-cocycle tables, cocycle condition, class distinctness and tensor check.
    Cocycle(Args),
}

#[derive(Debug, Clone, clap::Args)]
pub struct Args {
    /// Group order N.
    #[arg(long = "n", default_value_t = DEFAULT_N)]
    pub n: usize,
    /// Class p in 0..N.
    #[arg(long = "p", default_value_t = DEFAULT_P)]
    pub p: usize,
    /// Number of sites M. `verify` lowers it to fit the dense guard.
    #[arg(long, default_value_t = DEFAULT_SITES)]
    pub sites: usize,
    /// Coupling λ [default: 0.82 for N=2 p=1 M=20, 0.26 for N=3 p=1,2 M=12, else 1].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Minimum number of levels; extended to complete the last degenerate block.
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    pub levels: usize,
    /// Eigensolver residual tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Compactification radius R of the predictions.
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    pub radius: f64,
    /// Seed of the random start and probe vectors.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output format: JSON report or CSV rows (k, epsilon, charge_angle, n, m, residual for spectra).
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Output file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

impl Sub {
    pub fn config(&self) -> RunConfig {
        let (command, a) = match self {
            Sub::Verify(a) => (Command::Verify, a),
            Sub::Spectrum(a) => (Command::Spectrum, a),
            Sub::TwistedSpectrum(a) => (Command::TwistedSpectrum, a),
            Sub::Cocycle(a) => (Command::Cocycle, a),
        };
        RunConfig {
            command,
            n: a.n,
            p: a.p,
            sites: a.sites,
            lambda: a.lambda.unwrap_or_else(|| default_lambda(a.n, a.p, a.sites)),
            twisted: command == Command::TwistedSpectrum,
            levels: a.levels,
            tol: a.tol,
            radius: a.radius,
            seed: a.seed,
            format: a.format,
            out: a.out.clone(),
            fault: a.inject_fault,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::InvalidConfiguration(_) | Error::DenseGuard { .. } => EXIT_CONFIG,
        Error::Convergence { .. } => EXIT_CONVERGENCE,
        _ => EXIT_FAILURE,
    }
}

fn emit<R: Report>(report: &R, cfg: &RunConfig) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(cfg.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            report.write(cfg.format, stdout.lock())?;
        }
    }
    Ok(())
}

/// Run one command and return its exit status.
pub fn execute(cfg: &RunConfig) -> Result<i32> {
    match cfg.command {
        Command::Verify => {
            let report = cmd_verify(cfg)?;
            emit(&report, cfg)?;
            if report.passed() {
                Ok(EXIT_OK)
            } else {
                eprintln!("failed checks: {}", report.failures.join(", "));
                Ok(EXIT_FAILURE)
            }
        }
        Command::Spectrum => {
            emit(&cmd_spectrum(cfg)?, cfg)?;
            Ok(EXIT_OK)
        }
        Command::TwistedSpectrum => {
            emit(&cmd_twisted_spectrum(cfg)?, cfg)?;
            Ok(EXIT_OK)
        }
        Command::Cocycle => {
            let report = cmd_cocycle(cfg)?;
            emit(&report, cfg)?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}

/// Parse `args` (including the program name) and run.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = cli.command.config();
    match execute(&cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main_entry() -> i32 {
    run(std::env::args_os())
}
