//! Run configuration shared by every subcommand.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::cft_oracle::DEFAULT_RADIUS;
use crate::error::{Error, Result};
use crate::hamiltonian::published_lambda;
use crate::spectra::{DEFAULT_SEED, DEFAULT_TOL};
use crate::symmetry::SptClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Spectrum,
    TwistedSpectrum,
    Cocycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Deliberate corruptions used to check that `verify` notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Flip the sign of the domain-wall exponent, `U → U†`.
    DomainWallSign,
}

pub const DEFAULT_N: usize = 2;
pub const DEFAULT_P: usize = 1;
pub const DEFAULT_SITES: usize = 12;
pub const DEFAULT_LEVELS: usize = 16;
/// Coupling used when no published value exists for `(N, p, M)`.
pub const FALLBACK_LAMBDA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub p: usize,
    pub sites: usize,
    pub lambda: f64,
    pub twisted: bool,
    pub levels: usize,
    pub tol: f64,
    pub radius: f64,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
}

impl RunConfig {
    /// Defaults for `command`, with `λ` taken from the published couplings
    /// when they cover `(N, p, M)`.
    pub fn new(command: Command) -> Self {
        let mut cfg = Self {
            command,
            n: DEFAULT_N,
            p: DEFAULT_P,
            sites: DEFAULT_SITES,
            lambda: FALLBACK_LAMBDA,
            twisted: command == Command::TwistedSpectrum,
            levels: DEFAULT_LEVELS,
            tol: DEFAULT_TOL,
            radius: DEFAULT_RADIUS,
            seed: DEFAULT_SEED,
            format: OutputFormat::Json,
            out: None,
            fault: None,
        };
        cfg.lambda = default_lambda(cfg.n, cfg.p, cfg.sites);
        cfg
    }

    pub fn class(&self) -> Result<SptClass> {
        SptClass::new(self.n, self.p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfiguration(msg));
        if self.n < 2 {
            return bad(format!("--n must be at least 2, got {}", self.n));
        }
        if self.p >= self.n {
            return bad(format!("--p must lie in 0..{}, got {}", self.n, self.p));
        }
        if self.sites < 3 {
            return bad(format!("--sites must be at least 3, got {}", self.sites));
        }
        if self.levels < 1 {
            return bad("--levels must be at least 1".into());
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad(format!("--tol must be positive, got {}", self.tol));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return bad(format!("--radius must be positive, got {}", self.radius));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad(format!("--lambda must be positive, got {}", self.lambda));
        }
        if self.twisted != (self.command == Command::TwistedSpectrum) {
            return bad("twisted flag does not match the command".into());
        }
        if matches!(self.command, Command::Spectrum | Command::TwistedSpectrum) {
            let dim = (self.n as u128).checked_pow(self.sites as u32);
            match dim {
                Some(d) if (self.levels as u128) < d && d <= usize::MAX as u128 => {}
                _ => return bad(format!("{} levels do not fit in Z_{}^{}", self.levels, self.n, self.sites)),
            }
        }
        Ok(())
    }
}

pub fn default_lambda(n: usize, p: usize, sites: usize) -> f64 {
    SptClass::new(n, p).ok().and_then(|c| published_lambda(c, sites)).unwrap_or(FALLBACK_LAMBDA)
}
