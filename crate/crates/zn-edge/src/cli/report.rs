//! Serialized outputs. Every report embeds its configuration and a schema
//! version; `generated_at_unix` is the only field that varies between
//! identical runs.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::{principal_arg, MatchTable, NormalizationInfo, SpectrumRecord};

use super::config::{OutputFormat, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub max: f64,
    pub mean: f64,
}

impl ResidualSummary {
    pub fn of(records: &[SpectrumRecord]) -> Self {
        let max = records.iter().map(|r| r.residual).fold(0.0, f64::max);
        let mean = if records.is_empty() {
            0.0
        } else {
            records.iter().map(|r| r.residual).sum::<f64>() / records.len() as f64
        };
        Self { max, mean }
    }
}

/// Energies that tie a twisted spectrum to the untwisted one at the same
/// parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistReference {
    pub untwisted_ground_energy: f64,
    pub twisted_ground_energy: f64,
    /// `(Ẽ_0 − E_0)/𝒩`; add it to a twisted `ε` to measure from the
    /// untwisted ground state.
    pub ground_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub schema_version: u32,
    pub generated_at_unix: u64,
    pub config: RunConfig,
    pub dimension: usize,
    /// Normalization applied to `records`.
    pub normalization: NormalizationInfo,
    /// Tower-spacing normalization, when a `|k| = 1` neutral level was found.
    pub tower_normalization: Option<NormalizationInfo>,
    pub published_normalization: NormalizationInfo,
    pub reference: Option<TwistReference>,
    pub records: Vec<SpectrumRecord>,
    pub matches: MatchTable,
    pub residuals: ResidualSummary,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub detail: String,
    pub value: f64,
    pub threshold: f64,
    /// `true` when the value must exceed the threshold rather than stay below.
    pub lower_bound: bool,
    pub passed: bool,
}

impl CheckResult {
    pub fn below(name: &str, detail: String, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), detail, value, threshold, lower_bound: false, passed: value < threshold }
    }

    pub fn above(name: &str, detail: String, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), detail, value, threshold, lower_bound: true, passed: value > threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub generated_at_unix: u64,
    pub config: RunConfig,
    pub sites_used: usize,
    pub checks: Vec<CheckResult>,
    /// Distinct names of failed checks.
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleEntry {
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
    pub theta: f64,
    pub mps_theta: Option<f64>,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCocycle {
    pub p: usize,
    pub entries: Vec<CocycleEntry>,
    pub condition_violation: f64,
    pub condition_holds: bool,
    pub mps_agreement: usize,
    pub triples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleReport {
    pub schema_version: u32,
    pub generated_at_unix: u64,
    pub config: RunConfig,
    pub classes: Vec<ClassCocycle>,
    /// `[p][q]` is `true` when classes `p` and `q` are distinct; absent
    /// beyond the search guard.
    pub distinctness: Option<Vec<Vec<bool>>>,
    pub warnings: Vec<String>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        let distinct = self.distinctness.as_ref().is_none_or(|t| {
            t.iter().enumerate().all(|(p, row)| row.iter().enumerate().all(|(q, &d)| d == (p != q)))
        });
        distinct && self.classes.iter().all(|c| c.condition_holds && c.mps_agreement == c.triples)
    }
}

/// A serializable report with a flat tabular form.
pub trait Report: Serialize {
    fn write_csv<W: Write>(&self, w: W) -> Result<()>;

    fn write<W: Write>(&self, format: OutputFormat, mut w: W) -> Result<()> {
        match format {
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut w, self).map_err(|e| Error::Serialization(e.to_string()))?;
                writeln!(w)?;
                Ok(())
            }
            OutputFormat::Csv => self.write_csv(w),
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Serialization(e.to_string())
}

/// Column header of the spectrum plot data; `k` holds `k̃` in twisted runs
/// and `charge_angle` is `arg` of the charge relative to the ground state.
pub const SPECTRUM_COLUMNS: [&str; 6] = ["k", "epsilon", "charge_angle", "n", "m", "residual"];

impl Report for SpectrumReport {
    fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(SPECTRUM_COLUMNS).map_err(csv_error)?;
        for r in &self.records {
            let (n, m) = r.cft_label.map_or((String::new(), String::new()), |l| (l.n.to_string(), l.m.to_string()));
            let eps = r.energy_normalized.map_or(String::new(), |e| e.to_string());
            out.write_record([
                r.momentum_k.to_string(),
                eps,
                principal_arg(r.charge_phase).to_string(),
                n,
                m,
                r.residual.to_string(),
            ])
            .map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }
}

impl Report for VerifyReport {
    fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["name", "detail", "value", "threshold", "lower_bound", "passed"]).map_err(csv_error)?;
        for c in &self.checks {
            out.write_record([
                c.name.clone(),
                c.detail.clone(),
                c.value.to_string(),
                c.threshold.to_string(),
                c.lower_bound.to_string(),
                c.passed.to_string(),
            ])
            .map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }
}

impl Report for CocycleReport {
    fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["p", "m1", "m2", "m3", "theta", "mps_theta", "agrees"]).map_err(csv_error)?;
        for c in &self.classes {
            for e in &c.entries {
                out.write_record([
                    c.p.to_string(),
                    e.m1.to_string(),
                    e.m2.to_string(),
                    e.m3.to_string(),
                    e.theta.to_string(),
                    e.mps_theta.map_or(String::new(), |t| t.to_string()),
                    e.agrees.to_string(),
                ])
                .map_err(csv_error)?;
            }
        }
        out.flush()?;
        Ok(())
    }
}
