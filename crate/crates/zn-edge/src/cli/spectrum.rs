//! `spectrum` and `twisted-spectrum`.

use crate::cft_oracle::prediction_table;
use crate::error::{Error, Result};
use crate::hamiltonian::EdgeModel;
use crate::hilbert::ManyBodyOperator;
use crate::spectra::{
    apply_normalization, lowest_complete_levels, match_to_cft, normalization_info, relative_to_minimum,
    resolve_quantum_numbers, MatchOptions, MatchTable, NormalizationInfo, NormalizationMethod, QuantumOptions,
    SolverOptions, SpectrumRecord,
};
use crate::symmetry::{symmetry_from_polynomial, twisted_symmetry_from_polynomial, twisted_translation_from_polynomial};

use super::config::{Command, RunConfig};
use super::report::{unix_now, ResidualSummary, SpectrumReport, TwistReference, SCHEMA_VERSION};

/// Largest `|n|` and `|m|` in the prediction tables used for matching.
pub const TABLE_RANGE: u32 = 4;

pub fn solver_options(cfg: &RunConfig) -> SolverOptions {
    SolverOptions::default().with_tol(cfg.tol).with_seed(cfg.seed)
}

/// At least `levels` lowest levels of `model`, completed to a whole
/// degenerate block and labelled by momentum and charge. Twisted models are
/// labelled with `T̃` and `S̃`.
pub fn resolved_levels(model: &EdgeModel, levels: usize, opts: &SolverOptions) -> Result<Vec<SpectrumRecord>> {
    let h = model.build()?;
    let qopts = QuantumOptions::default();
    let pairs = lowest_complete_levels(&h, levels, opts, qopts.degeneracy_tol)?;
    let (m, poly) = (model.sites(), model.polynomial());
    let (translation, symmetry) = if model.twisted() {
        (twisted_translation_from_polynomial(poly, m)?, twisted_symmetry_from_polynomial(poly, m)?)
    } else {
        (ManyBodyOperator::translation(&model.geometry()), symmetry_from_polynomial(poly, m)?)
    };
    let mut records = resolve_quantum_numbers(&pairs, &translation, &symmetry, &qopts)?;
    for r in &mut records {
        r.vector = None;
    }
    Ok(records)
}

fn label(records: &mut [SpectrumRecord], matches: &MatchTable) {
    for e in matches.entries.iter().filter(|e| e.matched) {
        if let Some(r) = records.iter_mut().find(|r| r.index == e.record) {
            r.cft_label = Some(e.state);
        }
    }
}

fn tower_or_warning(records: &[SpectrumRecord], n: usize, warnings: &mut Vec<String>) -> Result<Option<NormalizationInfo>> {
    match normalization_info(records, NormalizationMethod::TowerSpacing, n) {
        Ok(info) => Ok(Some(info)),
        Err(Error::InsufficientLevels(msg)) => {
            warnings.push(format!("tower normalization unavailable ({msg}); using the closed-form energy unit"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn check_command(cfg: &RunConfig, expected: Command) -> Result<()> {
    cfg.validate()?;
    if cfg.command != expected {
        return Err(Error::InvalidConfiguration(format!("configuration is for {:?}, not {expected:?}", cfg.command)));
    }
    Ok(())
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<SpectrumReport> {
    check_command(cfg, Command::Spectrum)?;
    let class = cfg.class()?;
    let model = EdgeModel::new(class, cfg.sites, cfg.lambda, false)?;
    let mut records = resolved_levels(&model, cfg.levels, &solver_options(cfg))?;
    let mut warnings = Vec::new();
    let published = normalization_info(&records, NormalizationMethod::PublishedLambda, cfg.n)?;
    let tower = tower_or_warning(&records, cfg.n, &mut warnings)?;
    let used = tower.unwrap_or(published);
    apply_normalization(&mut records, &used);
    let table = relative_to_minimum(&prediction_table(class, cfg.radius, false, TABLE_RANGE, TABLE_RANGE)?);
    let matches = match_to_cft(&records, &table, &MatchOptions::default());
    label(&mut records, &matches);
    Ok(SpectrumReport {
        schema_version: SCHEMA_VERSION,
        generated_at_unix: unix_now(),
        config: cfg.clone(),
        dimension: model.geometry().dim(),
        normalization: used,
        tower_normalization: tower,
        published_normalization: published,
        reference: None,
        residuals: ResidualSummary::of(&records),
        records,
        matches,
        warnings,
    })
}

/// Twisted levels normalized with the tower spacing `𝒩` of the untwisted
/// chain at the same `(N, p, M, λ)` and measured from the twisted ground
/// state. `tower_normalization` reports the untwisted measurement.
pub fn cmd_twisted_spectrum(cfg: &RunConfig) -> Result<SpectrumReport> {
    check_command(cfg, Command::TwistedSpectrum)?;
    let class = cfg.class()?;
    let opts = solver_options(cfg);
    let plain = EdgeModel::new(class, cfg.sites, cfg.lambda, false)?;
    let untwisted = resolved_levels(&plain, cfg.levels, &opts)?;
    let model = EdgeModel::new(class, cfg.sites, cfg.lambda, true)?;
    let mut records = resolved_levels(&model, cfg.levels, &opts)?;
    let mut warnings = Vec::new();
    let published = normalization_info(&records, NormalizationMethod::PublishedLambda, cfg.n)?;
    let tower = tower_or_warning(&untwisted, cfg.n, &mut warnings)?;
    let used = tower.map_or(published, |t| NormalizationInfo { ground_energy: published.ground_energy, ..t });
    apply_normalization(&mut records, &used);
    let reference = TwistReference {
        untwisted_ground_energy: untwisted[0].energy_raw,
        twisted_ground_energy: records[0].energy_raw,
        ground_offset: (records[0].energy_raw - untwisted[0].energy_raw) / used.scale_factor,
    };
    let table = relative_to_minimum(&prediction_table(class, cfg.radius, true, TABLE_RANGE, TABLE_RANGE)?);
    let matches = match_to_cft(&records, &table, &MatchOptions::default());
    label(&mut records, &matches);
    Ok(SpectrumReport {
        schema_version: SCHEMA_VERSION,
        generated_at_unix: unix_now(),
        config: cfg.clone(),
        dimension: model.geometry().dim(),
        normalization: used,
        tower_normalization: tower,
        published_normalization: published,
        reference: Some(reference),
        residuals: ResidualSummary::of(&records),
        records,
        matches,
        warnings,
    })
}
