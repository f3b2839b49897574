//! Conformal normalization `ε = (E − E_0)/𝒩`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::closed_form_energy_unit;

use super::SpectrumRecord;

/// Tolerance for reading a momentum or charge as quantized.
const QUANTIZED: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMethod {
    /// `𝒩` is the gap to the lowest charge-neutral level at `|k| = 1`, the
    /// first descendant of the identity.
    TowerSpacing,
    /// `𝒩` is one energy unit of the hand-expanded closed forms, in which
    /// the published couplings put the tower spacing at one.
    PublishedLambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationInfo {
    pub ground_energy: f64,
    pub scale_factor: f64,
    pub method: NormalizationMethod,
}

impl NormalizationInfo {
    pub fn epsilon(&self, energy: f64) -> f64 {
        (energy - self.ground_energy) / self.scale_factor
    }
}

/// Lowest record with `|k| = 1` and trivial charge.
pub fn first_descendant(records: &[SpectrumRecord]) -> Option<&SpectrumRecord> {
    records.iter().skip(1).find(|r| {
        let k = r.momentum_k;
        (k.abs() - 1.0).abs() < QUANTIZED && (r.charge_phase.re - 1.0).abs() < QUANTIZED && r.charge_phase.im.abs() < QUANTIZED
    })
}

/// Scale factor for `method`, measured on an energy-sorted spectrum.
pub fn normalization_info(records: &[SpectrumRecord], method: NormalizationMethod, n: usize) -> Result<NormalizationInfo> {
    let ground = records
        .first()
        .ok_or_else(|| Error::InsufficientLevels("no levels to normalize".into()))?
        .energy_raw;
    let scale_factor = match method {
        NormalizationMethod::TowerSpacing => {
            let d = first_descendant(records).ok_or_else(|| {
                Error::InsufficientLevels("no charge-neutral level at |k| = 1 among the computed levels".into())
            })?;
            d.energy_raw - ground
        }
        NormalizationMethod::PublishedLambda => closed_form_energy_unit(n),
    };
    if !(scale_factor > 0.0) {
        return Err(Error::InsufficientLevels(format!("non-positive tower spacing {scale_factor:.3e}")));
    }
    Ok(NormalizationInfo { ground_energy: ground, scale_factor, method })
}

pub fn apply_normalization(records: &mut [SpectrumRecord], info: &NormalizationInfo) {
    for r in records {
        r.energy_normalized = Some(info.epsilon(r.energy_raw));
    }
}

pub fn normalize_spectrum(
    records: &[SpectrumRecord],
    method: NormalizationMethod,
    n: usize,
) -> Result<(NormalizationInfo, Vec<SpectrumRecord>)> {
    let info = normalization_info(records, method, n)?;
    let mut out = records.to_vec();
    apply_normalization(&mut out, &info);
    Ok((info, out))
}
