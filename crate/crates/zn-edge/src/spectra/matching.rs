//! Assignment of lattice levels to compact-boson states.
//!
//! Every primary `(n, m)` carries a tower of descendants at levels
//! `(l, l̄)` with `Δ + l + l̄` and momentum `P + l − l̄`. A record is matched to
//! the compatible state of nearest dimension. Untwisted states are compatible
//! when their charges agree. Twisted states are compatible when the
//! fractional part of `k̃ − δ` equals that of `P̃`. The frame offset `δ` is
//! calibrated against the ground state, because the lattice momentum is only
//! defined up to a constant shift there.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cft_oracle::CftPrediction;

use super::SpectrumRecord;

const QUANTUM_TOL: f64 = 1e-6;
const SAME_DELTA: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchOptions {
    pub tol_energy: f64,
    /// Highest `l + l̄` of descendants considered.
    pub descendant_levels: u32,
    /// Fixed twisted frame offset; `None` calibrates it.
    pub momentum_frame: Option<f64>,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self { tol_energy: 0.1, descendant_levels: 2, momentum_frame: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TowerState {
    pub n: i64,
    pub m: i64,
    pub left: u32,
    pub right: u32,
}

impl TowerState {
    pub fn is_primary(&self) -> bool {
        self.left == 0 && self.right == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchEntry {
    pub record: usize,
    pub state: TowerState,
    pub predicted_delta: f64,
    pub predicted_momentum: f64,
    pub observed: f64,
    pub residual: f64,
    pub matched: bool,
    pub ambiguous: bool,
    /// Other compatible states within the energy tolerance.
    pub alternatives: Vec<TowerState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchTable {
    pub entries: Vec<MatchEntry>,
    pub unmatched: Vec<usize>,
    pub momentum_frame: f64,
}

impl MatchTable {
    pub fn primaries(&self) -> impl Iterator<Item = &MatchEntry> {
        self.entries.iter().filter(|e| e.matched && e.state.is_primary())
    }
}

struct Candidate {
    state: TowerState,
    delta: f64,
    momentum: f64,
    prediction: usize,
}

fn candidates(predictions: &[CftPrediction], levels: u32) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (i, p) in predictions.iter().enumerate() {
        for total in 0..=levels {
            for left in 0..=total {
                let right = total - left;
                out.push(Candidate {
                    state: TowerState { n: p.n, m: p.m, left, right },
                    delta: p.delta + total as f64,
                    momentum: p.momentum + left as f64 - right as f64,
                    prediction: i,
                });
            }
        }
    }
    out
}

/// Distance between `a` and `b` on the circle `ℝ/ℤ`.
fn fractional_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn compatible(r: &SpectrumRecord, c: &Candidate, p: &CftPrediction, frame: f64) -> bool {
    if p.twisted {
        fractional_distance(r.momentum_k - frame, c.momentum) < QUANTUM_TOL
    } else {
        (r.charge_phase - p.charge_phase).norm() < QUANTUM_TOL
    }
}

fn match_with_frame(
    records: &[SpectrumRecord],
    predictions: &[CftPrediction],
    opts: &MatchOptions,
    frame: f64,
) -> MatchTable {
    let cands = candidates(predictions, opts.descendant_levels);
    let mut usage: HashMap<TowerState, usize> = HashMap::new();
    let mut entries = Vec::new();
    let mut unmatched = Vec::new();
    for r in records {
        let eps = r.energy_normalized.unwrap_or(f64::NAN);
        let compat: Vec<&Candidate> =
            cands.iter().filter(|c| compatible(r, c, &predictions[c.prediction], frame)).collect();
        if compat.is_empty() || !eps.is_finite() {
            unmatched.push(r.index);
            continue;
        }
        let best = compat.iter().map(|c| (eps - c.delta).abs()).fold(f64::INFINITY, f64::min);
        let momentum_gap = |c: &Candidate| (r.momentum_k - frame - c.momentum).abs();
        let tied: Vec<&&Candidate> = compat.iter().filter(|c| (eps - c.delta).abs() <= best + SAME_DELTA).collect();
        let closest = tied.iter().map(|c| momentum_gap(c)).fold(f64::INFINITY, f64::min);
        let chosen = tied
            .iter()
            .filter(|c| momentum_gap(c) <= closest + QUANTUM_TOL)
            .min_by_key(|c| (!c.state.is_primary(), usage.get(&c.state).copied().unwrap_or(0), c.prediction))
            .expect("at least one tied candidate");
        *usage.entry(chosen.state).or_insert(0) += 1;
        let matched = best <= opts.tol_energy;
        let alternatives: Vec<TowerState> = compat
            .iter()
            .filter(|c| (eps - c.delta).abs() <= opts.tol_energy && c.state != chosen.state)
            .map(|c| c.state)
            .collect();
        let ambiguous = matched
            && compat
                .iter()
                .any(|c| (eps - c.delta).abs() <= opts.tol_energy && (c.delta - chosen.delta).abs() > SAME_DELTA);
        if !matched {
            unmatched.push(r.index);
        }
        entries.push(MatchEntry {
            record: r.index,
            state: chosen.state,
            predicted_delta: chosen.delta,
            predicted_momentum: chosen.momentum,
            observed: eps,
            residual: best,
            matched,
            ambiguous,
            alternatives,
        });
    }
    MatchTable { entries, unmatched, momentum_frame: frame }
}

/// Match normalized records against a prediction table. Predictions should
/// be shifted so the lowest one sits at the energy reference of `records`.
pub fn match_to_cft(records: &[SpectrumRecord], predictions: &[CftPrediction], opts: &MatchOptions) -> MatchTable {
    let twisted = predictions.first().is_some_and(|p| p.twisted);
    if !twisted {
        return match_with_frame(records, predictions, opts, 0.0);
    }
    if let Some(frame) = opts.momentum_frame {
        return match_with_frame(records, predictions, opts, frame);
    }
    let Some(ground) = records.first() else {
        return match_with_frame(records, predictions, opts, 0.0);
    };
    let lowest = predictions.iter().map(|p| p.delta).fold(f64::INFINITY, f64::min);
    let mut frames: Vec<f64> = predictions
        .iter()
        .filter(|p| p.delta <= lowest + SAME_DELTA)
        .map(|p| {
            let f = (ground.momentum_k - p.momentum).rem_euclid(1.0);
            if f > 0.5 + 1e-9 {
                f - 1.0
            } else {
                f
            }
        })
        .collect();
    frames.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
    frames.dedup_by(|a, b| (*a - *b).abs() < QUANTUM_TOL);
    frames
        .into_iter()
        .map(|f| match_with_frame(records, predictions, opts, f))
        .min_by(|a, b| {
            let score = |t: &MatchTable| {
                (t.unmatched.len(), t.entries.iter().map(|e| e.residual.min(opts.tol_energy)).sum::<f64>())
            };
            let (ua, ra) = score(a);
            let (ub, rb) = score(b);
            ua.cmp(&ub).then(ra.total_cmp(&rb))
        })
        .expect("at least one frame candidate")
}

/// Copy of `predictions` with every dimension lowered by the minimum, so the
/// table lines up with energies measured from the lowest level.
pub fn relative_to_minimum(predictions: &[CftPrediction]) -> Vec<CftPrediction> {
    let lowest = predictions.iter().map(|p| p.delta).fold(f64::INFINITY, f64::min);
    predictions
        .iter()
        .cloned()
        .map(|mut p| {
            p.delta -= lowest;
            p
        })
        .collect()
}
