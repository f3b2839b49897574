//! Momentum and charge labels for computed eigenpairs.
//!
//! Within each degenerate energy block the restriction of a commuting
//! unitary is a normal matrix. It is diagonalized through its Hermitian part
//! first and its anti-Hermitian part second, each step splitting the block
//! into clusters of equal eigenvalue. Translation is resolved before the
//! symmetry because its eigenvalues are exactly quantized.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clock_algebra::{Matrix, ONE, ZERO};
use crate::error::{Error, Result};
use crate::hilbert::{inner, ManyBodyOperator, StateVector};

use super::{sorted_eigen, EigenPair, SpectrumRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumOptions {
    /// Energy gaps below this fraction of the spectral width merge levels.
    pub degeneracy_tol: f64,
    /// Eigenvalues of a restricted unitary closer than this are one cluster.
    pub cluster_tol: f64,
    /// Maximum `‖R†R − 1‖` for a block restriction `R`.
    pub leakage_tol: f64,
}

impl Default for QuantumOptions {
    fn default() -> Self {
        Self { degeneracy_tol: 1e-8, cluster_tol: 1e-6, leakage_tol: 1e-6 }
    }
}

impl QuantumOptions {
    pub fn with_degeneracy_tol(mut self, tol: f64) -> Self {
        self.degeneracy_tol = tol;
        self
    }
}

/// Principal argument in `(−π, π]`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI + 1e-12 {
        PI
    } else {
        a
    }
}

/// Index ranges of degenerate levels in an energy-sorted list.
pub fn degenerate_groups(energies: &[f64], degeneracy_tol: f64) -> Vec<std::ops::Range<usize>> {
    if energies.is_empty() {
        return Vec::new();
    }
    let lo = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { hi - lo } else { 1.0 };
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..energies.len() {
        if energies[i] - energies[i - 1] >= degeneracy_tol * width {
            groups.push(start..i);
            start = i;
        }
    }
    groups.push(start..energies.len());
    groups
}

fn restriction(op: &ManyBodyOperator, vectors: &[Vec<Complex64>]) -> Matrix {
    let images: Vec<Vec<Complex64>> = vectors
        .iter()
        .map(|v| {
            let mut w = vec![ZERO; v.len()];
            op.apply_into(v, &mut w);
            w
        })
        .collect();
    let q = vectors.len();
    Matrix::from_fn(q, q, |i, j| inner(&vectors[i], &images[j]))
}

/// Split the coordinate space of `h` into clusters of nearly equal
/// eigenvalue; each cluster is returned as an orthonormal column block.
fn clusters(h: Matrix, tol: f64) -> Vec<Matrix> {
    let (vals, vecs) = sorted_eigen(&h).expect("small Hermitian eigenproblem");
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > tol {
            out.push(vecs.columns(start, i - start).into_owned());
            start = i;
        }
    }
    out
}

/// Joint eigenbasis of a normal matrix `r` (given in an orthonormal frame).
fn normal_eigenbasis(r: &Matrix, tol: f64) -> Vec<Matrix> {
    let half = Complex64::new(0.5, 0.0);
    let re = (r + r.adjoint()) * half;
    let im = (r - r.adjoint()) * Complex64::new(0.0, -0.5);
    let mut out = Vec::new();
    for c in clusters(re, tol) {
        if c.ncols() == 1 {
            out.push(c);
            continue;
        }
        let local = c.adjoint() * &im * &c;
        for d in clusters(local, tol) {
            out.push(&c * d);
        }
    }
    out
}

fn rotate(vectors: &[Vec<Complex64>], coeffs: &Matrix) -> Vec<Vec<Complex64>> {
    let dim = vectors.first().map_or(0, Vec::len);
    (0..coeffs.ncols())
        .map(|k| {
            let mut out = vec![ZERO; dim];
            for (i, v) in vectors.iter().enumerate() {
                let c = coeffs[(i, k)];
                if c != ZERO {
                    out.iter_mut().zip(v).for_each(|(a, b)| *a += c * b);
                }
            }
            out
        })
        .collect()
}

fn unitarity_deviation(r: &Matrix) -> f64 {
    (r.adjoint() * r - Matrix::identity(r.nrows(), r.ncols())).norm()
}

fn refine(
    blocks: Vec<Vec<Vec<Complex64>>>,
    op: &ManyBodyOperator,
    opts: &QuantumOptions,
    group: usize,
) -> Result<Vec<Vec<Vec<Complex64>>>> {
    let mut out = Vec::new();
    for vectors in blocks {
        let r = restriction(op, &vectors);
        let dev = unitarity_deviation(&r);
        if dev > opts.leakage_tol {
            return Err(Error::Leakage { block: group, deviation: dev });
        }
        if vectors.len() == 1 {
            out.push(vectors);
            continue;
        }
        for c in normal_eigenbasis(&r, opts.cluster_tol) {
            out.push(rotate(&vectors, &c));
        }
    }
    Ok(out)
}

fn expectation(op: &ManyBodyOperator, v: &[Complex64]) -> Complex64 {
    let mut w = vec![ZERO; v.len()];
    op.apply_into(v, &mut w);
    inner(v, &w)
}

/// Label eigenpairs by `T`-momentum and `S`-eigenvalue. `translation` may be
/// the twisted translation, in which case momenta are fractional.
pub fn resolve_quantum_numbers(
    pairs: &[EigenPair],
    translation: &ManyBodyOperator,
    symmetry: &ManyBodyOperator,
    opts: &QuantumOptions,
) -> Result<Vec<SpectrumRecord>> {
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let geometry = pairs[0].vector.geometry().clone();
    if translation.geometry() != &geometry || symmetry.geometry() != &geometry {
        return Err(Error::Dimension("operators and eigenvectors live on different chains".into()));
    }
    let sites = geometry.sites() as f64;
    let energies: Vec<f64> = pairs.iter().map(|p| p.energy).collect();
    let mut records = Vec::with_capacity(pairs.len());
    for (g, range) in degenerate_groups(&energies, opts.degeneracy_tol).into_iter().enumerate() {
        let vectors: Vec<Vec<Complex64>> = pairs[range.clone()].iter().map(|p| p.vector.amplitudes().to_vec()).collect();
        let originals = vectors.clone();
        let blocks = refine(vec![vectors], translation, opts, g)?;
        let blocks = refine(blocks, symmetry, opts, g)?;
        let mut members: Vec<SpectrumRecord> = Vec::new();
        for v in blocks.into_iter().flatten() {
            let t = expectation(translation, &v);
            let s = expectation(symmetry, &v);
            let weights: Vec<f64> = originals.iter().map(|o| inner(o, &v).norm_sqr()).collect();
            let energy = weights.iter().zip(&pairs[range.clone()]).map(|(w, p)| w * p.energy).sum::<f64>()
                / weights.iter().sum::<f64>();
            let residual = pairs[range.clone()].iter().map(|p| p.residual).fold(0.0, f64::max);
            members.push(SpectrumRecord {
                index: 0,
                energy_raw: energy,
                energy_normalized: None,
                momentum_k: sites * principal_arg(t) / TAU,
                translation_eigenvalue: t / t.norm(),
                symmetry_eigenvalue: s / s.norm(),
                charge_phase: ONE,
                degeneracy_group: g,
                cft_label: None,
                residual,
                vector: Some(StateVector::from_amplitudes(&geometry, v)?),
            });
        }
        members.sort_by(|a, b| {
            a.momentum_k
                .total_cmp(&b.momentum_k)
                .then(principal_arg(a.symmetry_eigenvalue).total_cmp(&principal_arg(b.symmetry_eigenvalue)))
        });
        records.extend(members);
    }
    let reference = records[0].symmetry_eigenvalue;
    for (i, r) in records.iter_mut().enumerate() {
        r.index = i;
        let c = r.symmetry_eigenvalue / reference;
        r.charge_phase = c / c.norm();
    }
    Ok(records)
}
