//! Lowest eigenpairs, quantum-number resolution, normalization and CFT
//! matching.

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clock_algebra::Matrix;
use crate::error::{Error, Result};
use crate::hilbert::StateVector;

pub mod matching;
pub mod normalize;
pub mod quantum;
pub mod solver;

pub use matching::{match_to_cft, relative_to_minimum, MatchEntry, MatchOptions, MatchTable, TowerState};
pub use normalize::{
    apply_normalization, first_descendant, normalization_info, normalize_spectrum, NormalizationInfo,
    NormalizationMethod,
};
pub use quantum::{degenerate_groups, principal_arg, resolve_quantum_numbers, QuantumOptions};
pub use solver::{lowest_complete_levels, lowest_eigenpairs, SolverMethod, SolverOptions, DEFAULT_SEED, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub energy: f64,
    pub vector: StateVector,
    /// `‖Hv − Ev‖`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub index: usize,
    pub energy_raw: f64,
    pub energy_normalized: Option<f64>,
    /// `M·arg(t)/2π` for the translation eigenvalue `t`; fractional in
    /// twisted sectors.
    pub momentum_k: f64,
    pub translation_eigenvalue: Complex64,
    pub symmetry_eigenvalue: Complex64,
    /// Symmetry eigenvalue relative to the lowest record.
    pub charge_phase: Complex64,
    pub degeneracy_group: usize,
    pub cft_label: Option<TowerState>,
    pub residual: f64,
    #[serde(skip)]
    pub vector: Option<StateVector>,
}

/// Eigenvalues ascending and matching eigenvector columns of the Hermitian
/// part of `h`.
pub(crate) fn sorted_eigen(h: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let dim = h.nrows();
    let herm = Mat::from_fn(dim, dim, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let eig = herm
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Contract(format!("Hermitian eigensolver failed: {e:?}")))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| s[i].re.total_cmp(&s[j].re));
    let values = order.iter().map(|&k| s[k].re).collect();
    let vectors = Matrix::from_fn(dim, dim, |r, c| u[(r, order[c])]);
    Ok((values, vectors))
}
