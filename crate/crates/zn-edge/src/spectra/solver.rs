//! Lowest eigenpairs of a Hermitian operator.
//!
//! Small spaces are diagonalized densely. Larger ones use a block Lanczos
//! iteration with full reorthogonalization and thick restarts: the basis `V`
//! and its image `AV` are stored, a Rayleigh–Ritz step on `V†AV` produces
//! Ritz pairs, and each restart keeps the lowest Ritz vectors plus their
//! residual block. Blocks matter here because the spectra carry exact
//! degeneracies that a single Krylov vector cannot resolve.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatMut, MatRef, Par};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clock_algebra::{Matrix, ZERO};
use crate::error::{Error, Result};
use crate::hilbert::{inner, norm, random_amplitudes, ManyBodyOperator, StateVector};

use super::quantum::degenerate_groups;
use super::{sorted_eigen, EigenPair};

pub const DEFAULT_SEED: u64 = 0x5eed_2015;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Vectors whose norm drops below this fraction after orthogonalization are
/// treated as linearly dependent.
const RANK_FLOOR: f64 = 1e-8;


#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMethod {
    /// Dense below `dense_threshold`, Krylov above.
    Auto,
    Dense,
    Krylov,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub method: SolverMethod,
    pub dense_threshold: usize,
    pub block_size: usize,
    /// Basis size before a restart; `None` picks `4·count + 4·block`.
    pub max_basis: Option<usize>,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            method: SolverMethod::Auto,
            dense_threshold: 512,
            block_size: 8,
            max_basis: None,
            max_restarts: 400,
            seed: DEFAULT_SEED,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_method(mut self, method: SolverMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_block_size(mut self, b: usize) -> Self {
        self.block_size = b;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// The `count` smallest eigenpairs, ascending.
pub fn lowest_eigenpairs(a: &ManyBodyOperator, count: usize, opts: &SolverOptions) -> Result<Vec<EigenPair>> {
    let dim = a.geometry().dim();
    if count == 0 || count > dim {
        return Err(Error::InvalidParameter(format!("requested {count} eigenpairs in dimension {dim}")));
    }
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {} must be positive", opts.tol)));
    }
    check_hermitian(a, opts.seed)?;
    let dense = match opts.method {
        SolverMethod::Dense => true,
        SolverMethod::Krylov => false,
        SolverMethod::Auto => dim <= opts.dense_threshold,
    } || count == dim;
    if dense {
        dense_lowest(a, count)
    } else {
        BlockLanczos::new(a, count, opts).run()
    }
}

/// At least `levels` lowest eigenpairs, extended to the end of the
/// degenerate block containing the last one. Extra levels are solved so a
/// block cut by the requested count is never returned partially.
pub fn lowest_complete_levels(
    a: &ManyBodyOperator,
    levels: usize,
    opts: &SolverOptions,
    degeneracy_tol: f64,
) -> Result<Vec<EigenPair>> {
    let dim = a.geometry().dim();
    if levels == 0 || levels > dim {
        return Err(Error::InvalidParameter(format!("requested {levels} levels in dimension {dim}")));
    }
    let mut count = (levels + levels / 2 + 4).min(dim);
    loop {
        let mut pairs = lowest_eigenpairs(a, count, opts)?;
        let energies: Vec<f64> = pairs.iter().map(|p| p.energy).collect();
        let mut groups = degenerate_groups(&energies, degeneracy_tol);
        if count < dim {
            // The top block may continue beyond what was solved.
            groups.pop();
        }
        if let Some(g) = groups.iter().find(|g| g.end >= levels) {
            pairs.truncate(g.end);
            return Ok(pairs);
        }
        count = (2 * count).min(dim);
    }
}

fn check_hermitian(a: &ManyBodyOperator, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4e47);
    let probe = StateVector::random(a.geometry(), &mut rng);
    let scale = a.apply(&probe)?.norm().max(1.0);
    let defect = a.hermiticity_defect(2, &mut rng);
    if defect > 1e-10 * scale {
        return Err(Error::Contract(format!(
            "operator is not Hermitian: random-vector defect {defect:.3e}"
        )));
    }
    Ok(())
}

fn residual(a: &ManyBodyOperator, x: &[Complex64], theta: f64) -> f64 {
    let mut ax = vec![ZERO; x.len()];
    a.apply_into(x, &mut ax);
    ax.iter()
        .zip(x)
        .map(|(y, v)| (y - v * theta).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn dense_lowest(a: &ManyBodyOperator, count: usize) -> Result<Vec<EigenPair>> {
    let (values, vectors) = sorted_eigen(&a.dense_materialize()?)?;
    (0..count)
        .map(|k| {
            let x: Vec<Complex64> = vectors.column(k).iter().copied().collect();
            let r = residual(a, &x, values[k]);
            Ok(EigenPair { energy: values[k], vector: StateVector::from_amplitudes(a.geometry(), x)?, residual: r })
        })
        .collect()
}

/// Equal-length vectors stored column-major in one buffer, so blocks of
/// them can be handed to matrix products without copying.
struct Columns {
    dim: usize,
    data: Vec<Complex64>,
}

impl Columns {
    fn new(dim: usize) -> Self {
        Self { dim, data: Vec::new() }
    }

    fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.dim..(j + 1) * self.dim]
    }

    fn push(&mut self, v: &[Complex64]) {
        self.data.extend_from_slice(v);
    }

    fn truncate(&mut self, cols: usize) {
        self.data.truncate(cols * self.dim);
    }

    fn view(&self) -> MatRef<'_, Complex64> {
        MatRef::from_column_major_slice(&self.data, self.dim, self.len())
    }

    fn view_mut(&mut self) -> MatMut<'_, Complex64> {
        let cols = self.len();
        MatMut::from_column_major_slice_mut(&mut self.data, self.dim, cols)
    }

    /// Images under `a`, column by column.
    fn mapped(&self, a: &ManyBodyOperator) -> Columns {
        let mut out = Columns { dim: self.dim, data: vec![ZERO; self.data.len()] };
        for j in 0..self.len() {
            a.apply_into(self.col(j), out.col_mut(j));
        }
        out
    }
}

fn parallelism() -> Par {
    if rayon::current_num_threads() > 1 {
        Par::rayon(0)
    } else {
        Par::Seq
    }
}

/// `V† W`.
fn adjoint_product(v: MatRef<'_, Complex64>, w: MatRef<'_, Complex64>) -> Mat<Complex64> {
    let mut out = Mat::zeros(v.ncols(), w.ncols());
    matmul(out.as_mut(), Accum::Replace, v.adjoint(), w, Complex64::new(1.0, 0.0), parallelism());
    out
}

/// `V C` as a new column store.
fn combine(v: &Columns, c: MatRef<'_, Complex64>) -> Columns {
    let mut out = Columns { dim: v.dim, data: vec![ZERO; v.dim * c.ncols()] };
    matmul(out.view_mut(), Accum::Replace, v.view(), c, Complex64::new(1.0, 0.0), parallelism());
    out
}

struct BlockLanczos<'a> {
    a: &'a ManyBodyOperator,
    count: usize,
    tol: f64,
    block: usize,
    capacity: usize,
    keep: usize,
    max_restarts: usize,
    rng: ChaCha8Rng,
    basis: Columns,
    images: Columns,
    /// Columns of the projected matrix, `proj[j][i] = ⟨v_i, A v_j⟩` for `i ≤ j`.
    proj: Vec<Vec<Complex64>>,
}

impl<'a> BlockLanczos<'a> {
    fn new(a: &'a ManyBodyOperator, count: usize, opts: &SolverOptions) -> Self {
        let dim = a.geometry().dim();
        let block = opts.block_size.clamp(1, dim);
        let capacity = opts.max_basis.unwrap_or(4 * count + 4 * block).max(count + 2 * block).min(dim);
        let keep = (count + block).min(capacity.saturating_sub(block)).max(count.min(capacity));
        Self {
            a,
            count,
            tol: opts.tol,
            block,
            capacity,
            keep,
            max_restarts: opts.max_restarts,
            rng: ChaCha8Rng::seed_from_u64(opts.seed),
            basis: Columns::new(dim),
            images: Columns::new(dim),
            proj: Vec::new(),
        }
    }

    fn dim(&self) -> usize {
        self.a.geometry().dim()
    }

    fn random_block(&mut self, cols: usize) -> Columns {
        let mut out = Columns::new(self.dim());
        for _ in 0..cols {
            out.push(&random_amplitudes(self.dim(), &mut self.rng));
        }
        out
    }

    /// Orthonormalize a candidate block against the basis and within
    /// itself, two classical Gram–Schmidt passes each. Candidates that lose
    /// all but `RANK_FLOOR` of their norm are dropped.
    fn orthonormalize(&self, mut block: Columns) -> Columns {
        let start: Vec<f64> = (0..block.len()).map(|j| norm(block.col(j))).collect();
        if self.basis.len() > 0 {
            for _ in 0..2 {
                let c = adjoint_product(self.basis.view(), block.view());
                matmul(block.view_mut(), Accum::Add, self.basis.view(), c.as_ref(), Complex64::new(-1.0, 0.0), parallelism());
            }
        }
        let mut accepted = Columns::new(self.dim());
        for (j, &s0) in start.iter().enumerate() {
            if s0 == 0.0 {
                continue;
            }
            let mut w = block.col(j).to_vec();
            for _ in 0..2 {
                for i in 0..accepted.len() {
                    let v = accepted.col(i);
                    let c = inner(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                }
            }
            let end = norm(&w);
            if end < RANK_FLOOR * s0 {
                continue;
            }
            w.iter_mut().for_each(|z| *z /= end);
            accepted.push(&w);
        }
        accepted
    }

    /// Add orthonormal vectors with their images and projected columns.
    fn append(&mut self, vectors: Columns) {
        let images = vectors.mapped(self.a);
        let first = self.basis.len();
        self.basis.data.extend_from_slice(&vectors.data);
        let g = adjoint_product(self.basis.view(), images.view());
        for j in 0..images.len() {
            self.proj.push((0..=first + j).map(|i| g[(i, j)]).collect());
        }
        self.images.data.extend_from_slice(&images.data);
    }

    /// Append the orthonormalized candidates, refilling dependent ones with
    /// random directions. Returns how many vectors were added.
    fn extend(&mut self, mut candidates: Columns) -> usize {
        let room = self.capacity.min(self.dim()).saturating_sub(self.basis.len());
        candidates.truncate(room);
        let wanted = candidates.len();
        let accepted = self.orthonormalize(candidates);
        let mut added = accepted.len();
        self.append(accepted);
        let mut attempts = 0;
        while added < wanted && attempts < 3 {
            let fresh = self.random_block(wanted - added);
            let accepted = self.orthonormalize(fresh);
            added += accepted.len();
            self.append(accepted);
            attempts += 1;
        }
        added
    }

    fn projected(&self) -> Matrix {
        let m = self.basis.len();
        let mut h = Matrix::zeros(m, m);
        for (j, col) in self.proj.iter().enumerate() {
            for (i, z) in col.iter().enumerate() {
                h[(i, j)] = *z;
                h[(j, i)] = z.conj();
            }
            h[(j, j)] = Complex64::new(col[j].re, 0.0);
        }
        h
    }

    fn run(mut self) -> Result<Vec<EigenPair>> {
        let dim = self.dim();
        let start = self.random_block(self.block);
        self.extend(start);
        let mut last_block = self.basis.len();
        let mut best = f64::INFINITY;
        for restart in 0..=self.max_restarts {
            while self.basis.len() < self.capacity {
                let from = self.basis.len() - last_block;
                let mut candidates = Columns::new(dim);
                for j in from..self.basis.len() {
                    candidates.push(self.images.col(j));
                }
                last_block = self.extend(candidates);
                if last_block == 0 {
                    break;
                }
            }

            let (values, vectors) = sorted_eigen(&self.projected())?;
            let keep = self.keep.min(values.len());
            let y = Mat::from_fn(vectors.nrows(), keep, |i, j| vectors[(i, j)]);
            let ritz = combine(&self.basis, y.as_ref());
            // Fresh images keep the residuals exact; recombined ones drift
            // by rounding at every restart.
            let ritz_images = ritz.mapped(self.a);
            let mut residuals = Columns { dim, data: ritz_images.data.clone() };
            for k in 0..keep {
                let theta = values[k];
                let x = ritz.col(k);
                residuals.col_mut(k).iter_mut().zip(x).for_each(|(r, v)| *r -= v * theta);
            }
            let rnorms: Vec<f64> = (0..keep).map(|k| norm(residuals.col(k))).collect();
            let converged = rnorms[..self.count].iter().take_while(|&&r| r < self.tol).count();
            let full_space = self.basis.len() == dim;
            if converged == self.count || full_space {
                return (0..self.count)
                    .map(|k| {
                        Ok(EigenPair {
                            energy: values[k],
                            vector: StateVector::from_amplitudes(self.a.geometry(), ritz.col(k).to_vec())?,
                            residual: rnorms[k],
                        })
                    })
                    .collect();
            }
            best = best.min(rnorms[converged]);
            if restart == self.max_restarts {
                return Err(Error::Convergence {
                    restarts: restart,
                    converged,
                    requested: self.count,
                    best_residual: best,
                });
            }

            // Thick restart: Ritz vectors become the basis, their residual
            // block continues the Krylov sequence.
            self.basis = ritz;
            self.images = ritz_images;
            let g = adjoint_product(self.basis.view(), self.images.view());
            self.proj = (0..keep).map(|j| (0..=j).map(|i| g[(i, j)]).collect()).collect();
            let mut order: Vec<usize> = (converged..keep).collect();
            order.extend(0..converged);
            let mut candidates = Columns::new(dim);
            for k in order.into_iter().take(self.block) {
                candidates.push(residuals.col(k));
            }
            last_block = self.extend(candidates);
            if last_block == 0 {
                let fresh = self.random_block(self.block);
                last_block = self.extend(fresh);
            }
        }
        unreachable!("restart loop returns")
    }
}
