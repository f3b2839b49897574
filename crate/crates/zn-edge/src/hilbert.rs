//! Configuration space of the periodic `M`-site chain and matrix-free
//! operators on it.
//!
//! Sites are indexed `0..M` in code. Site `0` is the least significant
//! base-`N` digit of a configuration index, so
//! `index = Σ_s digit_s · N^s`. The translation `T` satisfies
//! `T† X_s T = X_{s+1}` for every site operator `X`, which on configurations
//! reads `T|c_0, c_1, …, c_{M-1}⟩ = |c_1, …, c_{M-1}, c_0⟩`.

use num_complex::Complex64;
use rand::Rng;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clock_algebra::{Matrix, SiteOperator, ZERO};
use crate::error::{Error, Result};

/// Largest dimension accepted by [`ManyBodyOperator::dense_materialize`].
pub const DENSE_GUARD: usize = 4096;

/// Matrix entries below this fraction of the largest entry are dropped when
/// a kernel is compiled for application.
const SPARSITY_CUTOFF: f64 = 1e-15;

/// Rows per parallel work unit in summed matvecs.
const PAR_CHUNK: usize = 2048;

/// Sums are assembled into a sparse row matrix on first use while the
/// estimated entry count stays below this bound (about 20 bytes per entry).
pub const ASSEMBLY_LIMIT: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainGeometry {
    n: usize,
    m: usize,
    dim: usize,
}

impl ChainGeometry {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("local dimension N = {n} must be at least 2")));
        }
        if m < 2 {
            return Err(Error::InvalidParameter(format!("ring needs at least 2 sites, got M = {m}")));
        }
        let dim = u32::try_from(m)
            .ok()
            .and_then(|e| n.checked_pow(e))
            .ok_or_else(|| Error::InvalidParameter(format!("N^M overflows for N = {n}, M = {m}")))?;
        Ok(Self { n, m, dim })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sites(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stride(&self, site: usize) -> usize {
        self.n.pow(site as u32)
    }

    /// Site `site + offset` on the ring.
    pub fn neighbour(&self, site: usize, offset: isize) -> usize {
        (site as isize + offset).rem_euclid(self.m as isize) as usize
    }

    pub fn digit(&self, index: usize, site: usize) -> usize {
        (index / self.stride(site)) % self.n
    }

    pub fn encode(&self, config: &[usize]) -> Result<usize> {
        if config.len() != self.m {
            return Err(Error::InvalidConfiguration(format!(
                "configuration has {} digits, chain has {} sites",
                config.len(),
                self.m
            )));
        }
        let mut index = 0;
        for (s, &d) in config.iter().enumerate().rev() {
            if d >= self.n {
                return Err(Error::InvalidConfiguration(format!("digit {d} at site {s} is not below N = {}", self.n)));
            }
            index = index * self.n + d;
        }
        Ok(index)
    }

    pub fn decode(&self, index: usize) -> Result<Vec<usize>> {
        if index >= self.dim {
            return Err(Error::InvalidConfiguration(format!("index {index} outside 0..{}", self.dim)));
        }
        let mut rest = index;
        Ok((0..self.m)
            .map(|_| {
                let d = rest % self.n;
                rest /= self.n;
                d
            })
            .collect())
    }

    /// Index of `T^{-shift}` applied to configuration `index`, i.e. the
    /// source configuration that `T^shift` carries onto `index`.
    fn translation_source(&self, index: usize, shift: usize) -> usize {
        if shift == 0 {
            return index;
        }
        let low = self.n.pow((self.m - shift) as u32);
        (index % low) * self.n.pow(shift as u32) + index / low
    }

    fn check(&self, other: &ChainGeometry) -> Result<()> {
        if self != other {
            return Err(Error::Dimension(format!(
                "geometry (N={}, M={}) does not match (N={}, M={})",
                self.n, self.m, other.n, other.m
            )));
        }
        Ok(())
    }
}

pub fn encode(geometry: &ChainGeometry, config: &[usize]) -> Result<usize> {
    geometry.encode(config)
}

pub fn decode(geometry: &ChainGeometry, index: usize) -> Result<Vec<usize>> {
    geometry.decode(index)
}

/// `Σ conj(a_i) b_i`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Amplitudes with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_amplitudes<R: Rng>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    geometry: ChainGeometry,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(geometry: &ChainGeometry) -> Self {
        Self { geometry: geometry.clone(), amplitudes: vec![ZERO; geometry.dim()] }
    }

    pub fn basis(geometry: &ChainGeometry, index: usize) -> Result<Self> {
        if index >= geometry.dim() {
            return Err(Error::InvalidConfiguration(format!("index {index} outside 0..{}", geometry.dim())));
        }
        let mut v = Self::zeros(geometry);
        v.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn from_amplitudes(geometry: &ChainGeometry, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != geometry.dim() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                geometry.dim()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("state amplitudes must be finite".into()));
        }
        Ok(Self { geometry: geometry.clone(), amplitudes })
    }

    /// Random unit vector.
    pub fn random<R: Rng>(geometry: &ChainGeometry, rng: &mut R) -> Self {
        let mut v = Self { geometry: geometry.clone(), amplitudes: random_amplitudes(geometry.dim(), rng) };
        v.normalize();
        v
    }

    pub fn geometry(&self) -> &ChainGeometry {
        &self.geometry
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes.iter_mut().for_each(|z| *z /= n);
        }
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Dense operator on 1 to 3 cyclically adjacent sites. The local index of a
/// support configuration is `Σ_a d_{support[a]} N^a`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalKernel {
    n: usize,
    support: Vec<usize>,
    matrix: Matrix,
    hermitian: bool,
}

impl LocalKernel {
    pub fn new(n: usize, support: Vec<usize>, matrix: Matrix) -> Result<Self> {
        if support.is_empty() || support.len() > 3 {
            return Err(Error::InvalidParameter(format!("kernel support must span 1 to 3 sites, got {}", support.len())));
        }
        let d = n.pow(support.len() as u32);
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension(format!(
                "kernel on {} sites needs a {d}x{d} matrix, got {}x{}",
                support.len(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { n, support, matrix, hermitian: false })
    }

    /// Kernel flagged Hermitian; rejects matrices with `‖K − K†‖ ≥ 1e-12`.
    pub fn new_hermitian(n: usize, support: Vec<usize>, matrix: Matrix) -> Result<Self> {
        let mut k = Self::new(n, support, matrix)?;
        let dev = (&k.matrix - k.matrix.adjoint()).norm();
        if dev >= 1e-12 {
            return Err(Error::Contract(format!("kernel flagged Hermitian deviates by {dev:.3e}")));
        }
        k.hermitian = true;
        Ok(k)
    }

    pub fn single_site(op: &SiteOperator, site: usize) -> Self {
        Self { n: op.dim(), support: vec![site], matrix: op.matrix().clone(), hermitian: false }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.matrix.nrows();
        (0..d).all(|r| (0..d).all(|c| r == c || self.matrix[(r, c)] == ZERO))
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), ..self.clone() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { matrix: &self.matrix * Complex64::new(c, 0.0), ..self.clone() }
    }

    /// Same matrix placed on consecutive sites starting at `first`.
    pub fn relocated(&self, first: usize, sites: usize) -> Self {
        let support = (0..self.support.len()).map(|a| (first + a) % sites).collect();
        Self { support, ..self.clone() }
    }

    fn validate(&self, geometry: &ChainGeometry) -> Result<()> {
        if self.n != geometry.n() {
            return Err(Error::Dimension(format!("kernel has N = {}, chain has N = {}", self.n, geometry.n())));
        }
        if self.support.len() > geometry.sites() {
            return Err(Error::Dimension(format!(
                "kernel spans {} sites on a ring of {}",
                self.support.len(),
                geometry.sites()
            )));
        }
        for (a, &s) in self.support.iter().enumerate() {
            if s >= geometry.sites() {
                return Err(Error::Dimension(format!("site {s} outside ring of {}", geometry.sites())));
            }
            if a > 0 && s != geometry.neighbour(self.support[a - 1], 1) {
                return Err(Error::Dimension(format!("kernel support {:?} is not cyclically adjacent", self.support)));
            }
        }
        Ok(())
    }
}

/// Kernel prepared for gather-style application.
#[derive(Debug, Clone)]
struct CompiledKernel {
    n: usize,
    strides: Vec<usize>,
    /// For each local output configuration, the nonzero `(input offset, value)` pairs.
    rows: Vec<Vec<(usize, Complex64)>>,
    diagonal: Option<Vec<Complex64>>,
}

impl CompiledKernel {
    fn new(k: &LocalKernel, geometry: &ChainGeometry) -> Self {
        let n = k.n;
        let strides: Vec<usize> = k.support.iter().map(|&s| geometry.stride(s)).collect();
        let d = k.matrix.nrows();
        let offset = |local: usize| {
            let mut rest = local;
            strides.iter().fold(0, |acc, &st| {
                let digit = rest % n;
                rest /= n;
                acc + digit * st
            })
        };
        let scale = k.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let cutoff = SPARSITY_CUTOFF * scale;
        let rows = (0..d)
            .map(|r| {
                (0..d)
                    .filter(|&c| k.matrix[(r, c)].norm() > cutoff)
                    .map(|c| (offset(c), k.matrix[(r, c)]))
                    .collect()
            })
            .collect();
        let diagonal = k.is_diagonal().then(|| (0..d).map(|r| k.matrix[(r, r)]).collect());
        Self { n, strides, rows, diagonal }
    }

    /// Local output configuration and the index with the support digits cleared.
    #[inline]
    fn split(&self, index: usize) -> (usize, usize) {
        let mut local = 0;
        let mut base = index;
        let mut place = 1;
        for &st in &self.strides {
            let digit = (index / st) % self.n;
            local += digit * place;
            base -= digit * st;
            place *= self.n;
        }
        (local, base)
    }

    fn widest_row(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    #[inline]
    fn gather(&self, v: &[Complex64], index: usize) -> Complex64 {
        let (local, base) = self.split(index);
        self.rows[local].iter().fold(ZERO, |acc, &(off, val)| acc + val * v[base + off])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Kernel(LocalKernel),
    /// `T^k`.
    Translation(i64),
}

/// Compressed sparse rows of an assembled sum.
#[derive(Debug, Clone)]
struct SparseRows {
    offsets: Vec<usize>,
    columns: Vec<u32>,
    values: Vec<Complex64>,
}

impl SparseRows {
    fn assemble(kernels: &[&CompiledKernel], dim: usize) -> Self {
        let rows: Vec<Vec<(u32, Complex64)>> = (0..dim)
            .into_par_iter()
            .with_min_len(PAR_CHUNK)
            .map(|i| {
                let mut row: Vec<(u32, Complex64)> = Vec::new();
                for k in kernels {
                    let (local, base) = k.split(i);
                    row.extend(k.rows[local].iter().map(|&(off, val)| ((base + off) as u32, val)));
                }
                row.sort_unstable_by_key(|e| e.0);
                row.dedup_by(|b, a| {
                    if a.0 == b.0 {
                        a.1 += b.1;
                        true
                    } else {
                        false
                    }
                });
                row
            })
            .collect();
        let mut offsets = Vec::with_capacity(dim + 1);
        offsets.push(0);
        let total: usize = rows.iter().map(Vec::len).sum();
        let mut columns = Vec::with_capacity(total);
        let mut values = Vec::with_capacity(total);
        for row in rows {
            for (c, v) in row {
                columns.push(c);
                values.push(v);
            }
            offsets.push(columns.len());
        }
        Self { offsets, columns, values }
    }

    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.par_chunks_mut(PAR_CHUNK).enumerate().for_each(|(c, chunk)| {
            for (offset, slot) in chunk.iter_mut().enumerate() {
                let i = c * PAR_CHUNK + offset;
                let range = self.offsets[i]..self.offsets[i + 1];
                *slot = self.columns[range.clone()]
                    .iter()
                    .zip(&self.values[range])
                    .fold(ZERO, |acc, (&j, val)| acc + val * v[j as usize]);
            }
        });
    }
}

#[derive(Debug, Clone)]
enum Compiled {
    Kernel(CompiledKernel),
    Translation(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    /// `Σ_t K_t`.
    Sum(Vec<LocalKernel>),
    /// `F_0 F_1 ⋯ F_{r-1}`; the last factor acts first.
    Product(Vec<Factor>),
}

/// Matrix-free operator on the chain.
#[derive(Debug, Clone)]
pub struct ManyBodyOperator {
    geometry: ChainGeometry,
    form: Form,
    compiled: Vec<Compiled>,
    assembled: OnceLock<Option<SparseRows>>,
}

impl ManyBodyOperator {
    pub fn sum(geometry: &ChainGeometry, terms: Vec<LocalKernel>) -> Result<Self> {
        let mut compiled = Vec::with_capacity(terms.len());
        for t in &terms {
            t.validate(geometry)?;
            compiled.push(Compiled::Kernel(CompiledKernel::new(t, geometry)));
        }
        Ok(Self { geometry: geometry.clone(), form: Form::Sum(terms), compiled, assembled: OnceLock::new() })
    }

    pub fn product(geometry: &ChainGeometry, factors: Vec<Factor>) -> Result<Self> {
        let mut compiled = Vec::with_capacity(factors.len());
        for f in &factors {
            compiled.push(match f {
                Factor::Kernel(k) => {
                    k.validate(geometry)?;
                    Compiled::Kernel(CompiledKernel::new(k, geometry))
                }
                Factor::Translation(k) => Compiled::Translation(k.rem_euclid(geometry.sites() as i64) as usize),
            });
        }
        Ok(Self { geometry: geometry.clone(), form: Form::Product(factors), compiled, assembled: OnceLock::new() })
    }

    pub fn identity(geometry: &ChainGeometry) -> Self {
        Self::product(geometry, Vec::new()).expect("empty product is always valid")
    }

    pub fn translation(geometry: &ChainGeometry) -> Self {
        Self::product(geometry, vec![Factor::Translation(1)]).expect("translation is always valid")
    }

    pub fn geometry(&self) -> &ChainGeometry {
        &self.geometry
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn terms(&self) -> &[LocalKernel] {
        match &self.form {
            Form::Sum(t) => t,
            Form::Product(_) => &[],
        }
    }

    pub fn factors(&self) -> &[Factor] {
        match &self.form {
            Form::Product(f) => f,
            Form::Sum(_) => &[],
        }
    }

    pub fn adjoint(&self) -> Self {
        match &self.form {
            Form::Sum(terms) => Self::sum(&self.geometry, terms.iter().map(LocalKernel::adjoint).collect()),
            Form::Product(factors) => Self::product(
                &self.geometry,
                factors
                    .iter()
                    .rev()
                    .map(|f| match f {
                        Factor::Kernel(k) => Factor::Kernel(k.adjoint()),
                        Factor::Translation(k) => Factor::Translation(-k),
                    })
                    .collect(),
            ),
        }
        .expect("adjoint preserves validity")
    }

    /// Concatenated product `self · other`; both must be products.
    pub fn then_after(&self, other: &ManyBodyOperator) -> Result<Self> {
        self.geometry.check(&other.geometry)?;
        match (&self.form, &other.form) {
            (Form::Product(a), Form::Product(b)) => {
                Self::product(&self.geometry, a.iter().chain(b.iter()).cloned().collect())
            }
            _ => Err(Error::Contract("only product-form operators can be concatenated".into())),
        }
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.geometry.check(v.geometry())?;
        let mut out = vec![ZERO; self.geometry.dim()];
        self.apply_into(v.amplitudes(), &mut out);
        Ok(StateVector { geometry: self.geometry.clone(), amplitudes: out })
    }

    /// `out = A v`. Panics if the slices do not have length `dim`.
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        let dim = self.geometry.dim();
        assert_eq!(v.len(), dim, "input length");
        assert_eq!(out.len(), dim, "output length");
        match &self.form {
            Form::Sum(_) => self.apply_sum(v, out),
            Form::Product(_) => self.apply_product(v, out),
        }
    }

    fn sum_kernels(&self) -> Vec<&CompiledKernel> {
        self.compiled
            .iter()
            .map(|c| match c {
                Compiled::Kernel(k) => k,
                Compiled::Translation(_) => unreachable!("sums hold kernels only"),
            })
            .collect()
    }

    fn apply_sum(&self, v: &[Complex64], out: &mut [Complex64]) {
        let kernels = self.sum_kernels();
        let assembled = self.assembled.get_or_init(|| {
            let estimate: usize = kernels.iter().map(|k| k.widest_row()).sum::<usize>() * v.len();
            (estimate <= ASSEMBLY_LIMIT && v.len() <= u32::MAX as usize).then(|| SparseRows::assemble(&kernels, v.len()))
        });
        if let Some(rows) = assembled {
            rows.apply(v, out);
            return;
        }
        let fill = |start: usize, chunk: &mut [Complex64]| {
            for (offset, slot) in chunk.iter_mut().enumerate() {
                let i = start + offset;
                *slot = kernels.iter().fold(ZERO, |acc, k| acc + k.gather(v, i));
            }
        };
        if out.len() <= PAR_CHUNK {
            fill(0, out);
        } else {
            out.par_chunks_mut(PAR_CHUNK)
                .enumerate()
                .for_each(|(c, chunk)| fill(c * PAR_CHUNK, chunk));
        }
    }

    fn apply_product(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(v);
        let mut scratch = vec![ZERO; v.len()];
        for c in self.compiled.iter().rev() {
            match c {
                Compiled::Kernel(k) => {
                    if let Some(diag) = &k.diagonal {
                        for (i, z) in out.iter_mut().enumerate() {
                            *z *= diag[k.split(i).0];
                        }
                    } else {
                        for (i, slot) in scratch.iter_mut().enumerate() {
                            *slot = k.gather(out, i);
                        }
                        out.copy_from_slice(&scratch);
                    }
                }
                Compiled::Translation(shift) => {
                    for (j, slot) in scratch.iter_mut().enumerate() {
                        *slot = out[self.geometry.translation_source(j, *shift)];
                    }
                    out.copy_from_slice(&scratch);
                }
            }
        }
    }

    /// Full matrix, column `c` being the image of basis state `c`.
    pub fn dense_materialize(&self) -> Result<Matrix> {
        let dim = self.geometry.dim();
        if dim > DENSE_GUARD {
            return Err(Error::DenseGuard { dim, limit: DENSE_GUARD });
        }
        let mut m = Matrix::zeros(dim, dim);
        let mut e = vec![ZERO; dim];
        let mut col = vec![ZERO; dim];
        for c in 0..dim {
            e[c] = Complex64::new(1.0, 0.0);
            self.apply_into(&e, &mut col);
            e[c] = ZERO;
            for (r, z) in col.iter().enumerate() {
                m[(r, c)] = *z;
            }
        }
        Ok(m)
    }

    /// Largest `|⟨u|Av⟩ − conj(⟨v|Au⟩)|` over random unit pairs.
    pub fn hermiticity_defect<R: Rng>(&self, trials: usize, rng: &mut R) -> f64 {
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let u = StateVector::random(&self.geometry, rng);
            let v = StateVector::random(&self.geometry, rng);
            let au = self.apply(&u).expect("geometry matches");
            let av = self.apply(&v).expect("geometry matches");
            worst = worst.max((u.inner(&av) - v.inner(&au).conj()).norm());
        }
        worst
    }
}

pub fn apply_kernel(k: &LocalKernel, v: &StateVector) -> Result<StateVector> {
    ManyBodyOperator::product(v.geometry(), vec![Factor::Kernel(k.clone())])?.apply(v)
}

pub fn apply_translation(v: &StateVector) -> StateVector {
    ManyBodyOperator::translation(v.geometry()).apply(v).expect("geometry matches")
}

pub fn dense_materialize(a: &ManyBodyOperator) -> Result<Matrix> {
    a.dense_materialize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock_algebra::{sigma, tau, ONE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn encoding_examples() {
        let g = ChainGeometry::new(2, 3).unwrap();
        assert_eq!(g.encode(&[0, 1, 0]).unwrap(), 2);
        let g = ChainGeometry::new(3, 2).unwrap();
        assert_eq!(g.encode(&[2, 1]).unwrap(), 5);
        assert!(g.encode(&[3, 0]).is_err());
        assert!(g.encode(&[0]).is_err());
        assert!(ChainGeometry::new(2, 1).is_err());
        assert!(ChainGeometry::new(2, 200).is_err());
    }

    #[test]
    fn encode_decode_bijection() {
        for (n, m) in [(2, 4), (3, 3), (4, 2)] {
            let g = ChainGeometry::new(n, m).unwrap();
            for i in 0..g.dim() {
                assert_eq!(g.encode(&g.decode(i).unwrap()).unwrap(), i);
            }
        }
    }

    #[test]
    fn translation_moves_digits_down() {
        let g = ChainGeometry::new(3, 4).unwrap();
        let c = [1, 2, 0, 1];
        let v = StateVector::basis(&g, g.encode(&c).unwrap()).unwrap();
        let w = apply_translation(&v);
        let target = g.encode(&[2, 0, 1, 1]).unwrap();
        assert_eq!(w.amplitudes()[target], ONE);
    }

    #[test]
    fn translation_twice_on_two_sites_is_identity() {
        let g = ChainGeometry::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = StateVector::random(&g, &mut rng);
        let w = apply_translation(&apply_translation(&v));
        assert!(w.distance(&v) < 1e-15);
    }

    #[test]
    fn translation_powers() {
        let g = ChainGeometry::new(2, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = StateVector::random(&g, &mut rng);
        let t3 = ManyBodyOperator::product(&g, vec![Factor::Translation(3)]).unwrap();
        let mut w = v.clone();
        for _ in 0..3 {
            w = apply_translation(&w);
        }
        assert!(t3.apply(&v).unwrap().distance(&w) < 1e-15);
        let t_inv = ManyBodyOperator::translation(&g).adjoint();
        assert!(t_inv.apply(&apply_translation(&v)).unwrap().distance(&v) < 1e-15);
    }

    #[test]
    fn sigma_on_first_site() {
        let g = ChainGeometry::new(2, 2).unwrap();
        let k = LocalKernel::single_site(&sigma(2).unwrap(), 0);
        let a = ManyBodyOperator::sum(&g, vec![k]).unwrap();
        let d = a.dense_materialize().unwrap();
        let expect = [1.0, -1.0, 1.0, -1.0];
        for r in 0..4 {
            for c in 0..4 {
                let e = if r == c { expect[r] } else { 0.0 };
                assert_eq!(d[(r, c)], Complex64::new(e, 0.0));
            }
        }
    }

    #[test]
    fn diagonal_action_on_basis_state() {
        let g = ChainGeometry::new(3, 3).unwrap();
        let k = LocalKernel::single_site(&sigma(3).unwrap(), 0);
        for digit in 0..3 {
            let idx = g.encode(&[digit, 1, 2]).unwrap();
            let v = StateVector::basis(&g, idx).unwrap();
            let w = apply_kernel(&k, &v).unwrap();
            let w_expect = crate::clock_algebra::root_of_unity(3, digit as i64);
            assert!((w.amplitudes()[idx] - w_expect).norm() < 1e-15);
        }
    }

    #[test]
    fn kernel_support_validation() {
        let g = ChainGeometry::new(2, 4).unwrap();
        let m = Matrix::identity(4, 4);
        let ok = LocalKernel::new(2, vec![3, 0], m.clone()).unwrap();
        assert!(ManyBodyOperator::sum(&g, vec![ok]).is_ok());
        let bad = LocalKernel::new(2, vec![0, 2], m.clone()).unwrap();
        assert!(ManyBodyOperator::sum(&g, vec![bad]).is_err());
        assert!(LocalKernel::new(2, vec![0, 1, 2], m).is_err());
        let t = tau(2).unwrap();
        let flagged = LocalKernel::new_hermitian(2, vec![1], t.matrix().clone());
        assert!(flagged.unwrap().is_hermitian());
    }

    #[test]
    fn dense_guard() {
        let g = ChainGeometry::new(2, 13).unwrap();
        let a = ManyBodyOperator::identity(&g);
        assert!(matches!(a.dense_materialize(), Err(Error::DenseGuard { .. })));
    }
}
