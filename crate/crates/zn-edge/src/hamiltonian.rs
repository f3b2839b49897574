//! Edge Hamiltonians built from symmetrized local terms.
//!
//! The local term is `h_j = −Σ_{ℓ=0}^{N−1} S^{−ℓ}(τ_j + τ_j†)S^ℓ`. The
//! onsite string `Πτ` commutes with every domain-wall factor (each depends on
//! a difference of neighbouring digits), so `S^ℓ = (Πτ)^ℓ D^ℓ` with `D` the
//! product of all `U`'s. Only the two bonds touching `j` fail to commute with
//! `τ_j`, which confines `h_j` to sites `{j−1, j, j+1}`.
//!
//! The twisted Hamiltonian replaces the two terms next to the flux:
//! `h̃_1 = τ†_1τ†_2 h_1 τ_1τ_2` and `h̃_M = τ†_1 U^{−1}_{M,1} h_M U_{M,1} τ_1`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clock_algebra::{kron_local, tau, Matrix, ONE};
use crate::error::{Error, Result};
use crate::hilbert::{ChainGeometry, LocalKernel, ManyBodyOperator, StateVector};
use crate::symmetry::{domain_wall_kernel, q_polynomial, DomainWallPolynomial, SptClass};

/// Couplings quoted with the published spectra, keyed by `(N, p, M)`.
pub fn published_lambda(class: SptClass, sites: usize) -> Option<f64> {
    match (class.n(), class.p(), sites) {
        (2, 1, 20) => Some(0.82),
        (3, 1 | 2, 12) => Some(0.26),
        _ => None,
    }
}

/// Energy unit of the hand-expanded Z_2 and Z_3 closed forms, in units of
/// the symmetrized construction. For `N = 2` the shift is self-adjoint and
/// `τ + τ† = 2σ_x` doubles every term; for larger `N` the two agree.
pub fn closed_form_energy_unit(n: usize) -> f64 {
    if n == 2 {
        2.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeModel {
    class: SptClass,
    sites: usize,
    lambda: f64,
    twisted: bool,
    polynomial: DomainWallPolynomial,
}

impl EdgeModel {
    pub fn new(class: SptClass, sites: usize, lambda: f64, twisted: bool) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("coupling λ = {lambda} must be positive")));
        }
        if sites < 3 {
            return Err(Error::InvalidParameter(format!(
                "local terms span three sites; need M >= 3, got {sites}"
            )));
        }
        ChainGeometry::new(class.n(), sites)?;
        Ok(Self { class, sites, lambda, twisted, polynomial: q_polynomial(class) })
    }

    /// Replace the domain-wall polynomial (another gauge, or a corrupted one
    /// for fault injection).
    pub fn with_polynomial(mut self, polynomial: DomainWallPolynomial) -> Result<Self> {
        if polynomial.class() != self.class {
            return Err(Error::InvalidParameter("polynomial belongs to a different class".into()));
        }
        self.polynomial = polynomial;
        Ok(self)
    }

    pub fn class(&self) -> SptClass {
        self.class
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn twisted(&self) -> bool {
        self.twisted
    }

    pub fn polynomial(&self) -> &DomainWallPolynomial {
        &self.polynomial
    }

    pub fn geometry(&self) -> ChainGeometry {
        ChainGeometry::new(self.class.n(), self.sites).expect("validated at construction")
    }

    pub fn build(&self) -> Result<ManyBodyOperator> {
        if self.twisted {
            build_twisted_hamiltonian(self)
        } else {
            build_hamiltonian(self)
        }
    }
}

/// Diagonal of a bond factor placed on local positions `(a, a + 1)` of a
/// three-site neighbourhood.
fn bond_on_triple(bond: &LocalKernel, a: usize, n: usize) -> Vec<Complex64> {
    let d3 = n * n * n;
    (0..d3)
        .map(|i| {
            let digits = [i % n, (i / n) % n, i / (n * n)];
            bond.matrix()[(digits[a] + n * digits[a + 1], digits[a] + n * digits[a + 1])]
        })
        .collect()
}

fn diagonal_matrix(d: &[Complex64]) -> Matrix {
    Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(d))
}

fn local_term_matrix(poly: &DomainWallPolynomial) -> Matrix {
    let n = poly.class().n();
    let u = domain_wall_kernel(poly);
    let left = bond_on_triple(&u, 0, n);
    let right = bond_on_triple(&u, 1, n);
    let string: Vec<Complex64> = left.iter().zip(&right).map(|(a, b)| a * b).collect();
    let t = tau(n).expect("valid group order").into_matrix();
    let id = Matrix::identity(n, n);
    let shift = kron_local(&[id.clone(), &t + t.adjoint(), id]);
    let d3 = n * n * n;
    let mut h = Matrix::zeros(d3, d3);
    for r in 0..d3 {
        for c in 0..d3 {
            if shift[(r, c)] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = string[r].conj() * string[c];
            let mut acc = Complex64::new(0.0, 0.0);
            let mut pw = ONE;
            for _ in 0..n {
                acc += pw;
                pw *= ratio;
            }
            h[(r, c)] = -shift[(r, c)] * acc;
        }
    }
    // The ℓ-sum is Hermitian in exact arithmetic; remove rounding asymmetry.
    (&h + h.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `h_j` on local sites `[j−1, j, j+1]` (support `[0, 1, 2]`), without `λ`.
pub fn local_term_kernel(class: SptClass) -> LocalKernel {
    local_term_kernel_from(&q_polynomial(class))
}

pub fn local_term_kernel_from(poly: &DomainWallPolynomial) -> LocalKernel {
    let n = poly.class().n();
    LocalKernel::new_hermitian(n, vec![0, 1, 2], local_term_matrix(poly)).expect("symmetrized term is Hermitian")
}

fn conjugated(h: &Matrix, a: &Matrix) -> Matrix {
    a.adjoint() * h * a
}

/// `h̃_1 = τ†_1τ†_2 h_1 τ_1τ_2`, support `[M−1, 0, 1]` as local `[0, 1, 2]`.
pub fn twisted_first_kernel(poly: &DomainWallPolynomial) -> LocalKernel {
    let n = poly.class().n();
    let h = local_term_matrix(poly);
    let t = tau(n).expect("valid group order").into_matrix();
    let a = kron_local(&[Matrix::identity(n, n), t.clone(), t]);
    let m = conjugated(&h, &a);
    LocalKernel::new_hermitian(n, vec![0, 1, 2], (&m + m.adjoint()) * Complex64::new(0.5, 0.0))
        .expect("unitary conjugate of a Hermitian term")
}

/// `h̃_M = τ†_1 U^{−1}_{M,1} h_M U_{M,1} τ_1`, support `[M−2, M−1, 0]` as local `[0, 1, 2]`.
pub fn twisted_last_kernel(poly: &DomainWallPolynomial) -> LocalKernel {
    let n = poly.class().n();
    let h = local_term_matrix(poly);
    let u = diagonal_matrix(&bond_on_triple(&domain_wall_kernel(poly), 1, n));
    let t = tau(n).expect("valid group order").into_matrix();
    let t1 = kron_local(&[Matrix::identity(n, n), Matrix::identity(n, n), t]);
    let m = conjugated(&h, &(u * t1));
    LocalKernel::new_hermitian(n, vec![0, 1, 2], (&m + m.adjoint()) * Complex64::new(0.5, 0.0))
        .expect("unitary conjugate of a Hermitian term")
}

pub fn build_hamiltonian(model: &EdgeModel) -> Result<ManyBodyOperator> {
    if model.twisted {
        return Err(Error::InvalidParameter("model is twisted; use build_twisted_hamiltonian".into()));
    }
    let m = model.sites;
    let h = local_term_kernel_from(&model.polynomial).scaled(model.lambda);
    let terms = (0..m).map(|j| h.relocated((j + m - 1) % m, m)).collect();
    ManyBodyOperator::sum(&model.geometry(), terms)
}

pub fn build_twisted_hamiltonian(model: &EdgeModel) -> Result<ManyBodyOperator> {
    if !model.twisted {
        return Err(Error::InvalidParameter("model is untwisted; use build_hamiltonian".into()));
    }
    let m = model.sites;
    let poly = &model.polynomial;
    let h = local_term_kernel_from(poly).scaled(model.lambda);
    let mut terms = Vec::with_capacity(m);
    terms.push(twisted_first_kernel(poly).scaled(model.lambda).relocated(m - 1, m));
    for j in 1..m - 1 {
        terms.push(h.relocated(j - 1, m));
    }
    terms.push(twisted_last_kernel(poly).scaled(model.lambda).relocated(m - 2, m));
    ManyBodyOperator::sum(&model.geometry(), terms)
}

/// `max ‖ABv − BAv‖` over `trials` random unit vectors.
pub fn commutator_residual(
    a: &ManyBodyOperator,
    b: &ManyBodyOperator,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if a.geometry() != b.geometry() {
        return Err(Error::Dimension("operators act on different chains".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let v = StateVector::random(a.geometry(), &mut rng);
        let abv = a.apply(&b.apply(&v)?)?;
        let bav = b.apply(&a.apply(&v)?)?;
        worst = worst.max(abv.distance(&bav));
    }
    Ok(worst)
}
