//! Non-onsite Z_N symmetry of the edge chain.
//!
//! For a class `p` the symmetry is `S = (Π_j τ_j)(Π_j U_{j,j+1})` with the
//! diagonal domain-wall factor `U_{j,j+1} = exp[(i/N) Q(σ†_j σ_{j+1})]`. The
//! polynomial `Q(x) = Σ_a q_a x^a` is fixed by `e^{iQ(x)} = x^p` on the
//! `N` eigenvalues `x = ω^d`, which makes `U^N = (σ†_j σ_{j+1})^p` and hence
//! `S^N = 1` on the ring.
//!
//! Inserting one unit of symmetry flux between sites `M` and `1` gives the
//! twisted translation `T̃ = T U_{M,1} τ_1`, whose `M`-th power is the
//! twisted symmetry `S̃`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clock_algebra::{root_of_unity, tau, Matrix, ONE, ZERO};
use crate::error::{Error, Result};
use crate::hilbert::{ChainGeometry, Factor, LocalKernel, ManyBodyOperator};

/// One of the `N` classes of Z_N SPT phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SptClass {
    n: usize,
    p: usize,
}

impl SptClass {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("group order N = {n} must be at least 2")));
        }
        if p >= n {
            return Err(Error::InvalidParameter(format!("class index p = {p} must lie in 0..{n}")));
        }
        Ok(Self { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// The class `N − p` (mod `N`).
    pub fn conjugate(&self) -> Self {
        Self { n: self.n, p: (self.n - self.p) % self.n }
    }
}

/// Coefficients `q_0, …, q_{N−1}` of `Q(x) = Σ_a q_a x^a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainWallPolynomial {
    class: SptClass,
    coefficients: Vec<Complex64>,
}

impl DomainWallPolynomial {
    /// `Q(x) = −(2πp/N) [ (N−1)/2 + Σ_{k=1}^{N−1} x^k / (ω^k − 1) ]`.
    ///
    /// On `x = ω^d` this evaluates to `2πp(d/N − 1)` for `d ≠ 0` and to `0`
    /// for `d = 0`.
    pub fn closed_form(class: SptClass) -> Self {
        let n = class.n;
        let pref = -2.0 * PI * class.p as f64 / n as f64;
        let mut coefficients = Vec::with_capacity(n);
        coefficients.push(Complex64::new(pref * (n as f64 - 1.0) / 2.0, 0.0));
        for k in 1..n {
            let denom = root_of_unity(n, k as i64) - ONE;
            coefficients.push(Complex64::new(pref, 0.0) / denom);
        }
        Self { class, coefficients }
    }

    /// `Q = (πp/2)(1 − x)` for `N = 2`, the form that takes the value `+πp`
    /// on a domain wall. It is the complex conjugate gauge of the closed form
    /// (which gives `−πp`) and produces the same symmetry operator.
    pub fn two_state(p: usize) -> Result<Self> {
        let class = SptClass::new(2, p)?;
        let h = PI * p as f64 / 2.0;
        Ok(Self { class, coefficients: vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)] })
    }

    pub fn from_coefficients(class: SptClass, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != class.n {
            return Err(Error::InvalidParameter(format!(
                "need {} coefficients, got {}",
                class.n,
                coefficients.len()
            )));
        }
        Ok(Self { class, coefficients })
    }

    pub fn class(&self) -> SptClass {
        self.class
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn evaluate(&self, x: Complex64) -> Complex64 {
        self.coefficients.iter().rev().fold(ZERO, |acc, q| acc * x + q)
    }

    /// `Q(ω^d)`.
    pub fn wall_value(&self, d: i64) -> Complex64 {
        self.evaluate(root_of_unity(self.class.n, d))
    }

    /// `max_d |e^{iQ(ω^d)} − ω^{pd}|`.
    pub fn exponentiation_deviation(&self) -> f64 {
        let (n, p) = (self.class.n, self.class.p);
        (0..n as i64)
            .map(|d| {
                let lhs = (Complex64::i() * self.wall_value(d)).exp();
                (lhs - root_of_unity(n, p as i64 * d)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Deviation from `q_0 ∈ ℝ`, `q_a = conj(q_{N−a})` and, for even `N`,
    /// `q_{N/2} ∈ ℝ`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.class.n;
        let q = &self.coefficients;
        let mut dev = q[0].im.abs();
        for a in 1..n {
            dev = dev.max((q[a] - q[n - a].conj()).norm());
        }
        dev
    }

    /// Same polynomial with every coefficient negated. Used to exercise the
    /// verification harness with a deliberately broken symmetry.
    pub fn negated(&self) -> Self {
        Self { class: self.class, coefficients: self.coefficients.iter().map(|q| -q).collect() }
    }
}

/// The polynomial used throughout the library: the closed form for `N ≥ 3`
/// and [`DomainWallPolynomial::two_state`] for `N = 2`.
pub fn q_polynomial(class: SptClass) -> DomainWallPolynomial {
    if class.n == 2 {
        DomainWallPolynomial::two_state(class.p).expect("p < 2 for a valid class")
    } else {
        DomainWallPolynomial::closed_form(class)
    }
}

fn diagonal_bond_kernel(n: usize, phase: impl Fn(i64) -> Complex64) -> LocalKernel {
    let mut m = Matrix::zeros(n * n, n * n);
    for c1 in 0..n {
        for c0 in 0..n {
            let d = (c1 as i64 - c0 as i64).rem_euclid(n as i64);
            m[(c0 + n * c1, c0 + n * c1)] = phase(d);
        }
    }
    LocalKernel::new(n, vec![0, 1], m).expect("bond kernel has matching dimension")
}

/// `U_{j,j+1}` on support `[0, 1]`. Relocate with [`LocalKernel::relocated`].
pub fn domain_wall_kernel(poly: &DomainWallPolynomial) -> LocalKernel {
    let n = poly.class.n;
    diagonal_bond_kernel(n, |d| (Complex64::i() * poly.wall_value(d) / n as f64).exp())
}

pub fn domain_wall_unitary(class: SptClass) -> LocalKernel {
    domain_wall_kernel(&q_polynomial(class))
}

/// Flux factor `exp[(i/N)(Q(ω x) − Q(x))]` with `x = σ†_j σ_{j+1}`, on `[0, 1]`.
pub fn flux_kernel(poly: &DomainWallPolynomial) -> LocalKernel {
    let n = poly.class.n;
    diagonal_bond_kernel(n, |d| {
        (Complex64::i() * (poly.wall_value(d + 1) - poly.wall_value(d)) / n as f64).exp()
    })
}

/// `max_d |U(d)^N − ω^{pd}|`.
pub fn unitary_power_deviation(poly: &DomainWallPolynomial) -> f64 {
    let n = poly.class.n;
    let u = domain_wall_kernel(poly);
    (0..n)
        .map(|c1| {
            let z = u.matrix()[(n * c1, n * c1)];
            (z.powu(n as u32) - root_of_unity(n, (poly.class.p * c1) as i64)).norm()
        })
        .fold(0.0, f64::max)
}

fn symmetry_factors(poly: &DomainWallPolynomial, sites: usize) -> Vec<Factor> {
    let n = poly.class.n;
    let t = tau(n).expect("valid group order");
    let u = domain_wall_kernel(poly);
    let mut factors: Vec<Factor> =
        (0..sites).map(|s| Factor::Kernel(LocalKernel::single_site(&t, s))).collect();
    factors.extend((0..sites).map(|s| Factor::Kernel(u.relocated(s, sites))));
    factors
}

pub fn symmetry_from_polynomial(poly: &DomainWallPolynomial, sites: usize) -> Result<ManyBodyOperator> {
    let g = ChainGeometry::new(poly.class.n, sites)?;
    ManyBodyOperator::product(&g, symmetry_factors(poly, sites))
}

pub fn build_symmetry(class: SptClass, sites: usize) -> Result<ManyBodyOperator> {
    symmetry_from_polynomial(&q_polynomial(class), sites)
}

pub fn twisted_translation_from_polynomial(
    poly: &DomainWallPolynomial,
    sites: usize,
) -> Result<ManyBodyOperator> {
    let n = poly.class.n;
    let g = ChainGeometry::new(n, sites)?;
    let t = tau(n)?;
    ManyBodyOperator::product(
        &g,
        vec![
            Factor::Translation(1),
            Factor::Kernel(domain_wall_kernel(poly).relocated(sites - 1, sites)),
            Factor::Kernel(LocalKernel::single_site(&t, 0)),
        ],
    )
}

pub fn build_twisted_translation(class: SptClass, sites: usize) -> Result<ManyBodyOperator> {
    twisted_translation_from_polynomial(&q_polynomial(class), sites)
}

pub fn twisted_symmetry_from_polynomial(
    poly: &DomainWallPolynomial,
    sites: usize,
) -> Result<ManyBodyOperator> {
    let g = ChainGeometry::new(poly.class.n, sites)?;
    let mut factors = vec![Factor::Kernel(flux_kernel(poly).relocated(sites - 1, sites))];
    factors.extend(symmetry_factors(poly, sites));
    ManyBodyOperator::product(&g, factors)
}

pub fn build_twisted_symmetry(class: SptClass, sites: usize) -> Result<ManyBodyOperator> {
    twisted_symmetry_from_polynomial(&q_polynomial(class), sites)
}
