//! Single-site Z_N clock algebra.
//!
//! `σ = diag(1, ω, …, ω^{N-1})` and `τ` shifts `|j⟩ → |j+1 mod N⟩`, with
//! `ω = e^{+i2π/N}`. Together they satisfy `τ†στ = ωσ`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Group order together with its primitive root of unity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockParams {
    n: usize,
    omega: Complex64,
}

impl ClockParams {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self { n, omega: omega(n)? })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    /// `ω^k` evaluated from the reduced angle, so large or negative powers
    /// stay on the unit circle without accumulating rounding.
    pub fn omega_pow(&self, k: i64) -> Complex64 {
        root_of_unity(self.n, k)
    }
}

/// `e^{i2πk/N}` with `k` reduced mod `N` first.
pub fn root_of_unity(n: usize, k: i64) -> Complex64 {
    let r = k.rem_euclid(n as i64);
    match (4 * r).checked_rem(n as i64) {
        // Exact quarter turns avoid 1e-16 residue in the zero components.
        Some(0) => match 4 * r / n as i64 {
            0 => ONE,
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        },
        _ => Complex64::from_polar(1.0, TAU * r as f64 / n as f64),
    }
}

pub fn omega(n: usize) -> Result<Complex64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("group order N = {n} must be at least 2")));
    }
    Ok(root_of_unity(n, 1))
}

/// A dense `N × N` operator on one site.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteOperator {
    entries: Matrix,
}

impl SiteOperator {
    pub fn from_matrix(entries: Matrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() < 2 {
            return Err(Error::Dimension(format!(
                "site operator must be square with dimension >= 2, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: Matrix::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    pub fn into_matrix(self) -> Matrix {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { entries: &self.entries * &other.entries }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { entries: &self.entries * c }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.dim());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Operator norm of `self − other`.
    pub fn deviation(&self, other: &Self) -> f64 {
        operator_norm(&(&self.entries - &other.entries))
    }

    /// Operator norm of `U†U − I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim();
        operator_norm(&(self.entries.adjoint() * &self.entries - Matrix::identity(n, n)))
    }
}

/// Largest singular value.
pub fn operator_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Tensor product with `factors[0]` on the least significant position, the
/// ordering used for local configurations throughout the crate.
pub fn kron_local(factors: &[Matrix]) -> Matrix {
    factors
        .iter()
        .fold(Matrix::identity(1, 1), |acc, f| f.kronecker(&acc))
}

pub fn sigma(n: usize) -> Result<SiteOperator> {
    let p = ClockParams::new(n)?;
    let mut m = Matrix::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = p.omega_pow(j as i64);
    }
    SiteOperator::from_matrix(m)
}

pub fn tau(n: usize) -> Result<SiteOperator> {
    ClockParams::new(n)?;
    let mut m = Matrix::zeros(n, n);
    for j in 0..n {
        m[((j + 1) % n, j)] = ONE;
    }
    SiteOperator::from_matrix(m)
}

/// Operator norm of `τ†στ − ωσ`.
pub fn weyl_check(n: usize) -> Result<f64> {
    let s = sigma(n)?;
    let t = tau(n)?;
    let lhs = t.adjoint().mul(&s).mul(&t);
    let rhs = s.scale(omega(n)?);
    Ok(lhs.deviation(&rhs))
}

/// Largest deviation among `σ^N = 1`, `τ^N = 1` and the unitarity of both.
pub fn order_and_unitarity_check(n: usize) -> Result<f64> {
    let s = sigma(n)?;
    let t = tau(n)?;
    let id = SiteOperator::identity(n);
    let devs = [
        s.pow(n as u32).deviation(&id),
        t.pow(n as u32).deviation(&id),
        s.unitarity_deviation(),
        t.unitarity_deviation(),
    ];
    Ok(devs.into_iter().fold(0.0, f64::max))
}
