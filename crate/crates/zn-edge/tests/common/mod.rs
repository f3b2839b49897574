//! Dense reference constructions written directly from the defining
//! formulas, independent of the library's kernels and gather code.

#![allow(dead_code)]

use std::f64::consts::PI;

use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex64;
use zn_edge::hilbert::{ManyBodyOperator, StateVector};

pub type Dense = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn omega(n: usize, k: i64) -> Complex64 {
    (Complex64::i() * (2.0 * PI * k.rem_euclid(n as i64) as f64 / n as f64)).exp()
}

/// `σ = diag(1, ω, …, ω^{N−1})`.
pub fn clock(n: usize) -> Dense {
    Dense::from_fn(n, n, |r, col| if r == col { omega(n, r as i64) } else { c(0.0, 0.0) })
}

/// `τ|j⟩ = |j+1 mod N⟩`.
pub fn shift(n: usize) -> Dense {
    Dense::from_fn(n, n, |r, col| if r == (col + 1) % n { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn pauli_x() -> Dense {
    shift(2)
}

pub fn pauli_y() -> Dense {
    Dense::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> Dense {
    clock(2)
}

/// Digit of site `s` in basis index `idx`, with `idx = Σ_s d_s N^s`.
pub fn digits(n: usize, m: usize, idx: usize) -> Vec<usize> {
    let mut rest = idx;
    (0..m)
        .map(|_| {
            let d = rest % n;
            rest /= n;
            d
        })
        .collect()
}

pub fn index(n: usize, d: &[usize]) -> usize {
    d.iter().rev().fold(0, |acc, &x| acc * n + x)
}

/// Single-site operator on site `s` of an `M`-site chain.
pub fn on_site(n: usize, m: usize, s: usize, op: &Dense) -> Dense {
    let dim = n.pow(m as u32);
    let mut out = Dense::zeros(dim, dim);
    for col in 0..dim {
        let d = digits(n, m, col);
        for a in 0..n {
            let v = op[(a, d[s])];
            if v.norm() == 0.0 {
                continue;
            }
            let mut e = d.clone();
            e[s] = a;
            out[(index(n, &e), col)] += v;
        }
    }
    out
}

/// Product of single-site operators `ops[k]` on sites `sites[k]`.
pub fn on_sites(n: usize, m: usize, placed: &[(usize, &Dense)]) -> Dense {
    let dim = n.pow(m as u32);
    placed.iter().fold(Dense::identity(dim, dim), |acc, (s, op)| acc * on_site(n, m, *s, op))
}

pub fn diagonal(n: usize, m: usize, f: impl Fn(&[usize]) -> Complex64) -> Dense {
    let dim = n.pow(m as u32);
    Dense::from_fn(dim, dim, |r, col| if r == col { f(&digits(n, m, r)) } else { c(0.0, 0.0) })
}

/// `T` with `T†X_sT = X_{s+1}`: `T|d⟩ = |d'⟩`, `d'_s = d_{s+1}`.
pub fn translation(n: usize, m: usize) -> Dense {
    let dim = n.pow(m as u32);
    let mut out = Dense::zeros(dim, dim);
    for col in 0..dim {
        let d = digits(n, m, col);
        let e: Vec<usize> = (0..m).map(|s| d[(s + 1) % m]).collect();
        out[(index(n, &e), col)] = c(1.0, 0.0);
    }
    out
}

/// `Q(ω^d)` from the printed coefficients: `(π/2)p(1 − x)` for `N = 2`,
/// `q_0 + q_1 x + q̄_1 x²` for `N = 3`, and the general closed form
/// `−(2πp/N)[(N−1)/2 + Σ_k x^k/(ω^k − 1)]` otherwise.
pub fn q_value(n: usize, p: usize, d: i64) -> Complex64 {
    let x = omega(n, d);
    let p = p as f64;
    match n {
        2 => c(PI / 2.0 * p, 0.0) * (c(1.0, 0.0) - x),
        3 => {
            let q0 = c(-p * 2.0 * PI / 3.0, 0.0);
            let q1 = c(p * PI / 3.0, p * PI / 3.0 / 3f64.sqrt());
            q0 + q1 * x + q1.conj() * x * x
        }
        _ => {
            let mut acc = c((n as f64 - 1.0) / 2.0, 0.0);
            for k in 1..n as i64 {
                acc += x.powi(k as i32) / (omega(n, k) - c(1.0, 0.0));
            }
            acc * c(-2.0 * PI * p / n as f64, 0.0)
        }
    }
}

/// `exp[(i/N) Q(σ†_a σ_b)]` evaluated on digits.
pub fn wall_phase(n: usize, p: usize, da: usize, db: usize) -> Complex64 {
    (Complex64::i() * q_value(n, p, db as i64 - da as i64) / n as f64).exp()
}

/// `U_{a,b}` as a dense diagonal.
pub fn bond(n: usize, p: usize, m: usize, a: usize, b: usize) -> Dense {
    diagonal(n, m, |d| wall_phase(n, p, d[a], d[b]))
}

/// `S = (Π_j τ_j)(Π_j U_{j,j+1})`.
pub fn symmetry(n: usize, p: usize, m: usize) -> Dense {
    let t = shift(n);
    let onsite = on_sites(n, m, &(0..m).map(|s| (s, &t)).collect::<Vec<_>>());
    let walls = diagonal(n, m, |d| (0..m).map(|j| wall_phase(n, p, d[j], d[(j + 1) % m])).product());
    onsite * walls
}

/// `h_j = −Σ_ℓ S^{−ℓ}(τ_j + τ_j†)S^ℓ` with the full ring symmetry.
pub fn literal_term(n: usize, p: usize, m: usize, j: usize) -> Dense {
    literal_term_with(&symmetry(n, p, m), n, m, j)
}

pub fn literal_term_with(s: &Dense, n: usize, m: usize, j: usize) -> Dense {
    let t = on_site(n, m, j, &shift(n));
    let x = &t + t.adjoint();
    let dim = x.nrows();
    let mut acc = Dense::zeros(dim, dim);
    let mut power = Dense::identity(dim, dim);
    for _ in 0..n {
        acc += power.adjoint() * &x * &power;
        power = s * power;
    }
    -acc
}

pub fn literal_hamiltonian(n: usize, p: usize, m: usize, lambda: f64) -> Dense {
    let dim = n.pow(m as u32);
    let s = symmetry(n, p, m);
    (0..m).fold(Dense::zeros(dim, dim), |acc, j| acc + literal_term_with(&s, n, m, j)) * c(lambda, 0.0)
}

/// `h̃_1 = τ†_1τ†_2 h_1 τ_1τ_2` and `h̃_M = τ†_1 U^{−1}_{M,1} h_M U_{M,1} τ_1`,
/// other terms unchanged (sites counted from 0 here).
pub fn literal_twisted_hamiltonian(n: usize, p: usize, m: usize, lambda: f64) -> Dense {
    let t = shift(n);
    let dim = n.pow(m as u32);
    let s = symmetry(n, p, m);
    let mut h = Dense::zeros(dim, dim);
    let a = on_sites(n, m, &[(0, &t), (1, &t)]);
    h += a.adjoint() * literal_term_with(&s, n, m, 0) * &a;
    for j in 1..m - 1 {
        h += literal_term_with(&s, n, m, j);
    }
    let b = bond(n, p, m, m - 1, 0) * on_site(n, m, 0, &t);
    h += b.adjoint() * literal_term_with(&s, n, m, m - 1) * &b;
    h * c(lambda, 0.0)
}

/// `T̃ = T U_{M,1} τ_1`.
pub fn twisted_translation(n: usize, p: usize, m: usize) -> Dense {
    translation(n, m) * bond(n, p, m, m - 1, 0) * on_site(n, m, 0, &shift(n))
}

/// Closed-form `H^(p)_2` per unit coupling: `−2Σσ^x` for `p = 0`,
/// `−Σ(σ^x_j − σ^z_{j−1}σ^x_jσ^z_{j+1})` for `p = 1`.
pub fn z2_closed_form(p: usize, m: usize) -> Dense {
    let (x, z) = (pauli_x(), pauli_z());
    let dim = 1 << m;
    let mut h = Dense::zeros(dim, dim);
    for j in 0..m {
        let xj = on_site(2, m, j, &x);
        if p == 0 {
            h -= xj * c(2.0, 0.0);
        } else {
            h -= &xj - on_sites(2, m, &[((j + m - 1) % m, &z), (j, &x), ((j + 1) % m, &z)]);
        }
    }
    h
}

/// Closed-form twisted `H̃^(1)_2`: the bulk terms of `H^(1)_2` with
/// `h̃_1 ∝ σ^x_1 + σ^z_Mσ^x_1σ^z_2` and `h̃_M ∝ σ^y_Mσ^z_1 + σ^z_{M−1}σ^y_M`.
pub fn z2_twisted_closed_form(m: usize) -> Dense {
    let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
    let dim = 1 << m;
    let mut h = Dense::zeros(dim, dim);
    h -= on_site(2, m, 0, &x) + on_sites(2, m, &[(m - 1, &z), (0, &x), (1, &z)]);
    for j in 1..m - 1 {
        h -= on_site(2, m, j, &x) - on_sites(2, m, &[(j - 1, &z), (j, &x), (j + 1, &z)]);
    }
    h -= on_sites(2, m, &[(m - 1, &y), (0, &z)]) + on_sites(2, m, &[(m - 2, &z), (m - 1, &y)]);
    h
}

/// Closed-form `H^(p)_3` per unit coupling: `−3Σ(τ + τ†)` for `p = 0`,
/// otherwise the expanded non-trivial form.
pub fn z3_closed_form(p: usize, m: usize) -> Dense {
    let (s, t) = (clock(3), shift(3));
    let sd = s.adjoint();
    let w = omega(3, 1);
    let dim = 3usize.pow(m as u32);
    let mut h = Dense::zeros(dim, dim);
    for j in 0..m {
        let (l, r) = ((j + m - 1) % m, (j + 1) % m);
        let tj = on_site(3, m, j, &t);
        if p == 0 {
            h -= (&tj + tj.adjoint()) * c(3.0, 0.0);
            continue;
        }
        let id = Dense::identity(dim, dim);
        let pair = on_sites(3, m, &[(l, &sd), (j, &s)]) + on_sites(3, m, &[(l, &s), (j, &sd)]);
        let inner = on_sites(3, m, &[(j, &sd), (r, &s)]) * ((c(1.0, 0.0) + w) / 3.0)
            + on_sites(3, m, &[(l, &sd), (r, &s)]) * (w.conj() * 2.0 / 3.0)
            + on_sites(3, m, &[(l, &sd), (j, &sd), (r, &sd)]) * (w * 2.0 / 3.0);
        let bracket = id * c(5.0 / 3.0, 0.0) + pair * ((w + w.conj()) / 3.0) + &inner + inner.adjoint();
        let term = &tj * bracket;
        h -= &term + term.adjoint();
    }
    h
}

/// Dense matrix of `op` assembled column by column through `apply`.
pub fn dense_of(op: &ManyBodyOperator) -> Dense {
    let g = op.geometry();
    let dim = g.dim();
    let mut out = Dense::zeros(dim, dim);
    for col in 0..dim {
        let e = StateVector::basis(g, col).unwrap();
        let w = op.apply(&e).unwrap();
        for (r, v) in w.amplitudes().iter().enumerate() {
            out[(r, col)] = *v;
        }
    }
    out
}

pub fn max_entry(a: &Dense) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Least-squares real scale `s` with `a ≈ s·b`, and the largest entrywise
/// residual `|a − s·b|`.
pub fn fitted_scale(a: &Dense, b: &Dense) -> (f64, f64) {
    let num: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    let s = num / den;
    (s, max_entry(&(a - b * c(s, 0.0))))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn spectrum(a: &Dense) -> Vec<f64> {
    let dim = a.nrows();
    let m = Mat::from_fn(dim, dim, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v: Vec<f64> = m.self_adjoint_eigenvalues(Side::Lower).unwrap().into_iter().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
