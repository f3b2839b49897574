//! Group-cohomology side of the construction.
//!
//! The class-`p` 3-cocycle of Z_N is
//! `θ(m_1, m_2, m_3) = −p (2π/N) m_3 (m_1 + m_2 − [m_1 + m_2]_N)/N`, with
//! `[·]_N` the representative in `0..N`. It is recovered independently from
//! the matrix-product form of the symmetry: composing the fusion maps
//! `P_{m_1,m_2}` of three neighbouring tensors in the two possible orders
//! gives outputs that differ by exactly `e^{iθ}`.
//!
//! Angles are discretized to the `N` values `2πk/N` on which every tensor of
//! the construction is supported, which makes all contractions finite.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clock_algebra::{kron_local, root_of_unity, Matrix, ZERO};
use crate::error::{Error, Result};
use crate::symmetry::SptClass;

/// Group order accepted by [`class_distinctness`].
pub const DISTINCTNESS_GUARD: usize = 4;

/// Maximum deviation of `|⟨a, b⟩|/(‖a‖‖b‖)` from one for two outputs to be
/// called parallel.
pub const PARALLEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    n: usize,
    value: usize,
}

impl GroupElement {
    pub fn new(n: usize, value: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("group order N = {n} must be at least 2")));
        }
        Ok(Self { n, value: value.rem_euclid(n as i64) as usize })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> usize {
        self.value
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { n: self.n, value: (self.value + other.value) % self.n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CocyclePhase {
    pub theta: f64,
    pub phase: Complex64,
}

impl CocyclePhase {
    pub fn from_theta(theta: f64) -> Self {
        Self { theta, phase: Complex64::from_polar(1.0, theta) }
    }
}

/// `m_1 + m_2 − [m_1 + m_2]_N`, divided by `N`: zero or one.
fn carry(n: usize, a: usize, b: usize) -> usize {
    (a + b) / n
}

fn check_elements(class: SptClass, elems: &[GroupElement]) -> Result<()> {
    if let Some(e) = elems.iter().find(|e| e.n != class.n()) {
        return Err(Error::InvalidParameter(format!(
            "element of Z_{} used with class of Z_{}",
            e.n,
            class.n()
        )));
    }
    Ok(())
}

pub fn three_cocycle(class: SptClass, m1: GroupElement, m2: GroupElement, m3: GroupElement) -> Result<CocyclePhase> {
    check_elements(class, &[m1, m2, m3])?;
    let n = class.n();
    let c = carry(n, m1.value, m2.value) as f64;
    let theta = -(class.p() as f64) * (TAU / n as f64) * m3.value as f64 * c;
    Ok(CocyclePhase::from_theta(theta))
}

/// Distance of `x` from the nearest multiple of `2π`.
fn off_lattice(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    r.min(TAU - r)
}

/// Largest violation of `δθ = 0 mod 2π` over all quadruples in Z_N⁴.
pub fn verify_cocycle_condition(class: SptClass) -> f64 {
    let n = class.n();
    let g = |v: usize| GroupElement { n, value: v };
    let th = |a: usize, b: usize, c: usize| three_cocycle(class, g(a), g(b), g(c)).expect("same group").theta;
    let mut worst: f64 = 0.0;
    for g1 in 0..n {
        for g2 in 0..n {
            for g3 in 0..n {
                for g4 in 0..n {
                    let d = th(g2, g3, g4) - th((g1 + g2) % n, g3, g4) + th(g1, (g2 + g3) % n, g4)
                        - th(g1, g2, (g3 + g4) % n)
                        + th(g1, g2, g3);
                    worst = worst.max(off_lattice(d));
                }
            }
        }
    }
    worst
}

/// `θ_p − θ_q` in units of `2π/N`, reduced mod `N`.
fn difference_table(n: usize, p: usize, q: usize) -> Vec<usize> {
    let mut t = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let k = c * carry(n, a, b);
                let diff = (q as i64 - p as i64) * k as i64;
                t.push(diff.rem_euclid(n as i64) as usize);
            }
        }
    }
    t
}

/// Search for a Z_N-valued 2-cochain `β` with `δβ = θ_p − θ_q` (mod `N`).
/// Every assignment of `β` is explored; branches are cut as soon as a fully
/// assigned coboundary constraint fails, so the search is exhaustive but far
/// below `N^(N²)` in practice.
fn coboundary_exists(n: usize, p: usize, q: usize) -> bool {
    let target = difference_table(n, p, q);
    let slot = |a: usize, b: usize| a * n + b;
    // δβ(a,b,c) = β(b,c) − β(a+b,c) + β(a,b+c) − β(a,b)
    let constraints: Vec<([usize; 4], usize)> = (0..n)
        .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
        .map(|(a, b, c)| {
            let vars = [slot(b, c), slot((a + b) % n, c), slot(a, (b + c) % n), slot(a, b)];
            (vars, target[(a * n + b) * n + c])
        })
        .collect();
    let slots = n * n;
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); slots];
    for (i, (vars, _)) in constraints.iter().enumerate() {
        let last = *vars.iter().max().expect("four variables");
        ready[last].push(i);
    }
    let mut beta = vec![0usize; slots];
    fn search(
        depth: usize,
        n: usize,
        beta: &mut [usize],
        constraints: &[([usize; 4], usize)],
        ready: &[Vec<usize>],
    ) -> bool {
        if depth == beta.len() {
            return true;
        }
        for v in 0..n {
            beta[depth] = v;
            let ok = ready[depth].iter().all(|&ci| {
                let (vars, t) = constraints[ci];
                let s = beta[vars[0]] as i64 - beta[vars[1]] as i64 + beta[vars[2]] as i64 - beta[vars[3]] as i64;
                s.rem_euclid(n as i64) as usize == t
            });
            if ok && search(depth + 1, n, beta, constraints, ready) {
                return true;
            }
        }
        false
    }
    search(0, n, &mut beta, &constraints, &ready)
}

/// Entry `[p][q]` is `true` when classes `p` and `q` are distinct, i.e. no
/// Z_N-valued coboundary relates their cocycles.
pub fn class_distinctness(n: usize) -> Result<Vec<Vec<bool>>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("group order N = {n} must be at least 2")));
    }
    if n > DISTINCTNESS_GUARD {
        return Err(Error::InvalidParameter(format!(
            "coboundary search is limited to N <= {DISTINCTNESS_GUARD}, got {n}"
        )));
    }
    Ok((0..n).map(|p| (0..n).map(|q| !coboundary_exists(n, p, q)).collect()).collect())
}

/// Fusion map `P_{m_1,m_2}: |φ⟩ ↦ e^{−ipφ·c} |φ + 2πm_2/N⟩ ⊗ |φ⟩`, with
/// `c = (m_1 + m_2 − [m_1 + m_2]_N)/N` and `φ = 2πk/N`. The first output
/// factor is the least significant local index.
pub fn fusion_map(class: SptClass, m1: usize, m2: usize) -> Matrix {
    let n = class.n();
    let c = carry(n, m1, m2) as i64;
    let mut p = Matrix::zeros(n * n, n);
    for k in 0..n {
        let out = (k + m2) % n + n * k;
        p[(out, k)] = root_of_unity(n, -(class.p() as i64) * k as i64 * c);
    }
    p
}

/// Phase between `(P_{m_1,m_2} ⊗ 1) P_{m_1m_2,m_3}` and
/// `(1 ⊗ P_{m_2,m_3}) P_{m_1,m_2m_3}`, read off column by column.
pub fn projective_phase_from_tensors(
    class: SptClass,
    m1: GroupElement,
    m2: GroupElement,
    m3: GroupElement,
) -> Result<CocyclePhase> {
    check_elements(class, &[m1, m2, m3])?;
    let n = class.n();
    let (a, b, c) = (m1.value, m2.value, m3.value);
    let id = Matrix::identity(n, n);
    // P ⊗ 1 acts with P on the first (least significant) factor.
    let left = kron_local(&[fusion_map(class, a, b), id.clone()]) * fusion_map(class, (a + b) % n, c);
    let right = kron_local(&[id, fusion_map(class, b, c)]) * fusion_map(class, a, (b + c) % n);
    let mut phase: Option<Complex64> = None;
    for k in 0..n {
        let l = left.column(k);
        let r = right.column(k);
        let overlap = r.iter().zip(l.iter()).fold(ZERO, |acc, (x, y)| acc + x.conj() * y);
        let scale = l.norm() * r.norm();
        if scale == 0.0 || (overlap.norm() / scale - 1.0).abs() > PARALLEL_TOL {
            return Err(Error::Representation(format!(
                "outputs for input angle index {k} are not parallel"
            )));
        }
        let z = overlap / scale;
        match phase {
            None => phase = Some(z),
            Some(p) if (p - z).norm() > PARALLEL_TOL => {
                return Err(Error::Representation("relative phase depends on the input angle".into()))
            }
            Some(_) => {}
        }
    }
    let z = phase.expect("N >= 2 inputs");
    let mut theta = z.arg();
    if theta > PI - 1e-12 {
        theta -= TAU;
    }
    Ok(CocyclePhase { theta, phase: z })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, v: i64) -> GroupElement {
        GroupElement::new(n, v).unwrap()
    }

    #[test]
    fn cocycle_values() {
        let c = three_cocycle(SptClass::new(2, 1).unwrap(), g(2, 1), g(2, 1), g(2, 1)).unwrap();
        assert!((c.theta + PI).abs() < 1e-15);
        assert!((c.phase + 1.0).norm() < 1e-15);
        let c = three_cocycle(SptClass::new(3, 1).unwrap(), g(3, 2), g(3, 2), g(3, 1)).unwrap();
        assert!((c.theta + TAU / 3.0).abs() < 1e-15);
        let c0 = three_cocycle(SptClass::new(5, 0).unwrap(), g(5, 3), g(5, 4), g(5, 2)).unwrap();
        assert_eq!(c0.phase, Complex64::new(1.0, 0.0));
        assert!(three_cocycle(SptClass::new(3, 1).unwrap(), g(2, 1), g(3, 1), g(3, 1)).is_err());
    }

    #[test]
    fn cocycle_condition() {
        assert!(verify_cocycle_condition(SptClass::new(2, 1).unwrap()) < 1e-12);
        assert!(verify_cocycle_condition(SptClass::new(3, 2).unwrap()) < 1e-12);
        assert_eq!(verify_cocycle_condition(SptClass::new(4, 0).unwrap()), 0.0);
    }

    #[test]
    fn distinct_classes() {
        let t2 = class_distinctness(2).unwrap();
        assert!(t2[0][1] && t2[1][0] && !t2[0][0] && !t2[1][1]);
        let t3 = class_distinctness(3).unwrap();
        for p in 0..3 {
            for q in 0..3 {
                assert_eq!(t3[p][q], p != q);
            }
        }
        assert!(class_distinctness(5).is_err());
    }

    #[test]
    fn tensor_phase_examples() {
        let c = projective_phase_from_tensors(SptClass::new(2, 1).unwrap(), g(2, 1), g(2, 1), g(2, 1)).unwrap();
        assert!((c.phase + 1.0).norm() < 1e-12);
        let c = projective_phase_from_tensors(SptClass::new(3, 0).unwrap(), g(3, 2), g(3, 2), g(3, 2)).unwrap();
        assert!((c.phase - 1.0).norm() < 1e-12);
    }
}
