//! `verify`: invariant suites of every module at dense-guard sizes.
//!
//! Single-site and polynomial checks sweep all group orders up to a fixed
//! bound, so an injected fault is caught even where a small `N` hides it
//! (for `N = 2`, `U` and `U†` coincide). Operator checks run for the
//! configured `N`, every class, on the largest chain within the dense guard.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clock_algebra::{order_and_unitarity_check, weyl_check};
use crate::cocycle::{
    class_distinctness, projective_phase_from_tensors, three_cocycle, verify_cocycle_condition, GroupElement,
    DISTINCTNESS_GUARD,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{commutator_residual, EdgeModel};
use crate::hilbert::{ChainGeometry, ManyBodyOperator, StateVector, DENSE_GUARD};
use crate::symmetry::{
    q_polynomial, symmetry_from_polynomial, twisted_symmetry_from_polynomial, twisted_translation_from_polynomial,
    unitary_power_deviation, DomainWallPolynomial, SptClass,
};

use super::config::{Command, Fault, RunConfig};
use super::report::{unix_now, CheckResult, VerifyReport, SCHEMA_VERSION};

pub const ALGEBRA_MAX_N: usize = 8;
pub const POLYNOMIAL_MAX_N: usize = 6;
pub const ALGEBRA_TOL: f64 = 1e-13;
pub const OPERATOR_TOL: f64 = 1e-10;
pub const ANOMALY_FLOOR: f64 = 0.01;
pub const COCYCLE_TOL: f64 = 1e-12;
pub const MPS_TOL: f64 = 1e-10;
const TRIALS: usize = 2;

pub fn polynomial(class: SptClass, fault: Option<Fault>) -> DomainWallPolynomial {
    let q = q_polynomial(class);
    match fault {
        Some(Fault::DomainWallSign) => q.negated(),
        None => q,
    }
}

/// Largest chain length not above `requested` whose dimension fits the
/// dense guard.
pub fn verify_sites(n: usize, requested: usize) -> Result<usize> {
    (3..=requested.max(3))
        .rev()
        .find(|&m| (n as u128).checked_pow(m as u32).is_some_and(|d| d <= DENSE_GUARD as u128))
        .ok_or_else(|| Error::InvalidConfiguration(format!("Z_{n} chains of 3 sites exceed the dense guard {DENSE_GUARD}")))
}

/// `max ‖A^k v − B v‖` over random unit vectors; `B` defaults to the identity.
pub fn power_residual(a: &ManyBodyOperator, k: usize, b: Option<&ManyBodyOperator>, trials: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let v = StateVector::random(a.geometry(), &mut rng);
        let mut w = v.clone();
        for _ in 0..k {
            w = a.apply(&w)?;
        }
        let target = match b {
            Some(b) => b.apply(&v)?,
            None => v,
        };
        worst = worst.max(w.distance(&target));
    }
    Ok(worst)
}

fn algebra_checks(upto: usize, checks: &mut Vec<CheckResult>) -> Result<()> {
    for n in 2..=upto {
        checks.push(CheckResult::below("weyl-relation", format!("N={n}"), weyl_check(n)?, ALGEBRA_TOL));
        checks.push(CheckResult::below(
            "clock-order-unitarity",
            format!("N={n}"),
            order_and_unitarity_check(n)?,
            ALGEBRA_TOL,
        ));
    }
    Ok(())
}

fn polynomial_checks(upto: usize, fault: Option<Fault>, checks: &mut Vec<CheckResult>) -> Result<()> {
    for n in 2..=upto {
        for p in 0..n {
            let q = polynomial(SptClass::new(n, p)?, fault);
            let detail = format!("N={n} p={p}");
            checks.push(CheckResult::below("domain-wall-exponentiation", detail.clone(), q.exponentiation_deviation(), OPERATOR_TOL));
            checks.push(CheckResult::below("domain-wall-hermiticity", detail.clone(), q.hermiticity_deviation(), OPERATOR_TOL));
            checks.push(CheckResult::below("domain-wall-unitary-power", detail, unitary_power_deviation(&q), OPERATOR_TOL));
        }
    }
    Ok(())
}

fn operator_checks(class: SptClass, sites: usize, cfg: &RunConfig, checks: &mut Vec<CheckResult>) -> Result<()> {
    let (n, p) = (class.n(), class.p());
    let seed = cfg.seed;
    let q = polynomial(class, cfg.fault);
    let detail = format!("N={n} p={p} M={sites}");
    let s = symmetry_from_polynomial(&q, sites)?;
    let t = ManyBodyOperator::translation(&ChainGeometry::new(n, sites)?);
    let tt = twisted_translation_from_polynomial(&q, sites)?;
    let st = twisted_symmetry_from_polynomial(&q, sites)?;
    let h = EdgeModel::new(class, sites, 1.0, false)?.with_polynomial(q.clone())?.build()?;
    let ht = EdgeModel::new(class, sites, 1.0, true)?.with_polynomial(q)?.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut below = |name: &str, value: f64| checks.push(CheckResult::below(name, detail.clone(), value, OPERATOR_TOL));
    below("symmetry-order", power_residual(&s, n, None, TRIALS, seed)?);
    below("symmetry-translation", commutator_residual(&s, &t, TRIALS, seed)?);
    below("twisted-translation-power", power_residual(&tt, sites, Some(&st), TRIALS, seed)?);
    below("hamiltonian-hermiticity", h.hermiticity_defect(TRIALS, &mut rng));
    below("twisted-hamiltonian-hermiticity", ht.hermiticity_defect(TRIALS, &mut rng));
    below("hamiltonian-symmetry", commutator_residual(&h, &s, TRIALS, seed)?);
    below("hamiltonian-translation", commutator_residual(&h, &t, TRIALS, seed)?);
    below("twisted-hamiltonian-translation", commutator_residual(&ht, &tt, TRIALS, seed)?);
    below("twisted-hamiltonian-twisted-symmetry", commutator_residual(&ht, &st, TRIALS, seed)?);
    let anomaly = commutator_residual(&ht, &s, TRIALS, seed)?;
    checks.push(if p == 0 {
        CheckResult::below("twisted-anomaly", detail.clone(), anomaly, OPERATOR_TOL)
    } else {
        CheckResult::above("twisted-anomaly", detail.clone(), anomaly, ANOMALY_FLOOR)
    });
    Ok(())
}

/// Largest `|e^{iθ}_{MPS} − e^{iθ}|` over all triples; infinite when the
/// tensor construction fails.
pub fn mps_deviation(class: SptClass) -> Result<f64> {
    let n = class.n();
    let mut worst: f64 = 0.0;
    for a in 0..n as i64 {
        for b in 0..n as i64 {
            for c in 0..n as i64 {
                let (g1, g2, g3) = (GroupElement::new(n, a)?, GroupElement::new(n, b)?, GroupElement::new(n, c)?);
                let exact = three_cocycle(class, g1, g2, g3)?;
                match projective_phase_from_tensors(class, g1, g2, g3) {
                    Ok(mps) => worst = worst.max((mps.phase - exact.phase).norm()),
                    Err(Error::Representation(_)) => return Ok(f64::INFINITY),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(worst)
}

fn cocycle_checks(n: usize, checks: &mut Vec<CheckResult>) -> Result<()> {
    for p in 0..n {
        let class = SptClass::new(n, p)?;
        let detail = format!("N={n} p={p}");
        checks.push(CheckResult::below("cocycle-condition", detail.clone(), verify_cocycle_condition(class), COCYCLE_TOL));
        checks.push(CheckResult::below("mps-projective-phase", detail, mps_deviation(class)?, MPS_TOL));
    }
    if n <= DISTINCTNESS_GUARD {
        let table = class_distinctness(n)?;
        let wrong = table
            .iter()
            .enumerate()
            .flat_map(|(p, row)| row.iter().enumerate().map(move |(q, &d)| d != (p != q)))
            .filter(|&w| w)
            .count();
        checks.push(CheckResult::below("class-distinctness", format!("N={n}"), wrong as f64, 0.5));
    }
    Ok(())
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    if cfg.command != Command::Verify {
        return Err(Error::InvalidConfiguration("configuration is not for verify".into()));
    }
    let sites = verify_sites(cfg.n, cfg.sites)?;
    let mut checks = Vec::new();
    algebra_checks(ALGEBRA_MAX_N.max(cfg.n), &mut checks)?;
    polynomial_checks(POLYNOMIAL_MAX_N.max(cfg.n), cfg.fault, &mut checks)?;
    for p in 0..cfg.n {
        operator_checks(SptClass::new(cfg.n, p)?, sites, cfg, &mut checks)?;
    }
    cocycle_checks(cfg.n, &mut checks)?;
    let mut failures: Vec<String> = Vec::new();
    for c in checks.iter().filter(|c| !c.passed) {
        if !failures.contains(&c.name) {
            failures.push(c.name.clone());
        }
    }
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        generated_at_unix: unix_now(),
        config: cfg.clone(),
        sites_used: sites,
        checks,
        failures,
    })
}
