//! `cocycle`: cocycle tables, condition, distinctness and the tensor check.

use crate::cocycle::{
    class_distinctness, projective_phase_from_tensors, three_cocycle, verify_cocycle_condition, GroupElement,
    DISTINCTNESS_GUARD,
};
use crate::error::{Error, Result};
use crate::symmetry::SptClass;

use super::config::{Command, RunConfig};
use super::report::{unix_now, ClassCocycle, CocycleEntry, CocycleReport, SCHEMA_VERSION};
use super::verify::{COCYCLE_TOL, MPS_TOL};

fn class_table(class: SptClass) -> Result<ClassCocycle> {
    let n = class.n();
    let mut entries = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let g = |v: usize| GroupElement::new(n, v as i64);
                let (g1, g2, g3) = (g(a)?, g(b)?, g(c)?);
                let exact = three_cocycle(class, g1, g2, g3)?;
                let mps = match projective_phase_from_tensors(class, g1, g2, g3) {
                    Ok(m) => Some(m),
                    Err(Error::Representation(_)) => None,
                    Err(e) => return Err(e),
                };
                entries.push(CocycleEntry {
                    m1: a,
                    m2: b,
                    m3: c,
                    theta: exact.theta,
                    mps_theta: mps.map(|m| m.theta),
                    agrees: mps.is_some_and(|m| (m.phase - exact.phase).norm() < MPS_TOL),
                });
            }
        }
    }
    let violation = verify_cocycle_condition(class);
    Ok(ClassCocycle {
        p: class.p(),
        mps_agreement: entries.iter().filter(|e| e.agrees).count(),
        triples: entries.len(),
        entries,
        condition_violation: violation,
        condition_holds: violation < COCYCLE_TOL,
    })
}

/// Tables for every class of `Z_N`; `--p` is ignored.
pub fn cmd_cocycle(cfg: &RunConfig) -> Result<CocycleReport> {
    cfg.validate()?;
    if cfg.command != Command::Cocycle {
        return Err(Error::InvalidConfiguration("configuration is not for cocycle".into()));
    }
    let n = cfg.n;
    let classes = (0..n).map(|p| class_table(SptClass::new(n, p)?)).collect::<Result<Vec<_>>>()?;
    let mut warnings = Vec::new();
    let distinctness = if n <= DISTINCTNESS_GUARD {
        Some(class_distinctness(n)?)
    } else {
        warnings.push(format!("class distinctness is only searched for N <= {DISTINCTNESS_GUARD}"));
        None
    };
    Ok(CocycleReport {
        schema_version: SCHEMA_VERSION,
        generated_at_unix: unix_now(),
        config: cfg.clone(),
        classes,
        distinctness,
        warnings,
    })
}
