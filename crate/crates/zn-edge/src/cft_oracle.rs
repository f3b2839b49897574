//! Compact-boson predictions for the edge spectra.
//!
//! A primary `|n, m⟩` has scaling dimension `Δ = n²/R² + R²m²/4` and
//! momentum `P = nm`. One unit of symmetry flux shifts the labels to
//! `n + p/N` and `m + 1/N`. Charges are `exp[i(2π/N)(m + pn)]`, which for
//! `N = 2, p = 1` is `e^{iπ(n+m)}`.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clock_algebra::root_of_unity;
use crate::error::{Error, Result};
use crate::symmetry::SptClass;

pub const DEFAULT_RADIUS: f64 = 2.0;

/// Scaling dimensions closer than this are treated as equal when sorting.
const DELTA_TIE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CftPrediction {
    pub n: i64,
    pub m: i64,
    pub radius: f64,
    pub class: SptClass,
    pub twisted: bool,
    pub delta: f64,
    pub momentum: f64,
    pub charge_phase: Complex64,
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("compactification radius R = {r} must be positive")))
    }
}

fn dimension(n: f64, m: f64, r: f64) -> f64 {
    n * n / (r * r) + r * r * m * m / 4.0
}

pub fn scaling_dimension(n: i64, m: i64, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(dimension(n as f64, m as f64, r))
}

pub fn cft_momentum(n: i64, m: i64) -> i64 {
    n * m
}

fn shifted(class: SptClass, n: i64, m: i64) -> (f64, f64) {
    let nn = class.n() as f64;
    (n as f64 + class.p() as f64 / nn, m as f64 + 1.0 / nn)
}

pub fn twisted_scaling_dimension(class: SptClass, n: i64, m: i64, r: f64) -> Result<f64> {
    check_radius(r)?;
    let (a, b) = shifted(class, n, m);
    Ok(dimension(a, b, r))
}

pub fn twisted_momentum(class: SptClass, n: i64, m: i64) -> f64 {
    let (a, b) = shifted(class, n, m);
    a * b
}

pub fn charge_prediction(class: SptClass, n: i64, m: i64) -> Complex64 {
    root_of_unity(class.n(), m + class.p() as i64 * n)
}

pub fn prediction(class: SptClass, n: i64, m: i64, r: f64, twisted: bool) -> Result<CftPrediction> {
    let (delta, momentum) = if twisted {
        (twisted_scaling_dimension(class, n, m, r)?, twisted_momentum(class, n, m))
    } else {
        (scaling_dimension(n, m, r)?, cft_momentum(n, m) as f64)
    };
    Ok(CftPrediction {
        n,
        m,
        radius: r,
        class,
        twisted,
        delta,
        momentum,
        charge_phase: charge_prediction(class, n, m),
    })
}

/// All labels with `|n| ≤ max_n`, `|m| ≤ max_m`, sorted by `Δ` and then by
/// `(|n|, |m|)`, with `(n, m)` as the final tie-break.
pub fn prediction_table(
    class: SptClass,
    r: f64,
    twisted: bool,
    max_n: u32,
    max_m: u32,
) -> Result<Vec<CftPrediction>> {
    check_radius(r)?;
    let (bn, bm) = (max_n as i64, max_m as i64);
    let mut table = Vec::with_capacity(((2 * bn + 1) * (2 * bm + 1)) as usize);
    for n in -bn..=bn {
        for m in -bm..=bm {
            table.push(prediction(class, n, m, r, twisted)?);
        }
    }
    table.sort_by(|a, b| {
        if (a.delta - b.delta).abs() > DELTA_TIE {
            a.delta.partial_cmp(&b.delta).unwrap_or(Ordering::Equal)
        } else {
            (a.n.abs(), a.m.abs(), a.n, a.m).cmp(&(b.n.abs(), b.m.abs(), b.n, b.m))
        }
    });
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(n: usize, p: usize) -> SptClass {
        SptClass::new(n, p).unwrap()
    }

    #[test]
    fn untwisted_values() {
        assert_eq!(scaling_dimension(0, 0, 1.3).unwrap(), 0.0);
        assert_eq!(scaling_dimension(1, 0, 2.0).unwrap(), 0.25);
        assert_eq!(scaling_dimension(-1, 0, 2.0).unwrap(), 0.25);
        assert_eq!(scaling_dimension(0, 1, 2.0).unwrap(), 1.0);
        assert!(scaling_dimension(0, 1, 0.0).is_err());
        assert_eq!(cft_momentum(1, 1), 1);
        assert_eq!(cft_momentum(-2, 3), -6);
    }

    #[test]
    fn twisted_values() {
        assert!((twisted_scaling_dimension(class(2, 1), 0, 0, 2.0).unwrap() - 5.0 / 16.0).abs() < 1e-15);
        assert!((twisted_scaling_dimension(class(3, 1), 0, 0, 2.0).unwrap() - 5.0 / 36.0).abs() < 1e-15);
        assert!((twisted_momentum(class(2, 1), 0, 0) - 0.25).abs() < 1e-15);
        assert!((twisted_momentum(class(3, 2), 1, 0) - 5.0 / 9.0).abs() < 1e-15);
        assert!(twisted_scaling_dimension(class(2, 1), 0, 0, -1.0).is_err());
    }

    #[test]
    fn charges() {
        assert_eq!(charge_prediction(class(2, 1), 0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(charge_prediction(class(2, 1), 1, 0), Complex64::new(-1.0, 0.0));
        let w = root_of_unity(3, 1);
        assert!((charge_prediction(class(3, 1), 1, 0) - w).norm() < 1e-15);
        assert!((charge_prediction(class(3, 1), -1, 0) - w.conj()).norm() < 1e-15);
    }

    #[test]
    fn tables() {
        let t = prediction_table(class(2, 1), 2.0, false, 0, 0).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!((t[0].n, t[0].m), (0, 0));

        let t = prediction_table(class(2, 1), 2.0, false, 1, 1).unwrap();
        assert_eq!((t[0].n, t[0].m), (0, 0));
        assert_eq!(t[1].delta, 0.25);
        assert_eq!(t[2].delta, 0.25);
        assert_eq!((t[1].n, t[1].m), (-1, 0));
        assert_eq!((t[2].n, t[2].m), (1, 0));

        let t = prediction_table(class(2, 1), 2.0, true, 1, 1).unwrap();
        let lows: Vec<(i64, i64)> =
            t.iter().filter(|p| (p.delta - 5.0 / 16.0).abs() < 1e-12).map(|p| (p.n, p.m)).collect();
        assert!(lows.contains(&(0, 0)) && lows.contains(&(-1, -1)));
        assert!((t[0].delta - 5.0 / 16.0).abs() < 1e-15);
    }
}
