//! Numerical re-checks of an extracted expansion against its sequence.

use serde::{Deserialize, Serialize};

use super::extract::ExpansionReport;
use super::vector::ScaleVector;
use crate::error::Result;
use crate::fit::{decreasing_fraction, fit_line};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyTolerances {
    /// Relative tolerance of the reconstruction identity in `Z_0`.
    pub reconstruction: f64,
    /// Tolerance on `|‖w_{k,n}‖_{Z_{k−1}} − 1|`.
    pub unit: f64,
    /// Relative increase tolerated between consecutive entries of a
    /// sequence that should decrease.
    pub monotone_slack: f64,
    /// Entries below this are treated as zero in monotonicity checks.
    pub zero_floor: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            reconstruction: 1e-12,
            unit: 1e-13,
            monotone_slack: 1e-9,
            zero_floor: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Term the check refers to.
    pub term: usize,
    pub passed: bool,
    /// Log-log slope of the checked trace, when it is a trend check.
    pub slope: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ConditionLog {
    pub checks: Vec<Check>,
}

impl ConditionLog {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn find(&self, name: &str, term: usize) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name && c.term == term)
    }
}

fn decreasing(values: &[f64], tol: &VerifyTolerances) -> bool {
    values
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + tol.monotone_slack) || w[1] <= tol.zero_floor)
}

fn trend(axis: &[f64], levels: &[usize], values: &[f64]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = levels
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > 0.0)
        .map(|(&l, v)| (axis[l], v.ln()))
        .unzip();
    fit_line(&x, &y).map(|f| f.slope)
}

/// Re-check the defining conditions of an expansion:
/// `Γ_{1,n}` decreasing, `Γ_{k+1,n}/Γ_{k,n}` decreasing,
/// `‖w_{k,n} − w_k‖_{Z_k}` decreasing, unit remainders, and exact
/// reconstruction of every element from the report.
pub fn verify_report<T: Real, V: ScaleVector<T>>(
    report: &ExpansionReport<V>,
    sequence: &[V],
    tol: &VerifyTolerances,
) -> Result<ConditionLog> {
    let mut log = ConditionLog::default();
    let s0 = report.scale.exponents()[0];
    let axis = &report.axis;
    for (ti, term) in report.terms.iter().enumerate() {
        let k = term.order;
        let s_prev = report.scale.exponents()[k - 1];
        if k == 1 {
            let slope = trend(axis, &term.levels, &term.gamma);
            let ok = decreasing(&term.gamma, tol) && slope.is_none_or(|m| m < 0.0);
            log.checks.push(Check {
                name: "gamma_decreasing".into(),
                term: k,
                passed: ok,
                slope,
                detail: format!("Γ_1 over {} levels, monotone share {:.2}", term.gamma.len(), decreasing_fraction(&term.gamma, 0.0)),
            });
        } else {
            let prev = &report.terms[ti - 1];
            let (ql, q): (Vec<usize>, Vec<f64>) = term
                .levels
                .iter()
                .zip(&term.gamma)
                .filter_map(|(&n, &g)| prev.levels.iter().position(|&m| m == n).map(|i| (n, g / prev.gamma[i])))
                .unzip();
            let slope = trend(axis, &ql, &q);
            let ok = decreasing(&q, tol) && slope.is_some_and(|m| m < 0.0);
            log.checks.push(Check {
                name: "quotient_decreasing".into(),
                term: k,
                passed: ok,
                slope,
                detail: format!("Γ_{k}/Γ_{} over {} levels", k - 1, q.len()),
            });
        }
        let recomputed: Vec<f64> = term
            .remainders
            .iter()
            .map(|w| w.axpy(-T::one(), &term.limit).map(|d| d.norm(term.limit_exponent).to_f64_lossy()))
            .collect::<Result<_>>()?;
        let drift = recomputed
            .iter()
            .zip(&term.limit_distance)
            .map(|(a, b)| (a - b).abs() / b.abs().max(tol.zero_floor))
            .fold(0.0, f64::max);
        log.checks.push(Check {
            name: "limit_consistent".into(),
            term: k,
            passed: drift <= 1e-9,
            slope: None,
            detail: format!("stored vs recomputed ‖w_{{k,n}} − w_k‖, max relative drift {drift:.3e}"),
        });
        let slope = trend(axis, &term.levels, &recomputed);
        log.checks.push(Check {
            name: "limit_distance_decreasing".into(),
            term: k,
            passed: decreasing(&recomputed, tol),
            slope,
            detail: format!(
                "‖w_{{k,n}} − w_k‖ in exponent {} from {:.3e} to {:.3e}",
                term.limit_exponent,
                recomputed.first().copied().unwrap_or(0.0),
                recomputed.last().copied().unwrap_or(0.0)
            ),
        });
        let unit_err = term
            .remainders
            .iter()
            .map(|w| (w.norm(s_prev).to_f64_lossy() - 1.0).abs())
            .fold(0.0, f64::max);
        log.checks.push(Check {
            name: "unit_remainder".into(),
            term: k,
            passed: unit_err <= tol.unit,
            slope: None,
            detail: format!("max |‖w_{{k,n}}‖ − 1| = {unit_err:.3e}"),
        });
        let mut worst: f64 = 0.0;
        for (i, &n) in term.levels.iter().enumerate() {
            let mut partial = report.limit.clone();
            for prev in &report.terms[..ti] {
                let Some(j) = prev.levels.iter().position(|&m| m == n) else {
                    continue;
                };
                partial = partial.axpy(T::lit(prev.gamma[j]), &prev.limit)?;
            }
            let rebuilt = partial.axpy(T::lit(term.gamma[i]), &term.remainders[i])?;
            let err = sequence[n].axpy(-T::one(), &rebuilt)?.norm(s0).to_f64_lossy();
            let scale = sequence[n].norm(s0).to_f64_lossy().max(f64::MIN_POSITIVE);
            worst = worst.max(err / scale);
        }
        log.checks.push(Check {
            name: "reconstruction".into(),
            term: k,
            passed: worst <= tol.reconstruction,
            slope: None,
            detail: format!("max relative error {worst:.3e}"),
        });
    }
    Ok(log)
}
