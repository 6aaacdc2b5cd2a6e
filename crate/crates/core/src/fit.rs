//! Small least-squares and trend helpers shared by the diagnostics.

use serde::{Deserialize, Serialize};

/// Ordinary least-squares line `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Fit a line; `None` with fewer than two points or degenerate abscissae.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x[..n].iter().sum::<f64>() / nf;
    let my = y[..n].iter().sum::<f64>() / nf;
    let sxx: f64 = x[..n].iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 || !sxx.is_finite() {
        return None;
    }
    let sxy: f64 = x[..n].iter().zip(&y[..n]).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x[..n]
        .iter()
        .zip(&y[..n])
        .map(|(a, b)| {
            let e = b - (intercept + slope * a);
            e * e
        })
        .sum();
    Some(LineFit {
        slope,
        intercept,
        residual: (ss / nf).sqrt(),
    })
}

/// Slope of `ln y` against `ln x`; entries with non-positive values are
/// dropped.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .unzip();
    fit_line(&lx, &ly)
}

/// Fraction of consecutive pairs with `y[i+1] <= y[i]·(1 + slack)`.
pub fn decreasing_fraction(y: &[f64], slack: f64) -> f64 {
    if y.len() < 2 {
        return 1.0;
    }
    let ok = y.windows(2).filter(|w| w[1] <= w[0] * (1.0 + slack)).count();
    ok as f64 / (y.len() - 1) as f64
}

/// Abscissae for trend fits: `ln λ_cut` when labels are given, else the
/// element index.
pub fn trend_axis(labels: Option<&[f64]>, len: usize) -> Vec<f64> {
    match labels {
        Some(l) => l.iter().map(|v| v.ln()).collect(),
        None => (0..len).map(|i| (i + 1) as f64).collect(),
    }
}
