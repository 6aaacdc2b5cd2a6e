//! Asymptotic ordering of positive sequences: `ξ ≻ η` when `ξ_n/η_n → ∞`,
//! `ξ ∼ η` when the quotient tends to a positive limit, and algebraic decay
//! rates against `λ_cut`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{decreasing_fraction, fit_line, trend_axis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `ξ ≻ η`.
    Succ,
    /// `ξ ∼ η`.
    Sim,
    /// `ξ ≺ η`.
    Prec,
}

impl Relation {
    pub fn reversed(self) -> Self {
        match self {
            Self::Succ => Self::Prec,
            Self::Sim => Self::Sim,
            Self::Prec => Self::Succ,
        }
    }

    fn sign(self) -> i8 {
        match self {
            Self::Succ => 1,
            Self::Sim => 0,
            Self::Prec => -1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Self::Succ => "≻",
            Self::Sim => "∼",
            Self::Prec => "≺",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ComparabilityOptions {
    /// `|slope|` of `ln(ξ/η)` at or below which the quotient counts as flat.
    pub slope_tolerance: f64,
    /// Relative spread allowed for the trailing quotients of a `∼` pair.
    pub band: f64,
    /// Share of the sequence forming the trailing window.
    pub trailing_fraction: f64,
    /// Pairs below this confidence do not count as classified.
    pub confidence_threshold: f64,
}

impl Default for ComparabilityOptions {
    fn default() -> Self {
        Self {
            slope_tolerance: 0.1,
            band: 0.2,
            trailing_fraction: 0.5,
            confidence_threshold: 0.5,
        }
    }
}

impl ComparabilityOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.slope_tolerance > 0.0) || !(self.band > 0.0) {
            return Err(Error::Config("slope tolerance and band must be positive".into()));
        }
        if !(self.trailing_fraction > 0.0 && self.trailing_fraction <= 1.0) {
            return Err(Error::Config("trailing fraction must lie in (0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.confidence_threshold) {
            return Err(Error::Config("confidence threshold must lie in [0, 1]".into()));
        }
        Ok(())
    }

    fn trailing(&self, len: usize) -> usize {
        ((len as f64 * self.trailing_fraction).ceil() as usize).clamp(2.min(len), len)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub relation: Relation,
    /// Geometric mean of the trailing quotients; present iff `Sim`.
    pub lambda: Option<f64>,
    pub confidence: f64,
    /// `ξ_n/η_n`.
    pub quotient: Vec<f64>,
    pub slope: Option<f64>,
    /// `max − min` of the trailing `ln(ξ_n/η_n)`.
    pub log_spread: f64,
}

impl PairVerdict {
    /// The verdict for `(η, ξ)`.
    pub fn reversed(&self) -> Self {
        Self {
            relation: self.relation.reversed(),
            lambda: self.lambda.map(|l| 1.0 / l),
            confidence: self.confidence,
            quotient: self.quotient.iter().map(|q| 1.0 / q).collect(),
            slope: self.slope.map(|m| -m),
            log_spread: self.log_spread,
        }
    }
}

fn check_positive(name: &str, v: &[f64]) -> Result<()> {
    if let Some(bad) = v.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        return Err(Error::invalid(format!("{name} must be positive and finite, found {bad}")));
    }
    Ok(())
}

/// Classify `ξ` against `η`. The trend abscissa is `ln λ_cut` when `labels`
/// are given, the element index otherwise.
pub fn classify_pair(
    xi: &[f64],
    eta: &[f64],
    labels: Option<&[f64]>,
    options: &ComparabilityOptions,
) -> Result<PairVerdict> {
    options.validate()?;
    if xi.len() != eta.len() {
        return Err(Error::invalid(format!("sequence lengths differ: {} vs {}", xi.len(), eta.len())));
    }
    if labels.is_some_and(|l| l.len() != xi.len()) {
        return Err(Error::invalid("one label per element required"));
    }
    check_positive("ξ", xi)?;
    check_positive("η", eta)?;
    if let Some(l) = labels {
        check_positive("labels", l)?;
    }
    let quotient: Vec<f64> = xi.iter().zip(eta).map(|(a, b)| a / b).collect();
    let logq: Vec<f64> = xi.iter().zip(eta).map(|(a, b)| a.ln() - b.ln()).collect();
    let axis = trend_axis(labels, xi.len());
    let slope = fit_line(&axis, &logq).map(|f| f.slope);
    let tail = &logq[logq.len() - options.trailing(logq.len())..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let log_spread = if tail.is_empty() { 0.0 } else { hi - lo };
    let m = slope.unwrap_or(0.0);
    let flat = m.abs() <= options.slope_tolerance;
    let relation = if flat {
        Relation::Sim
    } else if m > 0.0 {
        Relation::Succ
    } else {
        Relation::Prec
    };
    let mut confidence = if xi.len() < 4 {
        0.0
    } else if flat {
        let band_share = 1.0 - log_spread / (1.0 + options.band).ln();
        (1.0 - m.abs() / options.slope_tolerance).min(band_share)
    } else {
        // Share of steps moving with the trend, scaled by how clearly the
        // slope clears the tolerance.
        let directed: Vec<f64> = logq.iter().map(|v| if m > 0.0 { -v } else { *v }).collect();
        let monotone = decreasing_fraction(&directed.iter().map(|v| v.exp()).collect::<Vec<_>>(), 0.0);
        monotone.min(m.abs() / options.slope_tolerance - 1.0)
    };
    confidence = confidence.clamp(0.0, 1.0);
    let lambda = flat.then(|| (tail.iter().sum::<f64>() / tail.len() as f64).exp());
    Ok(PairVerdict {
        relation,
        lambda,
        confidence,
        quotient,
        slope,
        log_spread,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub first: usize,
    pub second: usize,
    pub verdict: PairVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleVerdict {
    /// Every `stride`-th element, counted back from the finest.
    pub stride: usize,
    pub totally_comparable: bool,
    pub confidence: f64,
    pub inconsistent_triples: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityTable {
    pub names: Vec<String>,
    /// Pairs `first < second`.
    pub pairs: Vec<PairEntry>,
    /// High-confidence triples whose relations are not transitive.
    pub inconsistent_triples: Vec<[usize; 3]>,
    pub confidence: f64,
    pub totally_comparable: bool,
    pub subsamples: Vec<SubsampleVerdict>,
}

impl ComparabilityTable {
    /// Verdict of sequence `i` against sequence `j`.
    pub fn verdict(&self, i: usize, j: usize) -> Option<PairVerdict> {
        if i == j {
            return None;
        }
        let (a, b) = (i.min(j), i.max(j));
        let e = self.pairs.iter().find(|p| p.first == a && p.second == b)?;
        Some(if i < j { e.verdict.clone() } else { e.verdict.reversed() })
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Verdict between two named sequences.
    pub fn between(&self, a: &str, b: &str) -> Option<PairVerdict> {
        self.verdict(self.index(a)?, self.index(b)?)
    }
}

struct PairSet {
    pairs: Vec<PairEntry>,
    inconsistent: Vec<[usize; 3]>,
    confidence: f64,
    comparable: bool,
}

fn sign_of(pairs: &[PairEntry], i: usize, j: usize) -> (i8, f64) {
    let (a, b) = (i.min(j), i.max(j));
    let e = pairs.iter().find(|p| p.first == a && p.second == b).expect("all pairs present");
    let s = e.verdict.relation.sign();
    (if i < j { s } else { -s }, e.verdict.confidence)
}

fn transitive(ab: i8, bc: i8, ac: i8) -> bool {
    // Opposite strict signs constrain nothing.
    if (ab >= 0 && bc >= 0) || (ab <= 0 && bc <= 0) {
        ac == (ab + bc).signum()
    } else {
        true
    }
}

fn classify_all(sequences: &[&[f64]], labels: Option<&[f64]>, options: &ComparabilityOptions) -> Result<PairSet> {
    let count = sequences.len();
    let mut pairs = Vec::new();
    for i in 0..count {
        for j in i + 1..count {
            pairs.push(PairEntry {
                first: i,
                second: j,
                verdict: classify_pair(sequences[i], sequences[j], labels, options)?,
            });
        }
    }
    let mut inconsistent = Vec::new();
    for a in 0..count {
        for b in a + 1..count {
            for c in b + 1..count {
                let tri = [a, b, c];
                let strong = [(a, b), (b, c), (a, c)]
                    .iter()
                    .all(|&(x, y)| sign_of(&pairs, x, y).1 >= options.confidence_threshold);
                if !strong {
                    continue;
                }
                let ok = [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
                    .iter()
                    .all(|&(x, y, z)| transitive(sign_of(&pairs, x, y).0, sign_of(&pairs, y, z).0, sign_of(&pairs, x, z).0));
                if !ok {
                    inconsistent.push(tri);
                }
            }
        }
    }
    let mut confidence = pairs.iter().map(|p| p.verdict.confidence).fold(1.0, f64::min);
    if !inconsistent.is_empty() {
        confidence = 0.0;
    }
    let comparable = confidence >= options.confidence_threshold && inconsistent.is_empty();
    Ok(PairSet {
        pairs,
        inconsistent,
        confidence,
        comparable,
    })
}

/// All pairwise verdicts of a set of sequences sharing one index set.
/// Inconsistent triples are listed, never repaired; the set is also
/// classified on every other element to expose oscillation.
pub fn total_comparability(
    named: &[(&str, &[f64])],
    labels: Option<&[f64]>,
    options: &ComparabilityOptions,
) -> Result<ComparabilityTable> {
    if named.len() < 2 {
        return Err(Error::invalid("need at least two sequences"));
    }
    let len = named[0].1.len();
    if named.iter().any(|(_, s)| s.len() != len) {
        return Err(Error::invalid("sequences must share one length"));
    }
    let seqs: Vec<&[f64]> = named.iter().map(|(_, s)| *s).collect();
    let full = classify_all(&seqs, labels, options)?;
    let mut subsamples = vec![SubsampleVerdict {
        stride: 1,
        totally_comparable: full.comparable,
        confidence: full.confidence,
        inconsistent_triples: full.inconsistent.clone(),
    }];
    let picks: Vec<usize> = (0..len).rev().step_by(2).collect::<Vec<_>>().into_iter().rev().collect();
    if picks.len() >= 2 {
        let sub: Vec<Vec<f64>> = seqs.iter().map(|s| picks.iter().map(|&i| s[i]).collect()).collect();
        let sub_refs: Vec<&[f64]> = sub.iter().map(|v| v.as_slice()).collect();
        let sub_labels: Option<Vec<f64>> = labels.map(|l| picks.iter().map(|&i| l[i]).collect());
        let s = classify_all(&sub_refs, sub_labels.as_deref(), options)?;
        subsamples.push(SubsampleVerdict {
            stride: 2,
            totally_comparable: s.comparable,
            confidence: s.confidence,
            inconsistent_triples: s.inconsistent,
        });
    }
    Ok(ComparabilityTable {
        names: named.iter().map(|(n, _)| n.to_string()).collect(),
        pairs: full.pairs,
        inconsistent_triples: full.inconsistent,
        confidence: full.confidence,
        totally_comparable: full.comparable,
        subsamples,
    })
}

/// `ξ_n ≈ C·λ_cut(n)^{−rate}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rate: f64,
    pub constant: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    /// Number of trailing elements fitted.
    pub window: usize,
    pub note: Option<String>,
}

/// Least-squares power law over the trailing `window` elements (all when
/// `None`).
pub fn rate_fit(xi: &[f64], labels: &[f64], window: Option<usize>) -> Result<RateFit> {
    if xi.len() != labels.len() {
        return Err(Error::invalid("one label per element required"));
    }
    check_positive("ξ", xi)?;
    check_positive("labels", labels)?;
    let w = window.unwrap_or(xi.len()).min(xi.len());
    if w < 2 {
        return Err(Error::invalid("rate fit needs at least two points"));
    }
    let start = xi.len() - w;
    let x: Vec<f64> = labels[start..].iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = xi[start..].iter().map(|v| v.ln()).collect();
    let fit = fit_line(&x, &y).ok_or_else(|| Error::invalid("labels must not all coincide"))?;
    let rate = -fit.slope;
    Ok(RateFit {
        rate,
        constant: fit.intercept.exp(),
        residual: fit.residual,
        window: w,
        note: (rate <= 0.0).then(|| "sequence does not decay".to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(f: impl Fn(f64) -> f64) -> Vec<f64> {
        (1..=10).map(|n| f(n as f64)).collect()
    }

    #[test]
    fn constant_quotient_is_sim() {
        let v = classify_pair(&seq(|n| 1.0 / n), &seq(|n| 2.0 / n), None, &Default::default()).unwrap();
        assert_eq!(v.relation, Relation::Sim);
        assert!((v.lambda.unwrap() - 0.5).abs() < 1e-15);
        assert!(v.confidence > 1.0 - 1e-12);
    }

    #[test]
    fn growing_quotient_is_succ() {
        let v = classify_pair(&seq(|n| 1.0 / n), &seq(|n| 1.0 / (n * n)), None, &Default::default()).unwrap();
        assert_eq!(v.relation, Relation::Succ);
        assert!(v.lambda.is_none());
        assert!(v.confidence > 0.5);
        let r = classify_pair(&seq(|n| 1.0 / (n * n)), &seq(|n| 1.0 / n), None, &Default::default()).unwrap();
        assert_eq!(r.relation, Relation::Prec);
    }

    #[test]
    fn rejects_bad_input() {
        let o = ComparabilityOptions::default();
        assert!(classify_pair(&[1.0, 0.0, 1.0, 1.0], &[1.0; 4], None, &o).is_err());
        assert!(classify_pair(&[1.0; 4], &[1.0; 5], None, &o).is_err());
        let short = classify_pair(&[1.0; 3], &[2.0; 3], None, &o).unwrap();
        assert_eq!(short.confidence, 0.0);
    }

    #[test]
    fn oscillating_quotient_has_low_confidence() {
        let osc: Vec<f64> = (1..=10).map(|n| (2.0 + (-1f64).powi(n)) / n as f64).collect();
        let base = seq(|n| 1.0 / n);
        let t = total_comparability(&[("a", &base), ("b", &osc)], None, &Default::default()).unwrap();
        assert!(!t.totally_comparable);
        assert!(t.confidence < 0.5);
        assert_eq!(t.verdict(0, 1).unwrap().relation, Relation::Sim);
        // Every other element hides the oscillation.
        assert!(t.subsamples[1].totally_comparable);
    }

    #[test]
    fn three_sequences() {
        let (a, b, c) = (seq(|n| 1.0 / n), seq(|n| 2.0 / n), seq(|n| 1.0 / (n * n)));
        let t = total_comparability(&[("a", &a), ("b", &b), ("c", &c)], None, &Default::default()).unwrap();
        assert!(t.totally_comparable, "{t:?}");
        assert!(t.inconsistent_triples.is_empty());
        assert_eq!(t.between("b", "c").unwrap().relation, Relation::Succ);
        assert_eq!(t.between("c", "a").unwrap().relation, Relation::Prec);
        assert!((t.between("b", "a").unwrap().lambda.unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn intransitive_triple_is_listed() {
        assert!(!transitive(1, 1, 0));
        assert!(!transitive(0, 0, 1));
        assert!(transitive(1, -1, 0));
        assert!(transitive(0, 1, 1));
    }

    #[test]
    fn exact_power_laws() {
        let labels: Vec<f64> = (0..6).map(|j| (8.0 * 2f64.powi(j) + 1.0).powi(2)).collect();
        let xi: Vec<f64> = labels.iter().map(|l| l.powf(-0.5)).collect();
        let f = rate_fit(&xi, &labels, None).unwrap();
        assert!((f.rate - 0.5).abs() < 1e-10);
        let xi3: Vec<f64> = labels.iter().map(|l| 3.0 / l).collect();
        let f = rate_fit(&xi3, &labels, Some(4)).unwrap();
        assert!((f.rate - 1.0).abs() < 1e-10 && (f.constant - 3.0).abs() < 1e-9);
        assert_eq!(f.window, 4);
        let grow: Vec<f64> = labels.iter().map(|l| l.sqrt()).collect();
        assert!(rate_fit(&grow, &labels, None).unwrap().note.is_some());
    }
}
