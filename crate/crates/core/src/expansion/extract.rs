//! Peeling construction of intrinsic expansions `v_n ≈ v + Σ Γ_{k,n} w_k`.

use serde::{Deserialize, Serialize};

use super::scale::SobolevScale;
use super::vector::ScaleVector;
use crate::error::{Error, Result};
use crate::fit::{decreasing_fraction, fit_line, trend_axis};
use crate::scalar::Real;

/// How the limit `v` of the sequence is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LimitMode {
    /// A known limit supplied by the caller.
    #[default]
    Reference,
    /// The last element; it is then excluded from the peeled sequence.
    Finest,
    /// Geometric extrapolation from the last three elements.
    Extrapolated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionOptions {
    pub scale: SobolevScale,
    pub limit: LimitMode,
    pub max_terms: usize,
    /// `w_k := 0` when the trailing `‖w_{k,n}‖_{Z_k}` is below this and
    /// still decreasing.
    pub degenerate_threshold: f64,
    /// Coefficients at or below `floor_rel · max_n ‖v_n‖_{Z_0}` are treated
    /// as zero.
    pub floor_rel: f64,
    /// Number of trailing remainders averaged into `w_k`.
    pub window: usize,
}

impl ExpansionOptions {
    pub fn new(scale: SobolevScale) -> Self {
        Self {
            max_terms: scale.len(),
            scale,
            limit: LimitMode::Reference,
            degenerate_threshold: 0.1,
            floor_rel: 1e-12,
            window: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms == 0 {
            return Err(Error::invalid("max_terms must be >= 1"));
        }
        if !(self.degenerate_threshold > 0.0 && self.degenerate_threshold < 1.0) {
            return Err(Error::invalid(format!(
                "degenerate threshold must lie in (0, 1), got {}",
                self.degenerate_threshold
            )));
        }
        if !(self.floor_rel >= 0.0) {
            return Err(Error::invalid("floor_rel must be >= 0"));
        }
        if self.window == 0 {
            return Err(Error::invalid("window must be >= 1"));
        }
        Ok(())
    }
}

/// One extracted term.
#[derive(Debug, Clone)]
pub struct Term<V> {
    /// `k`, starting at 1.
    pub order: usize,
    /// Indices into the input sequence at which this term is defined.
    pub levels: Vec<usize>,
    /// `Γ_{k,n} = ‖r_{k,n}‖_{Z_{k−1}}`.
    pub gamma: Vec<f64>,
    /// Unit remainders `w_{k,n}`.
    pub remainders: Vec<V>,
    /// `‖w_{k,n}‖_{Z_k}`.
    pub next_norms: Vec<f64>,
    /// Estimated `w_k`; zero when degenerate.
    pub limit: V,
    /// `‖w_{k,n} − w_k‖_{Z_k}`.
    pub limit_distance: Vec<f64>,
    pub degenerate: bool,
    /// Exponent of the norm measuring `w_k`; equals `s_{k−1}` when the scale
    /// has no `s_k`.
    pub limit_exponent: f64,
    /// Levels averaged into `w_k`.
    pub window: Vec<usize>,
    /// Share of monotone steps in the evidence for this term.
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    /// Every element equals the limit to within the floor.
    Trivial,
    /// Peeling ended on its own after `terms` terms.
    Finite { terms: usize },
    /// Peeling hit `max_terms` or ran out of exponents.
    TruncatedAtKmax { terms: usize },
}

#[derive(Debug, Clone)]
pub struct ExpansionReport<V> {
    pub limit: V,
    pub limit_mode: LimitMode,
    pub terms: Vec<Term<V>>,
    pub classification: Classification,
    /// Trend abscissa per sequence element: `ln λ_cut` or the index.
    pub axis: Vec<f64>,
    pub labels: Option<Vec<f64>>,
    /// Elements not used in any term (e.g. the finest one in `Finest` mode).
    pub excluded: Vec<usize>,
    pub floor: f64,
    pub scale: SobolevScale,
    pub notes: Vec<String>,
}

impl<V> ExpansionReport<V> {
    pub fn term(&self, k: usize) -> Option<&Term<V>> {
        self.terms.get(k.checked_sub(1)?)
    }

    pub fn nondegenerate_terms(&self) -> usize {
        self.terms.iter().filter(|t| !t.degenerate).count()
    }
}

fn slope_of(axis: &[f64], levels: &[usize], values: &[f64]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = levels
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > 0.0)
        .map(|(&l, v)| (axis[l], v.ln()))
        .unzip();
    fit_line(&x, &y).map(|f| f.slope)
}

/// Peel terms off `sequence` (ordered coarse to fine).
///
/// `labels` are `λ_cut` values used for trend fits; without them the
/// element index is used. `reference` is required in
/// [`LimitMode::Reference`].
pub fn extract<T: Real, V: ScaleVector<T>>(
    sequence: &[V],
    labels: Option<&[f64]>,
    reference: Option<&V>,
    options: &ExpansionOptions,
) -> Result<ExpansionReport<V>> {
    options.validate()?;
    if let Some(l) = labels {
        if l.len() != sequence.len() {
            return Err(Error::invalid(format!("{} labels for {} elements", l.len(), sequence.len())));
        }
        if l.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::invalid("labels must be positive"));
        }
    }
    if sequence.iter().any(|v| !v.is_finite()) || reference.is_some_and(|r| !r.is_finite()) {
        return Err(Error::NonFinite("expansion input".into()));
    }
    let s0 = options.scale.exponents()[0];
    let mut notes = Vec::new();
    if sequence.is_empty() {
        let limit = reference
            .cloned()
            .ok_or_else(|| Error::invalid("empty sequence without a reference"))?;
        return Ok(ExpansionReport {
            limit,
            limit_mode: options.limit,
            terms: Vec::new(),
            classification: Classification::Trivial,
            axis: Vec::new(),
            labels: None,
            excluded: Vec::new(),
            floor: 0.0,
            scale: options.scale.clone(),
            notes: vec!["empty sequence".into()],
        });
    }
    if sequence.len() < 3 {
        return Err(Error::invalid(format!("need at least 3 elements, got {}", sequence.len())));
    }
    let last = sequence.len() - 1;
    let mut active: Vec<usize> = (0..sequence.len()).collect();
    let mut excluded = Vec::new();
    let limit = match options.limit {
        LimitMode::Reference => reference
            .cloned()
            .ok_or_else(|| Error::invalid("reference limit mode needs a reference"))?,
        LimitMode::Finest => {
            active.pop();
            excluded.push(last);
            notes.push("limit taken as the finest element, which is excluded".into());
            sequence[last].clone()
        }
        LimitMode::Extrapolated => {
            let d1 = sequence[last].axpy(-T::one(), &sequence[last - 1])?;
            let d0 = sequence[last - 1].axpy(-T::one(), &sequence[last - 2])?;
            let (n1, n0) = (d1.norm(s0).to_f64_lossy(), d0.norm(s0).to_f64_lossy());
            let rho = if n0 > 0.0 { n1 / n0 } else { 1.0 };
            if rho < 1.0 {
                notes.push(format!("geometric extrapolation with ratio {rho:.4e}"));
                sequence[last].axpy(T::lit(rho / (1.0 - rho)), &d1)?
            } else {
                notes.push(format!("increments not contracting (ratio {rho:.4e}); finest element used"));
                sequence[last].clone()
            }
        }
    };
    let axis = trend_axis(labels, sequence.len());
    let scale_max = sequence
        .iter()
        .chain(std::iter::once(&limit))
        .map(|v| v.norm(s0).to_f64_lossy())
        .fold(0.0, f64::max);
    let floor = options.floor_rel * scale_max;

    let mut partial: Vec<V> = vec![limit.clone(); sequence.len()];
    let mut terms: Vec<Term<V>> = Vec::new();
    let k_max = options.max_terms.min(options.scale.len());
    let mut truncated = true;
    for k in 1..=k_max {
        let s_prev = options.scale.exponents()[k - 1];
        let s_next = options.scale.get(k);
        let limit_exponent = s_next.unwrap_or(s_prev);
        let mut levels = Vec::new();
        let mut gamma = Vec::new();
        let mut residuals = Vec::new();
        for &n in &active {
            let r = sequence[n].axpy(-T::one(), &partial[n])?;
            let g = r.norm(s_prev).to_f64_lossy();
            if g > floor {
                levels.push(n);
                gamma.push(g);
                residuals.push(r);
            }
        }
        if k == 1 && levels.is_empty() {
            notes.push("every element equals the limit to within the floor".into());
            return Ok(ExpansionReport {
                limit,
                limit_mode: options.limit,
                terms,
                classification: Classification::Trivial,
                axis,
                labels: labels.map(|l| l.to_vec()),
                excluded,
                floor,
                scale: options.scale.clone(),
                notes,
            });
        }
        if levels.len() < 2 {
            notes.push(format!("term {k}: fewer than two coefficients above the floor {floor:.3e}"));
            truncated = false;
            break;
        }
        let mut confidence = decreasing_fraction(&gamma, 0.0);
        if let Some(prev) = terms.last() {
            let (ql, q): (Vec<usize>, Vec<f64>) = levels
                .iter()
                .zip(&gamma)
                .filter_map(|(&n, &g)| prev.levels.iter().position(|&m| m == n).map(|i| (n, g / prev.gamma[i])))
                .unzip();
            let slope = slope_of(&axis, &ql, &q);
            match slope {
                Some(m) if m < 0.0 => {
                    confidence = confidence.min(decreasing_fraction(&q, 0.0));
                }
                _ => {
                    notes.push(format!(
                        "term {k}: quotient Γ_{k}/Γ_{} not decreasing (slope {slope:?}); stopped",
                        k - 1
                    ));
                    truncated = false;
                    break;
                }
            }
        }
        let remainders: Vec<V> = residuals
            .iter()
            .zip(&gamma)
            .map(|(r, &g)| r.scale(T::lit(1.0 / g)))
            .collect();
        let next_norms: Vec<f64> = remainders.iter().map(|w| w.norm(limit_exponent).to_f64_lossy()).collect();
        let take = options.window.min(levels.len());
        let window: Vec<usize> = levels[levels.len() - take..].to_vec();
        let mut estimate = remainders[0].zeros_like();
        for w in &remainders[remainders.len() - take..] {
            estimate = estimate.axpy(T::lit(1.0 / take as f64), w)?;
        }
        let degenerate = s_next.is_some()
            && *next_norms.last().expect("nonempty") < options.degenerate_threshold
            && slope_of(&axis, &levels, &next_norms).is_none_or(|m| m < 0.0);
        let w_k = if degenerate { estimate.zeros_like() } else { estimate };
        let limit_distance: Vec<f64> = remainders
            .iter()
            .map(|w| w.axpy(-T::one(), &w_k).map(|d| d.norm(limit_exponent).to_f64_lossy()))
            .collect::<Result<_>>()?;
        if s_next.is_none() {
            notes.push(format!("term {k}: scale has no exponent s_{k}; limit measured in s_{}", k - 1));
        }
        if degenerate {
            notes.push(format!("term {k}: degenerate, w_{k} = 0"));
        } else {
            for (&n, g) in levels.iter().zip(&gamma) {
                partial[n] = partial[n].axpy(T::lit(*g), &w_k)?;
            }
            active.retain(|n| !window.contains(n));
        }
        active.retain(|n| levels.contains(n));
        terms.push(Term {
            order: k,
            levels,
            gamma,
            remainders,
            next_norms,
            limit: w_k,
            limit_distance,
            degenerate,
            limit_exponent,
            window,
            confidence,
        });
    }
    let classification = if truncated {
        Classification::TruncatedAtKmax { terms: terms.len() }
    } else {
        Classification::Finite { terms: terms.len() }
    };
    Ok(ExpansionReport {
        limit,
        limit_mode: options.limit,
        terms,
        classification,
        axis,
        labels: labels.map(|l| l.to_vec()),
        excluded,
        floor,
        scale: options.scale.clone(),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{SpectralField, WaveGrid};

    fn unit(g: WaveGrid, k1: i64, k2: i64, s: f64) -> SpectralField<f64> {
        let c = SpectralField::cosine(g, k1, k2, 1.0).unwrap();
        let n = c.frac_norm(s).unwrap();
        c.scale(1.0 / n)
    }

    fn labels(count: usize) -> Vec<f64> {
        (0..count).map(|j| {
            let h = 16.0 * 2f64.powi(j as i32) / 2.0 + 1.0;
            h * h
        }).collect()
    }

    #[test]
    fn one_term_sequence_is_its_own_witness() {
        let g = WaveGrid::square(16).unwrap();
        let v = unit(g, 1, 1, 0.0).scale(3.0);
        let w = unit(g, 3, 2, 1.0);
        let lab = labels(6);
        let seq: Vec<_> = lab.iter().map(|l| v.axpy(l.powf(-0.5), &w).unwrap()).collect();
        let opts = ExpansionOptions::new(SobolevScale::new(vec![1.0, 0.5]).unwrap());
        let rep = extract(&seq, Some(&lab), Some(&v), &opts).unwrap();
        assert_eq!(rep.classification, Classification::Finite { terms: 1 });
        let t = rep.term(1).unwrap();
        for (g, l) in t.gamma.iter().zip(&lab) {
            assert!((g - l.powf(-0.5)).abs() < 1e-14);
        }
        assert!(t.limit.sub(&w).unwrap().frac_norm(0.5).unwrap() < 1e-12);
        assert!(!t.degenerate);
    }

    #[test]
    fn constant_sequence_is_trivial() {
        let g = WaveGrid::square(8).unwrap();
        let v = unit(g, 1, 0, 0.0);
        let seq = vec![v.clone(); 4];
        let opts = ExpansionOptions::new(SobolevScale::new(vec![0.5, 0.25]).unwrap());
        let rep = extract(&seq, None, Some(&v), &opts).unwrap();
        assert_eq!(rep.classification, Classification::Trivial);
        let empty: Vec<SpectralField<f64>> = Vec::new();
        let rep = extract(&empty, None, Some(&v), &opts).unwrap();
        assert_eq!(rep.classification, Classification::Trivial);
    }

    #[test]
    fn input_validation() {
        let g = WaveGrid::square(8).unwrap();
        let v = unit(g, 1, 0, 0.0);
        let opts = ExpansionOptions::new(SobolevScale::new(vec![0.5]).unwrap());
        assert!(extract(&[v.clone(), v.clone()], None, Some(&v), &opts).is_err());
        let bad = SpectralField::cosine(g, 1, 0, f64::NAN).unwrap();
        assert!(extract(&[v.clone(), v.clone(), bad], None, Some(&v), &opts).is_err());
        assert!(extract(&[v.clone(), v.clone(), v.clone()], None, None, &opts).is_err());
        let bad_opts = ExpansionOptions {
            degenerate_threshold: 1.5,
            ..opts
        };
        assert!(extract(&[v.clone(), v.clone(), v.clone()], None, Some(&v), &bad_opts).is_err());
    }

    #[test]
    fn finest_mode_excludes_last_element() {
        let g = WaveGrid::square(16).unwrap();
        let v = unit(g, 1, 1, 0.0);
        let w = unit(g, 2, 3, 0.5);
        let lab = labels(6);
        let mut seq: Vec<_> = lab.iter().map(|l| v.axpy(1.0 / l, &w).unwrap()).collect();
        seq.push(v.clone());
        let mut lab7 = lab.clone();
        lab7.push(1e12);
        let opts = ExpansionOptions {
            limit: LimitMode::Finest,
            ..ExpansionOptions::new(SobolevScale::new(vec![0.5, 0.25]).unwrap())
        };
        let rep = extract(&seq, Some(&lab7), None, &opts).unwrap();
        assert_eq!(rep.excluded, vec![6]);
        assert_eq!(rep.term(1).unwrap().levels, vec![0, 1, 2, 3, 4, 5]);
        assert!(rep.term(1).unwrap().limit.sub(&w).unwrap().frac_norm(0.25).unwrap() < 1e-12);
    }
}
