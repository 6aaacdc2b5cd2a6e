//! Closed-form coefficients of the degenerate expansion `P_n g ≈ g + Σ Γ̃_{k,n}·0`.
//!
//! With all `w_k = 0`, every remainder is `−Q_n g`, so
//! `Γ̃_{k,n} = ‖Q_n g‖_{D(A^{s_{k−1}})}` and, since every excluded mode has
//! eigenvalue at least `λ_cut(n)`,
//! `Γ̃_{k+1,n}/Γ̃_{k,n} ≤ λ_cut(n)^{s_k − s_{k−1}}`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::extract::{extract, Classification, ExpansionOptions};
use super::scale::SobolevScale;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver::{compute_forcing, manufactured::manufactured_vorticity, Dealias};
use crate::spectral::{SpectralField, WaveGrid};

/// Built-in functions `g` for the degenerate-expansion example.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailSource {
    /// `amplitude·cos(k1 x + k2 y)`.
    SingleMode { k1: i64, k2: i64, amplitude: f64 },
    /// Forcing of the manufactured steady state at viscosity `nu`.
    ManufacturedForcing { nu: f64 },
    /// `ĝ_k = |k|^{−power}` for every `k ≠ 0`.
    AlgebraicTail { power: f64 },
}

impl TailSource {
    /// Parse `single-mode`, `manufactured-forcing` or `algebraic-tail`.
    pub fn builtin(name: &str, nu: f64) -> Result<Self> {
        match name {
            "single-mode" => Ok(Self::SingleMode {
                k1: 20,
                k2: 0,
                amplitude: 1.0,
            }),
            "manufactured-forcing" => Ok(Self::ManufacturedForcing { nu }),
            "algebraic-tail" => Ok(Self::AlgebraicTail { power: 3.0 }),
            other => Err(Error::Config(format!(
                "unknown source '{other}'; expected single-mode, manufactured-forcing or algebraic-tail"
            ))),
        }
    }

    pub fn field<T: Real>(&self, grid: WaveGrid) -> Result<SpectralField<T>> {
        match *self {
            Self::SingleMode { k1, k2, amplitude } => SpectralField::cosine(grid, k1, k2, T::lit(amplitude)),
            Self::ManufacturedForcing { nu } => {
                compute_forcing(&manufactured_vorticity::<T>(grid), T::lit(nu), Dealias::TwoThirds)
            }
            Self::AlgebraicTail { power } => Ok(SpectralField::from_fn(grid, |k1, k2| {
                let r2 = (k1 * k1 + k2 * k2) as f64;
                Complex::new(T::lit(r2.powf(-power / 2.0)), T::zero())
            })),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub resolution: usize,
    pub lambda_cut: u64,
    /// `Γ̃_{k,n}`, `k = 1..=K`.
    pub gamma: Vec<f64>,
    /// `Γ̃_{k+1,n}/Γ̃_{k,n}`.
    pub ratios: Vec<f64>,
    /// `λ_cut(n)^{s_k − s_{k−1}}`.
    pub bounds: Vec<f64>,
    pub bounds_hold: Vec<bool>,
    /// `Q_n g ≠ 0`.
    pub hypothesis_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleTable {
    pub scale: SobolevScale,
    pub rows: Vec<OracleRow>,
    pub notes: Vec<String>,
}

/// Direct tail sums of `g` beyond each cutoff. `g` must live on a grid
/// strictly finer than every cutoff.
pub fn example3_oracle<T: Real>(g: &SpectralField<T>, scale: &SobolevScale, cutoffs: &[WaveGrid]) -> Result<OracleTable> {
    let mut rows = Vec::with_capacity(cutoffs.len());
    let mut notes = Vec::new();
    for cut in cutoffs {
        if !cut.is_subset_of(g.grid()) || cut == g.grid() {
            return Err(Error::GridMismatch(format!(
                "g on {} must be strictly finer than cutoff {cut}",
                g.grid()
            )));
        }
        let gamma: Vec<f64> = scale
            .exponents()
            .iter()
            .map(|&s| g.tail_norm(cut, T::lit(s)).map(|v| v.to_f64_lossy()))
            .collect::<Result<_>>()?;
        let lambda = cut.lambda_cut();
        let hypothesis_holds = gamma[0] > 0.0;
        if !hypothesis_holds {
            notes.push(format!("Q_n g = 0 at resolution {}; hypothesis violated", cut.resolution()));
        }
        let mut ratios = Vec::new();
        let mut bounds = Vec::new();
        let mut bounds_hold = Vec::new();
        for k in 1..gamma.len() {
            let ratio = if gamma[k - 1] > 0.0 { gamma[k] / gamma[k - 1] } else { 0.0 };
            let bound = (lambda as f64).powf(scale.exponents()[k] - scale.exponents()[k - 1]);
            ratios.push(ratio);
            bounds.push(bound);
            // Equality holds for a tail concentrated on |k|² = λ_cut.
            bounds_hold.push(ratio <= bound * (1.0 + 4.0 * f64::EPSILON));
        }
        rows.push(OracleRow {
            resolution: cut.resolution(),
            lambda_cut: lambda,
            gamma,
            ratios,
            bounds,
            bounds_hold,
            hypothesis_holds,
        });
    }
    Ok(OracleTable {
        scale: scale.clone(),
        rows,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineComparison {
    pub oracle: OracleTable,
    /// Engine `Γ_{k,n}` per term and row; `None` where the engine has no
    /// coefficient or the term follows a non-degenerate one.
    pub engine_gamma: Vec<Vec<Option<f64>>>,
    /// Largest `|Γ − Γ̃|/Γ̃` over compared entries, per term.
    pub relative_delta: Vec<Option<f64>>,
    pub degenerate: Vec<bool>,
    pub classification: Classification,
    pub notes: Vec<String>,
}

impl EngineComparison {
    pub fn max_relative_delta(&self) -> Option<f64> {
        self.relative_delta.iter().flatten().copied().reduce(f64::max)
    }

    /// Number of oracle entries the engine reproduced.
    pub fn compared(&self) -> usize {
        self.engine_gamma.iter().flatten().filter(|v| v.is_some()).count()
    }
}

/// Run the expansion engine on `P_n g` against the limit `g` and put its
/// coefficients next to the oracle's. A term is only comparable while every
/// earlier term was found degenerate.
pub fn compare_with_engine<T: Real>(
    g: &SpectralField<T>,
    cutoffs: &[WaveGrid],
    options: &ExpansionOptions,
) -> Result<EngineComparison> {
    let oracle = example3_oracle(g, &options.scale, cutoffs)?;
    let sequence: Vec<SpectralField<T>> = cutoffs
        .iter()
        .map(|c| g.project(c))
        .collect::<Result<_>>()?;
    let labels: Vec<f64> = cutoffs.iter().map(|c| c.lambda_cut() as f64).collect();
    let report = extract(&sequence, Some(&labels), Some(g), options)?;
    let mut notes = report.notes.clone();
    let k_total = options.scale.len();
    let mut engine_gamma = vec![vec![None; cutoffs.len()]; k_total];
    let mut relative_delta = vec![None; k_total];
    let mut all_previous_degenerate = true;
    for term in &report.terms {
        let k = term.order;
        if !all_previous_degenerate {
            notes.push(format!("term {k} follows a non-degenerate term; not comparable"));
            break;
        }
        let mut worst: Option<f64> = None;
        for (&n, &gam) in term.levels.iter().zip(&term.gamma) {
            engine_gamma[k - 1][n] = Some(gam);
            let exact = oracle.rows[n].gamma[k - 1];
            let d = (gam - exact).abs() / exact;
            worst = Some(worst.map_or(d, |w: f64| w.max(d)));
        }
        relative_delta[k - 1] = worst;
        all_previous_degenerate = term.degenerate;
    }
    Ok(EngineComparison {
        oracle,
        engine_gamma,
        relative_delta,
        degenerate: report.terms.iter().map(|t| t.degenerate).collect(),
        classification: report.classification,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_closed_form() {
        let fine = WaveGrid::square(64).unwrap();
        let g = TailSource::builtin("single-mode", 0.01).unwrap().field::<f64>(fine).unwrap();
        let scale = SobolevScale::new(vec![1.0, 0.5]).unwrap();
        let cut = WaveGrid::square(32).unwrap();
        let t = example3_oracle(&g, &scale, &[cut]).unwrap();
        let r = &t.rows[0];
        let pi = std::f64::consts::PI;
        let root2 = 2f64.sqrt();
        assert!((r.gamma[0] - 400.0 * pi * root2).abs() < 1e-12 * r.gamma[0]);
        assert!((r.gamma[1] - 20.0 * pi * root2).abs() < 1e-12 * r.gamma[1]);
        assert!((r.ratios[0] - 0.05).abs() < 1e-15);
        assert!((r.bounds[0] - 1.0 / 17.0).abs() < 1e-15);
        assert!(r.bounds_hold[0] && r.hypothesis_holds);
    }

    #[test]
    fn empty_tail_flags_hypothesis() {
        let fine = WaveGrid::square(64).unwrap();
        let g = SpectralField::<f64>::cosine(fine, 3, 0, 1.0).unwrap();
        let scale = SobolevScale::new(vec![1.0, 0.5]).unwrap();
        let t = example3_oracle(&g, &scale, &[WaveGrid::square(16).unwrap()]).unwrap();
        assert!(!t.rows[0].hypothesis_holds);
        assert_eq!(t.notes.len(), 1);
        assert!(example3_oracle(&g, &scale, &[fine]).is_err());
    }

    #[test]
    fn unknown_source_is_config_error() {
        assert!(matches!(TailSource::builtin("nope", 0.01), Err(Error::Config(_))));
    }
}
