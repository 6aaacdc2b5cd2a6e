//! Convergence diagnostics of a steady ladder against its reference state:
//! `Γ_{1,n} = ‖ω_n − ω‖`, `ρ_{1,n} = ‖b̃_n − b̃‖`, `G_n = ‖Q_n g‖`, their
//! quotients, rate products, and residuals of the relations shared by the
//! normalized differences.

use serde::{Deserialize, Serialize};

use crate::comparability::{ComparabilityOptions, ComparabilityTable, Relation, total_comparability};
use crate::error::{Error, Result};
use crate::expansion::ExpansionReport;
use crate::fit::{log_log_fit, trend_axis};
use crate::scalar::Real;
use crate::solver::{Advection, LadderArchive, LevelRecord, NonlinearMode};
use crate::spectral::SpectralField;

/// Whether the `A`-term of `E_n` carries the viscosity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResidualScaling {
    /// `‖νA(ω_n−ω) + (b̃_n−b̃) + Q_n g‖/Γ_{1,n}`; zero up to the steady
    /// residual.
    #[default]
    WithViscosity,
    /// `‖A(ω_n−ω) + (b̃_n−b̃) + Q_n g‖/Γ_{1,n}`.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiagnosticsOptions {
    /// Exponents `α*` of the rate products `‖u_n − u‖_{D(A)}·λ_cut^{α*}`.
    pub alpha_grid: Vec<f64>,
    pub scaling: ResidualScaling,
    /// Multiple of the steady tolerance bounding `Γ_{1,n}·E_n`.
    pub residual_bound_factor: f64,
    /// `Γ_{1,n} <= trivial_rel·‖ω‖` counts as zero.
    pub trivial_rel: f64,
    /// Trailing levels averaged into `ŵ₁`, `b̂₁`, `φ̂₁`.
    pub window: usize,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        Self {
            alpha_grid: vec![0.25, 0.5, 0.75, 1.0],
            scaling: ResidualScaling::WithViscosity,
            residual_bound_factor: 10.0,
            trivial_rel: 1e-9,
            window: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub resolution: usize,
    pub lambda_cut: u64,
    pub converged: bool,
    pub steady_residual: f64,
    pub gamma1: f64,
    pub rho1: f64,
    pub g_n: f64,
    /// `ρ_{1,n}/Γ_{1,n}`, the estimate of `μ₀`.
    pub rho_over_gamma: Option<f64>,
    /// `G_n/Γ_{1,n}`, the estimate of `μ₀₀`.
    pub g_over_gamma: Option<f64>,
    /// `‖u_n − u‖_{D(A)} = ‖A^{1/2}(ω_n − ω)‖`.
    pub velocity_error: f64,
    /// `‖u_n − u‖_{D(A)}·λ_cut^{α*}` per entry of the `α*` grid.
    pub rate_products: Vec<f64>,
    pub e_n: Option<f64>,
    /// `factor·ε_ss/Γ_{1,n}` when the identity applies.
    pub e_n_bound: Option<f64>,
    /// `Γ_{1,n}` below the trivial threshold.
    pub trivial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateProductSeries {
    pub alpha: f64,
    /// Log-log slope of the product against `λ_cut`.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsTable {
    pub nu: f64,
    pub steady_tol: f64,
    pub eval_resolution: usize,
    pub scaling: ResidualScaling,
    pub alpha_grid: Vec<f64>,
    pub rows: Vec<DiagnosticsRow>,
    pub rate_series: Vec<RateProductSeries>,
    /// `α*` with the flattest rate product.
    pub flattest_alpha: Option<f64>,
    /// `‖b̃‖ <= trivial_rel·‖ω‖²` on the reference.
    pub linear: bool,
    pub notes: Vec<String>,
}

impl DiagnosticsTable {
    pub fn gamma1(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.gamma1).collect()
    }

    pub fn rho1(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.rho1).collect()
    }

    pub fn g_n(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.g_n).collect()
    }

    pub fn lambda_cuts(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.lambda_cut as f64).collect()
    }

    /// Classify `{Γ_{1,n}, ρ_{1,n}, G_n}`; sequences with a zero entry are
    /// left out.
    pub fn comparability(&self, options: &ComparabilityOptions) -> Result<ComparabilityTable> {
        let labels = self.lambda_cuts();
        let series = [("Gamma1", self.gamma1()), ("rho1", self.rho1()), ("Gn", self.g_n())];
        let named: Vec<(&str, &[f64])> = series
            .iter()
            .filter(|(_, s)| s.iter().all(|v| *v > 0.0))
            .map(|(n, s)| (*n, s.as_slice()))
            .collect();
        total_comparability(&named, Some(&labels), options)
    }
}

fn sorted_levels<T: Real>(archive: &LadderArchive<T>) -> Result<Vec<&LevelRecord<T>>> {
    if archive.levels.is_empty() {
        return Err(Error::MissingArtifact("ladder archive has no levels".into()));
    }
    let mut levels: Vec<&LevelRecord<T>> = archive.levels.iter().collect();
    levels.sort_by_key(|l| l.resolution());
    let eval = archive.reference.grid();
    if let Some(l) = levels.iter().find(|l| !l.grid().is_subset_of(eval) || l.grid() == eval) {
        return Err(Error::GridMismatch(format!(
            "level {} is not strictly coarser than the evaluation grid {eval}",
            l.grid()
        )));
    }
    Ok(levels)
}

/// Transport term of a level moved to the evaluation grid.
fn level_advection<T: Real>(level: &LevelRecord<T>, archive: &LadderArchive<T>) -> SpectralField<T> {
    level.advection.resample(*archive.reference.grid())
}

/// `ν·A(ω_n−ω) + (b̃_n−b̃) + Q_n g` (or without `ν`) on the evaluation grid.
fn relation_defect<T: Real>(
    level: &LevelRecord<T>,
    archive: &LadderArchive<T>,
    scaling: ResidualScaling,
) -> Result<SpectralField<T>> {
    let r = &archive.reference;
    let diff = level.steady.omega.resample(*r.grid()).sub(&r.omega)?;
    let nu = match scaling {
        ResidualScaling::WithViscosity => T::lit(archive.config.nu),
        ResidualScaling::Literal => T::one(),
    };
    let tail = r.forcing.complement(level.grid())?;
    diff.laplacian_neg()
        .scale(nu)
        .add(&level_advection(level, archive).sub(&r.advection)?)?
        .add(&tail)
}

/// Every quantity of the table, levels sorted by resolution.
pub fn compute_table<T: Real>(archive: &LadderArchive<T>, options: &DiagnosticsOptions) -> Result<DiagnosticsTable> {
    let levels = sorted_levels(archive)?;
    let r = &archive.reference;
    let eval = *r.grid();
    let omega_norm = r.omega.l2_norm().to_f64_lossy();
    let linear = r.advection.l2_norm().to_f64_lossy() <= options.trivial_rel * omega_norm * omega_norm;
    let mut notes = Vec::new();
    if linear {
        notes.push("reference transport term vanishes; ρ_{1,n} carries no information".into());
    }
    let mut rows = Vec::with_capacity(levels.len());
    for level in &levels {
        let grid = *level.grid();
        let diff = level.steady.omega.resample(eval).sub(&r.omega)?;
        let gamma1 = diff.l2_norm().to_f64_lossy();
        let rho1 = level_advection(level, archive).sub(&r.advection)?.l2_norm().to_f64_lossy();
        let g_n = r.forcing.tail_norm(&grid, T::zero())?.to_f64_lossy();
        let velocity_error = diff.velocity_norm(T::one()).to_f64_lossy();
        let lambda = grid.lambda_cut();
        let rate_products = options
            .alpha_grid
            .iter()
            .map(|a| velocity_error * (lambda as f64).powf(*a))
            .collect();
        let trivial = gamma1 <= options.trivial_rel * omega_norm;
        let positive = (gamma1 > 0.0 && !trivial).then_some(gamma1);
        let e_n = match positive {
            Some(g) => Some(relation_defect(level, archive, options.scaling)?.l2_norm().to_f64_lossy() / g),
            None => None,
        };
        let identity = options.scaling == ResidualScaling::WithViscosity
            && level.advection_mode == NonlinearMode::Projected;
        let e_n_bound = positive
            .filter(|_| identity)
            .map(|g| options.residual_bound_factor * archive.config.steady_tol / g);
        if !level.steady.converged {
            notes.push(format!("level {} did not converge", grid.resolution()));
        }
        if trivial {
            notes.push(format!("level {}: Γ_1 = {gamma1:.3e} is trivial", grid.resolution()));
        }
        rows.push(DiagnosticsRow {
            resolution: grid.resolution(),
            lambda_cut: lambda,
            converged: level.steady.converged,
            steady_residual: level.steady.residual,
            gamma1,
            rho1,
            g_n,
            rho_over_gamma: positive.map(|g| rho1 / g),
            g_over_gamma: positive.map(|g| g_n / g),
            velocity_error,
            rate_products,
            e_n,
            e_n_bound,
            trivial,
        });
    }
    let lambdas: Vec<f64> = rows.iter().map(|r| r.lambda_cut as f64).collect();
    let rate_series: Vec<RateProductSeries> = options
        .alpha_grid
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let values: Vec<f64> = rows.iter().map(|r| r.rate_products[i]).collect();
            RateProductSeries {
                alpha,
                slope: log_log_fit(&lambdas, &values).map(|f| f.slope),
            }
        })
        .collect();
    let flattest_alpha = rate_series
        .iter()
        .filter_map(|s| s.slope.map(|m| (s.alpha, m.abs())))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(a, _)| a);
    Ok(DiagnosticsTable {
        nu: archive.config.nu,
        steady_tol: archive.config.steady_tol,
        eval_resolution: eval.resolution(),
        scaling: options.scaling,
        alpha_grid: options.alpha_grid.clone(),
        rows,
        rate_series,
        flattest_alpha,
        linear,
        notes,
    })
}

/// `w_n^{(1)} = (ω_n−ω)/Γ_{1,n}`, `b_n^{(1)} = (b̃_n−b̃)/ρ_{1,n}`,
/// `f_n^{(1)} = (g_n−g)/G_n` on the evaluation grid.
#[derive(Debug, Clone)]
pub struct NormalizedLevel<T: Real> {
    pub resolution: usize,
    pub w: Option<SpectralField<T>>,
    pub b: Option<SpectralField<T>>,
    pub f: Option<SpectralField<T>>,
}

#[derive(Debug, Clone)]
pub struct NormalizedVectors<T: Real> {
    pub levels: Vec<NormalizedLevel<T>>,
    /// Trailing-window averages `ŵ₁`, `b̂₁`, `φ̂₁`.
    pub w_hat: Option<SpectralField<T>>,
    pub b_hat: Option<SpectralField<T>>,
    pub f_hat: Option<SpectralField<T>>,
    pub notes: Vec<String>,
}

fn window_average<T: Real>(fields: Vec<&SpectralField<T>>, window: usize) -> Result<Option<SpectralField<T>>> {
    let take = window.min(fields.len());
    if take == 0 {
        return Ok(None);
    }
    let mut acc = SpectralField::zeros(*fields[0].grid());
    for f in &fields[fields.len() - take..] {
        acc.axpy_mut(T::lit(1.0 / take as f64), f)?;
    }
    Ok(Some(acc))
}

pub fn normalized_vectors<T: Real>(
    archive: &LadderArchive<T>,
    table: &DiagnosticsTable,
    options: &DiagnosticsOptions,
) -> Result<NormalizedVectors<T>> {
    let levels = sorted_levels(archive)?;
    let r = &archive.reference;
    let eval = *r.grid();
    let mut out = Vec::with_capacity(levels.len());
    let mut notes = Vec::new();
    for (level, row) in levels.iter().zip(&table.rows) {
        let n = row.resolution;
        let scaled = |f: SpectralField<T>, d: f64, what: &str, notes: &mut Vec<String>| {
            if d > 0.0 && !row.trivial {
                Some(f.scale(T::lit(1.0 / d)))
            } else {
                notes.push(format!("level {n}: {what} has zero denominator; skipped"));
                None
            }
        };
        let w = scaled(level.steady.omega.resample(eval).sub(&r.omega)?, row.gamma1, "w", &mut notes);
        let b = scaled(level_advection(level, archive).sub(&r.advection)?, row.rho1, "b", &mut notes);
        let f = scaled(r.forcing.complement(level.grid())?.scale(-T::one()), row.g_n, "f", &mut notes);
        out.push(NormalizedLevel { resolution: n, w, b, f });
    }
    let w_hat = window_average(out.iter().filter_map(|l| l.w.as_ref()).collect(), options.window)?;
    let b_hat = window_average(out.iter().filter_map(|l| l.b.as_ref()).collect(), options.window)?;
    let f_hat = window_average(out.iter().filter_map(|l| l.f.as_ref()).collect(), options.window)?;
    Ok(NormalizedVectors {
        levels: out,
        w_hat,
        b_hat,
        f_hat,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstMethodLevel {
    pub resolution: usize,
    pub e_n: Option<f64>,
    pub bound: Option<f64>,
    pub within_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstMethodResiduals {
    pub levels: Vec<FirstMethodLevel>,
    pub mu0: Option<f64>,
    pub mu00: Option<f64>,
    /// `‖νAŵ₁ + μ̂₀b̂₁ − μ̂₀₀φ̂₁‖` (`ν` per the scaling mode).
    pub limit_residual: Option<f64>,
}

fn trailing_mean(values: impl Iterator<Item = Option<f64>>, window: usize) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    let take = window.min(v.len());
    (take > 0).then(|| v[v.len() - take..].iter().sum::<f64>() / take as f64)
}

pub fn relation_residual_first_method<T: Real>(
    archive: &LadderArchive<T>,
    table: &DiagnosticsTable,
    vectors: &NormalizedVectors<T>,
    options: &DiagnosticsOptions,
) -> Result<FirstMethodResiduals> {
    let levels = table
        .rows
        .iter()
        .map(|r| FirstMethodLevel {
            resolution: r.resolution,
            e_n: r.e_n,
            bound: r.e_n_bound,
            within_bound: r.e_n.zip(r.e_n_bound).map(|(e, b)| e <= b),
        })
        .collect();
    let mu0 = trailing_mean(table.rows.iter().map(|r| r.rho_over_gamma), options.window);
    let mu00 = trailing_mean(table.rows.iter().map(|r| r.g_over_gamma), options.window);
    let nu = match options.scaling {
        ResidualScaling::WithViscosity => T::lit(archive.config.nu),
        ResidualScaling::Literal => T::one(),
    };
    let limit_residual = match (&vectors.w_hat, mu0) {
        (Some(w), Some(m0)) => {
            let mut acc = w.laplacian_neg().scale(nu);
            if let Some(b) = &vectors.b_hat {
                acc.axpy_mut(T::lit(m0), b)?;
            }
            if let (Some(f), Some(m00)) = (&vectors.f_hat, mu00) {
                acc.axpy_mut(T::lit(-m00), f)?;
            }
            Some(acc.l2_norm().to_f64_lossy())
        }
        _ => None,
    };
    Ok(FirstMethodResiduals {
        levels,
        mu0,
        mu00,
        limit_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub resolution: usize,
    /// `‖Q_n B(ω,ω)‖_{D(A^β)}`.
    pub rho0: f64,
    /// `‖Q_n B_s(ω,w₁)‖_{D(A^β)}`.
    pub rho1: Option<f64>,
    /// `‖Q_n B(w_m,w_j)‖_{D(A^β)}` for `(m, j)` over the extracted terms.
    pub cross: Vec<((usize, usize), f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SecondMethodVerdict {
    /// `w₁ = 0`: the expansion is degenerate and no relation is checked.
    Degenerate,
    Residuals {
        /// `‖νAw₁ + B_s(ω,w₁)‖_{D(A^β)}`.
        first: f64,
        /// `‖νAw₂ + B_s(ω,w₂) + λ̂B(w₁,w₁)‖_{D(A^β)}`.
        second: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondMethodResiduals {
    pub beta: f64,
    pub tails: Vec<TailRow>,
    pub verdict: SecondMethodVerdict,
    pub notes: Vec<String>,
}

/// Tail norms of the transport term along the ladder and residuals of the
/// linearized relations satisfied by the first two expansion terms of the
/// vorticity. `lambda_hat` estimates `lim Γ_{1,n}²/Γ_{2,n}`.
pub fn relation_residual_second_method<T: Real>(
    archive: &LadderArchive<T>,
    report: &ExpansionReport<SpectralField<T>>,
    beta: f64,
    lambda_hat: Option<f64>,
) -> Result<SecondMethodResiduals> {
    if !(beta >= 0.0) {
        return Err(Error::invalid(format!("β must be >= 0, got {beta}")));
    }
    let levels = sorted_levels(archive)?;
    let r = &archive.reference;
    let eval = *r.grid();
    let nu = T::lit(archive.config.nu);
    let b = T::lit(beta);
    // Full products on twice the evaluation resolution, where they are exact.
    let full = Advection::unprojected(eval)?;
    let projected = Advection::new(eval, archive.config.dealias)?;
    let symmetric = |adv: &Advection<T>, w: &SpectralField<T>| -> Result<SpectralField<T>> {
        adv.bilinear(&r.omega, w)?.add(&adv.bilinear(w, &r.omega)?)
    };
    let terms: Vec<&SpectralField<T>> = report
        .terms
        .iter()
        .filter(|t| !t.degenerate)
        .map(|t| &t.limit)
        .filter(|w| w.grid() == &eval)
        .collect();
    let mut notes = Vec::new();
    if terms.len() < report.nondegenerate_terms() {
        notes.push("report limits not on the evaluation grid were skipped".into());
    }
    let vv = full.term(&r.omega)?;
    let vw1 = terms.first().map(|w| symmetric(&full, w)).transpose()?;
    let mut cross_fields = Vec::new();
    for (m, wm) in terms.iter().enumerate() {
        for (j, wj) in terms.iter().enumerate() {
            cross_fields.push(((m + 1, j + 1), full.bilinear(wm, wj)?));
        }
    }
    let mut tails = Vec::with_capacity(levels.len());
    for level in &levels {
        let grid = level.grid();
        tails.push(TailRow {
            resolution: grid.resolution(),
            rho0: vv.tail_norm(grid, b)?.to_f64_lossy(),
            rho1: vw1.as_ref().map(|f| f.tail_norm(grid, b).map(|v| v.to_f64_lossy())).transpose()?,
            cross: cross_fields
                .iter()
                .map(|(mj, f)| f.tail_norm(grid, b).map(|v| (*mj, v.to_f64_lossy())))
                .collect::<Result<_>>()?,
        });
    }
    let first_term = report.terms.first();
    let verdict = match first_term {
        Some(t) if !t.degenerate && t.limit.grid() == &eval => {
            let w1 = &t.limit;
            let first = w1
                .laplacian_neg()
                .scale(nu)
                .add(&symmetric(&projected, w1)?)?
                .frac_norm(b)?
                .to_f64_lossy();
            let second = match (report.terms.get(1), lambda_hat) {
                (Some(t2), Some(lam)) if !t2.degenerate && t2.limit.grid() == &eval => {
                    let w2 = &t2.limit;
                    let mut acc = w2.laplacian_neg().scale(nu).add(&symmetric(&projected, w2)?)?;
                    acc.axpy_mut(T::lit(lam), &projected.bilinear(w1, w1)?)?;
                    Some(acc.frac_norm(b)?.to_f64_lossy())
                }
                (Some(_), None) => {
                    notes.push("no λ̂ supplied; second relation skipped".into());
                    None
                }
                _ => None,
            };
            SecondMethodVerdict::Residuals { first, second }
        }
        _ => SecondMethodVerdict::Degenerate,
    };
    Ok(SecondMethodResiduals {
        beta,
        tails,
        verdict,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcase {
    /// `Γ_{1,n} ∼ ρ_{1,n}`: `νAw₁ + μ₀b₁ = μ₀₀φ₁`.
    SharedRelation,
    /// `Γ_{1,n} ≻ ρ_{1,n}`: `w₁ = 0`.
    DegenerateVorticity,
    /// `ρ_{1,n} ≻ Γ_{1,n}`: `b₁ = 0`.
    DegenerateTransport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum TheoremCase {
    /// `G_n = 0` from some level on.
    ForcingResolved { subcase: Subcase },
    /// `Γ_{1,n} ≻ G_n` or `ρ_{1,n} ≻ G_n`.
    DominatesForcing { subcase: Subcase },
    /// `b₁` absent, or `G_n ≿ Γ_{1,n}` and `G_n ≿ ρ_{1,n}`: rate bound.
    RateBound,
    /// No verdict with enough confidence; `candidates` lists the readings.
    Ambiguous { candidates: Vec<TheoremCase> },
    /// `Γ_{1,n} = 0`: the ladder is exact.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dispatch {
    pub case: TheoremCase,
    /// Conclusions that apply and where their numerical check lives.
    pub conclusions: Vec<String>,
    pub relations: Vec<String>,
}

fn subcase(gr: Relation) -> Subcase {
    match gr {
        Relation::Sim => Subcase::SharedRelation,
        Relation::Succ => Subcase::DegenerateVorticity,
        Relation::Prec => Subcase::DegenerateTransport,
    }
}

fn conclusions_for(case: &TheoremCase, table: &DiagnosticsTable) -> Vec<String> {
    match case {
        TheoremCase::ForcingResolved { subcase } | TheoremCase::DominatesForcing { subcase } => match subcase {
            Subcase::SharedRelation => vec!["shared relation νAw₁ + μ₀b₁ = μ₀₀φ₁; see first-method limit residual and E_n".into()],
            Subcase::DegenerateVorticity => vec!["degenerate expansion with w₁ = 0; see expansion report".into()],
            Subcase::DegenerateTransport => vec!["degenerate expansion of the transport term with b₁ = 0".into()],
        },
        TheoremCase::RateBound => vec![format!(
            "rate bound ‖u_n − u‖ = O(λ_cut^{{−α*}}); flattest rate product at α* = {}",
            table.flattest_alpha.map_or("n/a".to_string(), |a| a.to_string())
        )],
        TheoremCase::Ambiguous { .. } => vec!["comparability too weak to pick a case".into()],
        TheoremCase::Trivial => vec!["ω_n = ω at every level".into()],
    }
}

/// Map the verdicts on `{Γ_{1,n}, ρ_{1,n}, G_n}` to the case tree.
pub fn theorem_case_dispatch(
    table: &DiagnosticsTable,
    comparability: &ComparabilityTable,
    options: &ComparabilityOptions,
) -> Dispatch {
    let relations: Vec<String> = comparability
        .pairs
        .iter()
        .map(|p| {
            format!(
                "{} {} {} (confidence {:.2})",
                comparability.names[p.first],
                p.verdict.relation.symbol(),
                comparability.names[p.second],
                p.verdict.confidence
            )
        })
        .collect();
    let finish = |case: TheoremCase| Dispatch {
        conclusions: conclusions_for(&case, table),
        case,
        relations: relations.clone(),
    };
    if table.rows.iter().all(|r| r.trivial) {
        return finish(TheoremCase::Trivial);
    }
    let has_rho = comparability.index("rho1").is_some();
    let has_g = comparability.index("Gn").is_some();
    if !has_rho {
        return finish(TheoremCase::RateBound);
    }
    let gr = comparability.between("Gamma1", "rho1");
    let Some(gr) = gr else {
        return finish(TheoremCase::Ambiguous { candidates: Vec::new() });
    };
    let strong = |v: &crate::comparability::PairVerdict| v.confidence >= options.confidence_threshold;
    let forcing_resolved = !has_g && table.rows.last().is_some_and(|r| r.g_n == 0.0);
    let case = if forcing_resolved {
        TheoremCase::ForcingResolved { subcase: subcase(gr.relation) }
    } else if !has_g {
        return finish(TheoremCase::Ambiguous { candidates: Vec::new() });
    } else {
        let gg = comparability.between("Gamma1", "Gn").expect("present");
        let rg = comparability.between("rho1", "Gn").expect("present");
        let dominates = gg.relation == Relation::Succ || rg.relation == Relation::Succ;
        let candidate = if dominates {
            TheoremCase::DominatesForcing { subcase: subcase(gr.relation) }
        } else {
            TheoremCase::RateBound
        };
        let relevant = if dominates {
            vec![&gg, &rg, &gr]
        } else {
            vec![&gg, &rg]
        };
        if relevant.iter().all(|v| strong(v)) {
            candidate
        } else {
            let mut candidates = vec![candidate.clone()];
            let other = if dominates {
                TheoremCase::RateBound
            } else {
                TheoremCase::DominatesForcing { subcase: subcase(gr.relation) }
            };
            candidates.push(other);
            return finish(TheoremCase::Ambiguous { candidates });
        }
    };
    if !strong(&gr) && !matches!(case, TheoremCase::RateBound) {
        return finish(TheoremCase::Ambiguous { candidates: vec![case] });
    }
    finish(case)
}

/// Trend abscissa of a table, `ln λ_cut` per row.
pub fn table_axis(table: &DiagnosticsTable) -> Vec<f64> {
    trend_axis(Some(&table.lambda_cuts()), table.rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{run_ladder, Reference, SolverConfig};
    use crate::spectral::WaveGrid;

    fn single_mode() -> LadderArchive<f64> {
        let eval = WaveGrid::square(64).unwrap();
        let cos = SpectralField::cosine(eval, 1, 0, 1.0).unwrap();
        let config = SolverConfig {
            max_steps: 5,
            ..Default::default()
        };
        let reference = Reference::from_vorticity(cos, config.nu, config.dealias).unwrap();
        run_ladder(&[8, 16, 32], &config, reference).unwrap()
    }

    #[test]
    fn single_mode_table_is_trivial() {
        let archive = single_mode();
        let table = compute_table(&archive, &DiagnosticsOptions::default()).unwrap();
        assert!(table.linear);
        for row in &table.rows {
            assert!(row.trivial);
            assert_eq!(row.rho1, 0.0);
            assert_eq!(row.g_n, 0.0);
            assert!(row.e_n.is_none());
        }
        let cmp = table.comparability(&ComparabilityOptions::default());
        assert!(cmp.is_err(), "no positive sequences to compare");
    }

    #[test]
    fn empty_archive_is_missing_artifact() {
        let mut archive = single_mode();
        archive.levels.clear();
        assert!(matches!(
            compute_table(&archive, &DiagnosticsOptions::default()),
            Err(Error::MissingArtifact(_))
        ));
    }

    #[test]
    fn order_of_levels_does_not_matter() {
        let mut archive = single_mode();
        let a = compute_table(&archive, &DiagnosticsOptions::default()).unwrap();
        archive.levels.reverse();
        let b = compute_table(&archive, &DiagnosticsOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
