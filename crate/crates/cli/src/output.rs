//! Serialized forms of reports and the CSV tables written next to them.

use std::fs;
use std::path::Path;

use galerkin_lab::comparability::ComparabilityTable;
use galerkin_lab::diagnostics::DiagnosticsTable;
use galerkin_lab::expansion::{Classification, ConditionLog, EngineComparison, ExpansionReport, LimitMode, SobolevScale};
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct TermSummary {
    pub order: usize,
    pub resolutions: Vec<usize>,
    pub gamma: Vec<f64>,
    pub next_norms: Vec<f64>,
    pub limit_distance: Vec<f64>,
    pub degenerate: bool,
    pub limit_exponent: f64,
    pub window: Vec<usize>,
    pub confidence: f64,
    /// Archive path of `w_k`, relative to the report.
    pub limit_file: Option<String>,
}

/// Everything in an [`ExpansionReport`] except the vectors, which are
/// referenced by path.
#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary {
    pub scale: SobolevScale,
    pub limit_mode: LimitMode,
    pub classification: Classification,
    pub resolutions: Vec<usize>,
    pub labels: Option<Vec<f64>>,
    pub excluded: Vec<usize>,
    pub floor: f64,
    pub terms: Vec<TermSummary>,
    pub conditions: ConditionLog,
    pub notes: Vec<String>,
}

impl ReportSummary {
    /// `resolutions[i]` names sequence element `i`; `limit_file(k)` is
    /// the stored location of `w_k`.
    pub fn new<V>(
        report: &ExpansionReport<V>,
        resolutions: &[usize],
        conditions: ConditionLog,
        limit_file: impl Fn(usize) -> Option<String>,
    ) -> Self {
        Self {
            scale: report.scale.clone(),
            limit_mode: report.limit_mode,
            classification: report.classification,
            resolutions: resolutions.to_vec(),
            labels: report.labels.clone(),
            excluded: report.excluded.clone(),
            floor: report.floor,
            terms: report
                .terms
                .iter()
                .map(|t| TermSummary {
                    order: t.order,
                    resolutions: t.levels.iter().map(|&i| resolutions[i]).collect(),
                    gamma: t.gamma.clone(),
                    next_norms: t.next_norms.clone(),
                    limit_distance: t.limit_distance.clone(),
                    degenerate: t.degenerate,
                    limit_exponent: t.limit_exponent,
                    window: t.window.iter().map(|&i| resolutions[i]).collect(),
                    confidence: t.confidence,
                    limit_file: limit_file(t.order),
                })
                .collect(),
            conditions,
            notes: report.notes.clone(),
        }
    }
}

pub fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}", dir.display()), e))
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}", path.display()), e))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:e}"))
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn alpha_label(a: f64) -> String {
    format!("rate_product_alpha_{a}")
}

/// `Γ_{k,n}` per term: one row per resolution, one column per term.
pub fn write_gamma_trace(path: &Path, summary: &ReportSummary) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["n".to_string(), "lambda_cut".into()];
    header.extend(summary.terms.iter().map(|t| format!("Gamma{}", t.order)));
    w.write_record(&header)?;
    for (i, &n) in summary.resolutions.iter().enumerate() {
        let mut row = vec![n.to_string(), summary.labels.as_ref().map_or(String::new(), |l| num(l[i]))];
        for t in &summary.terms {
            let v = t.resolutions.iter().position(|&m| m == n).map(|j| t.gamma[j]);
            row.push(opt(v));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Convergence traces: `Γ_{1,n}`, `ρ_{1,n}`, `G_n` and their quotients.
pub fn write_convergence(path: &Path, table: &DiagnosticsTable) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "n",
        "lambda_cut",
        "Gamma1",
        "rho1",
        "Gn",
        "rho1_over_Gamma1",
        "Gn_over_Gamma1",
        "steady_residual",
        "converged",
        "trivial",
    ])?;
    for r in &table.rows {
        w.write_record([
            r.resolution.to_string(),
            r.lambda_cut.to_string(),
            num(r.gamma1),
            num(r.rho1),
            num(r.g_n),
            opt(r.rho_over_gamma),
            opt(r.g_over_gamma),
            num(r.steady_residual),
            r.converged.to_string(),
            r.trivial.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Rate products `‖u_n − u‖_{D(A)}·λ_cut^{α*}` and the residual `E_n`.
pub fn write_rate_products(path: &Path, table: &DiagnosticsTable) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["n".to_string(), "lambda_cut".into(), "velocity_error".into()];
    header.extend(table.alpha_grid.iter().map(|&a| alpha_label(a)));
    header.extend(["En".to_string(), "En_bound".into()]);
    w.write_record(&header)?;
    for r in &table.rows {
        let mut row = vec![r.resolution.to_string(), r.lambda_cut.to_string(), num(r.velocity_error)];
        row.extend(r.rate_products.iter().map(|&p| num(p)));
        row.extend([opt(r.e_n), opt(r.e_n_bound)]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Square matrix of relation symbols; row `i`, column `j` reads
/// "sequence i (relation) sequence j".
pub fn write_comparability(path: &Path, table: &ComparabilityTable) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec![String::new()];
    header.extend(table.names.iter().cloned());
    w.write_record(&header)?;
    for (i, name) in table.names.iter().enumerate() {
        let mut row = vec![name.clone()];
        for j in 0..table.names.len() {
            row.push(if i == j {
                "=".into()
            } else {
                table
                    .verdict(i, j)
                    .map_or(String::new(), |v| format!("{} ({:.2})", v.relation.symbol(), v.confidence))
            });
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Oracle `Γ̃_{k,n}`, bound ratios and the engine's coefficients.
pub fn write_example3(path: &Path, cmp: &EngineComparison) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    let k_total = cmp.oracle.scale.len();
    let mut header = vec!["n".to_string(), "lambda_cut".into(), "hypothesis_holds".into()];
    header.extend((1..=k_total).map(|k| format!("Gamma{k}_oracle")));
    header.extend((1..=k_total).map(|k| format!("Gamma{k}_engine")));
    for k in 1..k_total {
        header.extend([format!("ratio{k}"), format!("bound{k}"), format!("bound{k}_holds")]);
    }
    w.write_record(&header)?;
    for (i, r) in cmp.oracle.rows.iter().enumerate() {
        let mut row = vec![r.resolution.to_string(), r.lambda_cut.to_string(), r.hypothesis_holds.to_string()];
        row.extend(r.gamma.iter().map(|&g| num(g)));
        row.extend((0..k_total).map(|k| opt(cmp.engine_gamma[k][i])));
        for k in 0..k_total - 1 {
            row.extend([num(r.ratios[k]), num(r.bounds[k]), r.bounds_hold[k].to_string()]);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// One row of the time-dependent norm table.
#[derive(Debug, Clone, Serialize)]
pub struct NormRow {
    pub n: usize,
    pub lambda_cut: u64,
    /// `‖v_n − u‖_{L²(0,T;H)}`.
    pub l2h_error: f64,
    /// `‖v_n − u‖_{L²(0,T;D(A^{α_X}))}`.
    pub l2x_error: f64,
    /// `‖v_n − u‖_{𝓗^γ}`.
    pub hgamma_error: f64,
    /// Relative `L²(0,T;H)` distance to the exact decay at this level.
    pub closed_form_rel_error: Option<f64>,
    /// `‖Q_n u‖_{L²(0,T;H)}` from the exact decay.
    pub closed_form_tail: Option<f64>,
}

pub fn write_norm_table(path: &Path, rows: &[NormRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "n",
        "lambda_cut",
        "L2H_error",
        "L2X_error",
        "Hgamma_error",
        "closed_form_rel_error",
        "closed_form_tail",
    ])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.lambda_cut.to_string(),
            num(r.l2h_error),
            num(r.l2x_error),
            num(r.hgamma_error),
            opt(r.closed_form_rel_error),
            opt(r.closed_form_tail),
        ])?;
    }
    w.flush()?;
    Ok(())
}
