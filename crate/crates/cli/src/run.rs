//! The subcommands, callable without the argument parser.

use std::path::{Path, PathBuf};

use galerkin_lab::archive::{load_ladder, save_trajectory, LadderManifest, LadderWriter, Stamp, MANIFEST};
use galerkin_lab::comparability::ComparabilityTable;
use galerkin_lab::diagnostics::{
    compute_table, normalized_vectors, relation_residual_first_method, relation_residual_second_method,
    theorem_case_dispatch, DiagnosticsTable, Dispatch, FirstMethodResiduals, SecondMethodResiduals,
};
use galerkin_lab::expansion::{
    compare_with_engine, extract, verify_report, AsVelocity, EngineComparison, ExpansionOptions, ExpansionReport,
    LimitMode, ScaleVector, TailSource, VerifyTolerances,
};
use galerkin_lab::fractional_time::{hgamma_norm, l2_time_norm, transient_expansion, InHGamma};
use galerkin_lab::solver::{
    compute_forcing, extend_ladder, heat_decay, manufactured_vorticity, run_transient, Forcing, LadderArchive, Reference,
};
use galerkin_lab::spectral::io::write_field;
use galerkin_lab::{Field, Trajectory, WaveGrid};
use serde::Serialize;

use crate::config::{
    ladder_hash, ExperimentConfig, InitialState, LadderSource, Measure, Mode, TimeNorm, TransientForcing,
};
use crate::error::{CliError, CliResult};
use crate::output::{
    create_dir, write_comparability, write_convergence, write_example3, write_gamma_trace, write_json,
    write_norm_table, write_rate_products, NormRow, ReportSummary,
};

/// Environment variable naming the directory relative run paths live under.
pub const OUTPUT_ROOT_VAR: &str = "GALERKIN_OUTPUT_ROOT";

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Wavenumbers of the shear initial state.
pub const SHEAR_MODES: [i64; 6] = [1, 3, 20, 40, 50, 70];

/// `path` placed under `root` when it is relative.
pub fn under_root(path: &Path, root: Option<&Path>) -> PathBuf {
    match root {
        Some(r) if path.is_relative() => r.join(path),
        _ => path.to_path_buf(),
    }
}

fn stamp(cfg: &ExperimentConfig) -> Stamp {
    Stamp {
        code_version: CODE_VERSION.into(),
        config_hash: ladder_hash(cfg),
    }
}

pub fn ladder_reference(cfg: &ExperimentConfig) -> CliResult<Reference<f64>> {
    let eval = WaveGrid::square(cfg.ladder.eval_resolution())?;
    let omega = match cfg.ladder.source {
        LadderSource::Manufactured => manufactured_vorticity(eval),
        LadderSource::SingleMode => Field::cosine(eval, 1, 0, 1.0)?,
    };
    Ok(Reference::from_vorticity(omega, cfg.solver.nu, cfg.solver.dealias)?)
}

#[derive(Debug, Clone)]
pub struct LadderOutcome {
    pub manifest: LadderManifest,
    /// Levels solved by this invocation.
    pub solved: Vec<usize>,
}

/// Solve the configured ladder into `out`. With `resume`, converged levels
/// already in `out` are kept and only the rest are solved.
pub fn cmd_ladder(cfg: &ExperimentConfig, out: &Path, resume: bool) -> CliResult<LadderOutcome> {
    cfg.validate(Mode::Ladder)?;
    let exists = out.join(MANIFEST).exists();
    if exists && !resume {
        return Err(CliError::config(format!(
            "{} already holds an archive; pass --resume to extend it",
            out.display()
        )));
    }
    let requested = &cfg.ladder.resolutions;
    let (mut archive, mut writer) = if exists {
        let (archive, manifest) = load_ladder::<f64>(out)?;
        if manifest.stamp.config_hash != ladder_hash(cfg) {
            return Err(CliError::config(format!(
                "archive in {} was built from a different solver configuration",
                out.display()
            )));
        }
        (archive, LadderWriter::open(out, requested)?)
    } else {
        create_dir(out)?;
        let archive = LadderArchive {
            config: cfg.solver,
            reference: ladder_reference(cfg)?,
            levels: Vec::new(),
        };
        let writer = LadderWriter::create(out, &archive, requested, stamp(cfg))?;
        (archive, writer)
    };
    let mut solved = Vec::new();
    extend_ladder(&mut archive, requested, |level| {
        solved.push(level.resolution());
        writer.add_level(level)
    })?;
    writer.flush()?;
    Ok(LadderOutcome {
        manifest: writer.manifest().clone(),
        solved,
    })
}

fn load_checked(cfg: &ExperimentConfig, archive_dir: &Path) -> CliResult<(LadderArchive<f64>, LadderManifest)> {
    let (archive, manifest) = load_ladder::<f64>(archive_dir)?;
    if cfg.sets_ladder() && manifest.stamp.config_hash != ladder_hash(cfg) {
        return Err(CliError::config(format!(
            "archive in {} is stale: it was built from a different solver configuration",
            archive_dir.display()
        )));
    }
    Ok((archive, manifest))
}

/// Level vorticities on the evaluation grid, their resolutions and `λ_cut`.
fn vorticity_sequence(archive: &LadderArchive<f64>) -> (Vec<Field>, Vec<usize>, Vec<f64>) {
    let eval = *archive.reference.grid();
    let mut levels: Vec<_> = archive.levels.iter().collect();
    levels.sort_by_key(|l| l.resolution());
    (
        levels.iter().map(|l| l.steady.omega.resample(eval)).collect(),
        levels.iter().map(|l| l.resolution()).collect(),
        levels.iter().map(|l| l.grid().lambda_cut() as f64).collect(),
    )
}

/// Trailing mean of `Γ_{1,n}²/Γ_{2,n}` over levels where both are positive.
fn lambda_hat<V>(report: &ExpansionReport<V>) -> Option<f64> {
    let (t1, t2) = (report.term(1)?, report.term(2)?);
    let q: Vec<f64> = t2
        .levels
        .iter()
        .zip(&t2.gamma)
        .filter_map(|(n, &g2)| {
            let g1 = t1.gamma[t1.levels.iter().position(|m| m == n)?];
            (g2 > 0.0).then(|| g1 * g1 / g2)
        })
        .collect();
    let take = q.len().min(2);
    (take > 0).then(|| q[q.len() - take..].iter().sum::<f64>() / take as f64)
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnoseBundle {
    pub code_version: String,
    pub config_hash: String,
    pub table: DiagnosticsTable,
    pub comparability: Option<ComparabilityTable>,
    pub dispatch: Option<Dispatch>,
    pub first_method: Option<FirstMethodResiduals>,
    pub second_method: Option<SecondMethodResiduals>,
    pub notes: Vec<String>,
}

pub const MIN_LEVELS: usize = 3;

pub fn cmd_diagnose(cfg: &ExperimentConfig, archive_dir: &Path, out: &Path) -> CliResult<DiagnoseBundle> {
    cfg.validate(Mode::Diagnose)?;
    let (archive, manifest) = load_checked(cfg, archive_dir)?;
    let table = compute_table(&archive, &cfg.diagnostics)?;
    let mut notes = Vec::new();
    if !manifest.complete {
        notes.push("archive is partial".to_string());
    }
    let mut bundle = DiagnoseBundle {
        code_version: manifest.stamp.code_version.clone(),
        config_hash: manifest.stamp.config_hash.clone(),
        table,
        comparability: None,
        dispatch: None,
        first_method: None,
        second_method: None,
        notes,
    };
    if archive.levels.len() >= MIN_LEVELS {
        let table = &bundle.table;
        let cmp = table.comparability(&cfg.comparability)?;
        bundle.dispatch = Some(theorem_case_dispatch(table, &cmp, &cfg.comparability));
        bundle.comparability = Some(cmp);
        let vectors = normalized_vectors(&archive, table, &cfg.diagnostics)?;
        bundle.first_method = Some(relation_residual_first_method(&archive, table, &vectors, &cfg.diagnostics)?);
        let (seq, _, labels) = vorticity_sequence(&archive);
        let scale = &cfg.expand.scales()[0];
        let report = extract(&seq, Some(&labels), Some(&archive.reference.omega), &cfg.expansion_options(scale))?;
        bundle.second_method = Some(relation_residual_second_method(
            &archive,
            &report,
            cfg.beta,
            lambda_hat(&report),
        )?);
    } else {
        bundle.notes.push(format!(
            "{} levels; comparability, dispatch and relation residuals need at least {MIN_LEVELS}",
            archive.levels.len()
        ));
    }
    create_dir(out)?;
    write_convergence(&out.join("convergence.csv"), &bundle.table)?;
    write_rate_products(&out.join("rate_products.csv"), &bundle.table)?;
    if let Some(c) = &bundle.comparability {
        write_comparability(&out.join("comparability.csv"), c)?;
    }
    write_json(&out.join("diagnostics.json"), &bundle)?;
    Ok(bundle)
}

fn expand_one<V: ScaleVector<f64>>(
    sequence: &[V],
    labels: &[f64],
    reference: &V,
    options: &ExpansionOptions,
    resolutions: &[usize],
    dir: &Path,
    save: impl Fn(&Path, &V) -> CliResult<()>,
) -> CliResult<ReportSummary> {
    let reference = (options.limit == LimitMode::Reference).then_some(reference);
    let report = extract(sequence, Some(labels), reference, options)?;
    let conditions = verify_report(&report, sequence, &VerifyTolerances::default())?;
    create_dir(dir)?;
    for t in &report.terms {
        save(&dir.join(format!("w{}", t.order)), &t.limit)?;
    }
    let summary = ReportSummary::new(&report, resolutions, conditions, |k| Some(format!("w{k}")));
    write_json(&dir.join("report.json"), &summary)?;
    write_gamma_trace(&dir.join("gamma.csv"), &summary)?;
    Ok(summary)
}

fn save_field(path: &Path, f: &Field) -> CliResult<()> {
    Ok(write_field(&path.with_extension("glsf"), f)?)
}

/// One report per configured scale, written to `out/scale<i>/`.
pub fn cmd_expand(cfg: &ExperimentConfig, archive_dir: &Path, out: &Path) -> CliResult<Vec<ReportSummary>> {
    cfg.validate(Mode::Expand)?;
    let (archive, _) = load_checked(cfg, archive_dir)?;
    if archive.levels.len() < MIN_LEVELS {
        return Err(CliError::Core(galerkin_lab::Error::MissingArtifact(format!(
            "{} holds {} levels; expansion needs at least {MIN_LEVELS}",
            archive_dir.display(),
            archive.levels.len()
        ))));
    }
    let (seq, resolutions, labels) = vorticity_sequence(&archive);
    let mut reports = Vec::new();
    for (i, scale) in cfg.expand.scales().iter().enumerate() {
        let options = cfg.expansion_options(scale);
        let dir = out.join(format!("scale{i}"));
        let summary = match cfg.expand.measure {
            Measure::Vorticity => {
                expand_one(&seq, &labels, &archive.reference.omega, &options, &resolutions, &dir, save_field)?
            }
            Measure::Velocity => {
                let seq: Vec<_> = seq.iter().cloned().map(AsVelocity).collect();
                let reference = AsVelocity(archive.reference.omega.clone());
                expand_one(&seq, &labels, &reference, &options, &resolutions, &dir, |p, v| save_field(p, &v.0))?
            }
        };
        reports.push(summary);
    }
    Ok(reports)
}

fn shear_state(grid: WaveGrid) -> CliResult<Field> {
    let mut f = Field::zeros(grid);
    for k in SHEAR_MODES {
        if grid.retains(k, 0) {
            f = f.axpy(1.0, &Field::cosine(grid, k, 0, 1.0 / k as f64)?)?;
        }
    }
    Ok(f)
}

#[derive(Debug, Clone, Serialize)]
pub struct TimedepBundle {
    pub code_version: String,
    pub config_hash: String,
    pub norms: Vec<NormRow>,
    pub report: ReportSummary,
}

/// Transient runs at every ladder resolution and on the evaluation grid,
/// their error norms, and the expansion of the ladder of trajectories.
pub fn cmd_timedep(cfg: &ExperimentConfig, out: &Path) -> CliResult<TimedepBundle> {
    cfg.validate(Mode::Timedep)?;
    let t = &cfg.timedep;
    let eval = WaveGrid::square(cfg.ladder.eval_resolution())?;
    let initial = match t.initial {
        InitialState::Shear => shear_state(eval)?,
        InitialState::Manufactured => manufactured_vorticity(eval),
        InitialState::Zero => Field::zeros(eval),
    };
    let forcing_field = match t.forcing {
        TransientForcing::None => None,
        TransientForcing::Manufactured => Some(compute_forcing(
            &manufactured_vorticity::<f64>(eval),
            cfg.solver.nu,
            cfg.solver.dealias,
        )?),
    };
    let forcing = || forcing_field.clone().map_or(Forcing::Zero, Forcing::Steady);
    create_dir(out)?;
    let traj_dir = out.join("trajectories");
    let run = |grid: WaveGrid, name: String| -> CliResult<Trajectory<f64>> {
        let traj = run_transient(grid, &initial, forcing(), t.final_time, &cfg.solver, t.stride)?;
        save_trajectory(&traj_dir.join(name), &traj, stamp(cfg))?;
        if let Some(reason) = &traj.failure {
            return Err(CliError::Core(galerkin_lab::Error::BlowUp {
                steps: (traj.len() - 1) * t.stride,
                reason: format!("resolution {}: {reason}", grid.resolution()),
            }));
        }
        Ok(traj)
    };
    let reference = run(eval, "reference".into())?;
    let mut levels = Vec::new();
    for &n in &cfg.ladder.resolutions {
        levels.push(run(WaveGrid::square(n)?, format!("n{n:04}"))?);
    }
    let closed_form = t.initial == InitialState::Shear && t.forcing == TransientForcing::None;
    let interval = cfg.solver.dt * t.stride as f64;
    let count = reference.len() - 1;
    let exact_eval = if closed_form {
        Some(heat_decay(eval, &initial, cfg.solver.nu, interval, count)?)
    } else {
        None
    };
    let mut norms = Vec::new();
    for v in &levels {
        let grid = *v.grid();
        let diff = v.resample(eval).axpy(-1.0, &reference)?;
        let (mut rel, mut tail) = (None, None);
        if let Some(exact) = &exact_eval {
            let exact_n = exact.resample(grid);
            let scale = l2_time_norm(&exact_n, 0.0);
            rel = Some(l2_time_norm(&v.axpy(-1.0, &exact_n)?, 0.0) / scale);
            tail = Some(l2_time_norm(&exact.axpy(-1.0, &exact_n.resample(eval))?, 0.0));
        }
        norms.push(NormRow {
            n: grid.resolution(),
            lambda_cut: grid.lambda_cut(),
            l2h_error: l2_time_norm(&diff, 0.0),
            l2x_error: l2_time_norm(&diff, cfg.hgamma.alpha_x),
            hgamma_error: hgamma_norm(&diff, &cfg.hgamma)?,
            closed_form_rel_error: rel,
            closed_form_tail: tail,
        });
    }
    write_norm_table(&out.join("norms.csv"), &norms)?;
    let resolutions = cfg.ladder.resolutions.clone();
    let labels: Vec<f64> = levels.iter().map(|v| v.grid().lambda_cut() as f64).collect();
    let mut options = cfg.expansion_options(&t.scale);
    options.max_terms = cfg.expand.max_terms.unwrap_or(t.scale.len());
    let dir = out.join("expansion");
    let save_traj = |p: &Path, v: &Trajectory<f64>| -> CliResult<()> {
        save_trajectory(p, v, stamp(cfg))?;
        Ok(())
    };
    let report = match t.norm {
        TimeNorm::L2 => {
            let rep = transient_expansion(&levels, Some(&labels), &reference, &options)?;
            let aligned: Vec<_> = levels.iter().map(|v| v.resample(eval)).collect();
            let conditions = verify_report(&rep, &aligned, &VerifyTolerances::default())?;
            create_dir(&dir)?;
            for term in &rep.terms {
                save_traj(&dir.join(format!("w{}", term.order)), &term.limit)?;
            }
            let summary = ReportSummary::new(&rep, &resolutions, conditions, |k| Some(format!("w{k}")));
            write_json(&dir.join("report.json"), &summary)?;
            write_gamma_trace(&dir.join("gamma.csv"), &summary)?;
            summary
        }
        TimeNorm::Hgamma => {
            let wrap = |tr: Trajectory<f64>| InHGamma {
                trajectory: tr,
                gamma: cfg.hgamma.gamma,
                pad: cfg.hgamma.pad,
            };
            let seq: Vec<_> = levels.iter().map(|v| wrap(v.resample(eval))).collect();
            expand_one(&seq, &labels, &wrap(reference.clone()), &options, &resolutions, &dir, |p, v| {
                save_traj(p, &v.trajectory)
            })?
        }
    };
    let bundle = TimedepBundle {
        code_version: CODE_VERSION.into(),
        config_hash: ladder_hash(cfg),
        norms,
        report,
    };
    write_json(&out.join("timedep.json"), &bundle)?;
    Ok(bundle)
}

pub fn cmd_example3(cfg: &ExperimentConfig, out: &Path) -> CliResult<EngineComparison> {
    cfg.validate(Mode::Example3)?;
    let x = &cfg.example3;
    let eval = WaveGrid::square(x.eval_resolution())?;
    let g: Field = TailSource::builtin(&x.source, cfg.solver.nu)?.field(eval)?;
    let cutoffs = x
        .resolutions
        .iter()
        .map(|&n| WaveGrid::square(n))
        .collect::<galerkin_lab::Result<Vec<_>>>()?;
    let mut options = cfg.expansion_options(&x.scale);
    options.limit = LimitMode::Reference;
    let cmp = compare_with_engine(&g, &cutoffs, &options)?;
    create_dir(out)?;
    write_example3(&out.join("example3.csv"), &cmp)?;
    write_json(&out.join("example3.json"), &cmp)?;
    Ok(cmp)
}
