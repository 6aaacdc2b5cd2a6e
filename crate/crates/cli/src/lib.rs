//! Command-line orchestration of ladder runs, diagnostics and expansions.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` also rejects NaN.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, Mode};
use error::{CliError, CliResult};
use run::under_root;

#[derive(Debug, Parser)]
#[command(name = "galerkin", version, about = "Spectral-Galerkin ladders and their asymptotic expansions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Key-value config file; defaults apply when omitted.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides the config's `output`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a resolution ladder to steady state and archive it.
    Ladder {
        #[command(flatten)]
        common: Common,
        /// Keep converged levels of an existing archive.
        #[arg(long)]
        resume: bool,
    },
    /// Convergence tables, comparability and case dispatch for an archive.
    Diagnose {
        #[command(flatten)]
        common: Common,
        #[arg(short, long)]
        archive: PathBuf,
    },
    /// Expansion reports of an archived ladder.
    Expand {
        #[command(flatten)]
        common: Common,
        #[arg(short, long)]
        archive: PathBuf,
    },
    /// Transient ladder, space-time norms and the transient expansion.
    Timedep {
        #[command(flatten)]
        common: Common,
    },
    /// Tail-sum oracle for a degenerate expansion against the engine.
    Example3 {
        #[command(flatten)]
        common: Common,
    },
}

pub fn load_config(path: Option<&Path>) -> CliResult<ExperimentConfig> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))?;
            Ok(ExperimentConfig::parse(&text)?)
        }
    }
}

fn output_dir(common: &Common, cfg: &ExperimentConfig, default: PathBuf, root: Option<&Path>) -> PathBuf {
    let chosen = common.output.clone().or_else(|| cfg.output.clone()).unwrap_or(default);
    under_root(&chosen, root)
}

/// Run one subcommand; `root` is the output-root override.
pub fn execute(cli: &Cli, root: Option<&Path>) -> CliResult<String> {
    match &cli.command {
        Command::Ladder { common, resume } => {
            let cfg = load_config(common.config.as_deref())?;
            let out = output_dir(common, &cfg, "runs/ladder".into(), root);
            let o = run::cmd_ladder(&cfg, &out, *resume)?;
            Ok(format!(
                "ladder archive {}: {} levels, {} solved now, complete = {}",
                out.display(),
                o.manifest.levels.len(),
                o.solved.len(),
                o.manifest.complete
            ))
        }
        Command::Diagnose { common, archive } => {
            let cfg = load_config(common.config.as_deref())?;
            let archive = under_root(archive, root);
            let out = output_dir(common, &cfg, archive.join("diagnostics"), root);
            let b = run::cmd_diagnose(&cfg, &archive, &out)?;
            let case = b.dispatch.map_or("n/a".to_string(), |d| format!("{:?}", d.case));
            Ok(format!("diagnostics in {}: {} levels, case {case}", out.display(), b.table.rows.len()))
        }
        Command::Expand { common, archive } => {
            let cfg = load_config(common.config.as_deref())?;
            let archive = under_root(archive, root);
            let out = output_dir(common, &cfg, archive.join("expansion"), root);
            let reports = run::cmd_expand(&cfg, &archive, &out)?;
            let failed: usize = reports.iter().map(|r| r.conditions.failures().count()).sum();
            Ok(format!(
                "{} expansion reports in {}; {failed} failed checks",
                reports.len(),
                out.display()
            ))
        }
        Command::Timedep { common } => {
            let cfg = load_config(common.config.as_deref())?;
            let out = output_dir(common, &cfg, "runs/timedep".into(), root);
            let b = run::cmd_timedep(&cfg, &out)?;
            Ok(format!(
                "time-dependent ladder in {}: {:?}",
                out.display(),
                b.report.classification
            ))
        }
        Command::Example3 { common } => {
            let cfg = load_config(common.config.as_deref())?;
            let out = output_dir(common, &cfg, "runs/example3".into(), root);
            let c = run::cmd_example3(&cfg, &out)?;
            let delta = c.max_relative_delta().map_or("n/a".to_string(), |d| format!("{d:.3e}"));
            Ok(format!("example3 table in {}: max engine delta {delta}", out.display()))
        }
    }
}

impl Command {
    pub fn mode(&self) -> Mode {
        match self {
            Self::Ladder { .. } => Mode::Ladder,
            Self::Diagnose { .. } => Mode::Diagnose,
            Self::Expand { .. } => Mode::Expand,
            Self::Timedep { .. } => Mode::Timedep,
            Self::Example3 { .. } => Mode::Example3,
        }
    }
}
