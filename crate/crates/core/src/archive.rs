//! On-disk ladders and trajectories: a JSON manifest, one binary coefficient
//! file per field, and a residual log per level.
//!
//! ```text
//! <root>/manifest.json
//! <root>/reference/{omega,forcing,advection}.glsf
//! <root>/levels/n0064/{omega,advection}.glsf
//! <root>/levels/n0064/residuals.csv
//! ```
//!
//! Manifests hold no timings, so equal inputs give byte-equal archives.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver::{LadderArchive, LevelRecord, NonlinearMode, Reference, ResidualSample, SolverConfig, SteadyStateRecord};
use crate::spectral::io::{read_field, write_field};
use crate::trajectory::Trajectory;

pub const MANIFEST: &str = "manifest.json";
pub const FORMAT_VERSION: u32 = 1;

/// Provenance stamped into every manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Stamp {
    pub code_version: String,
    /// Hash of the experiment configuration that produced the archive.
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFiles {
    pub omega: String,
    pub forcing: String,
    pub advection: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub resolution: usize,
    pub omega: String,
    pub advection: String,
    pub advection_mode: NonlinearMode,
    pub residual: f64,
    pub march_residual: Option<f64>,
    pub steps: usize,
    pub newton_iterations: usize,
    pub converged: bool,
    pub residual_log: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderManifest {
    pub format_version: u32,
    #[serde(flatten)]
    pub stamp: Stamp,
    pub solver: SolverConfig,
    pub eval_resolution: usize,
    pub requested: Vec<usize>,
    pub reference: ReferenceFiles,
    pub levels: Vec<LevelEntry>,
    /// Every requested level is present and converged.
    pub complete: bool,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn read_manifest<M: for<'de> Deserialize<'de>>(root: &Path) -> Result<M> {
    let path = root.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingArtifact(path.display().to_string()),
        _ => Error::Io(e),
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path,
        reason: e.to_string(),
    })
}

fn level_dir(resolution: usize) -> String {
    format!("levels/n{resolution:04}")
}

/// Incremental writer: the manifest is rewritten after every level, so an
/// interrupted run leaves a valid partial archive.
pub struct LadderWriter {
    root: PathBuf,
    manifest: LadderManifest,
}

impl LadderWriter {
    /// Start a new archive at `root`, writing the reference fields.
    pub fn create<T: Real>(
        root: &Path,
        archive: &LadderArchive<T>,
        requested: &[usize],
        stamp: Stamp,
    ) -> Result<Self> {
        fs::create_dir_all(root.join("reference"))?;
        let r = &archive.reference;
        let reference = ReferenceFiles {
            omega: "reference/omega.glsf".into(),
            forcing: "reference/forcing.glsf".into(),
            advection: "reference/advection.glsf".into(),
        };
        write_field(&root.join(&reference.omega), &r.omega)?;
        write_field(&root.join(&reference.forcing), &r.forcing)?;
        write_field(&root.join(&reference.advection), &r.advection)?;
        let mut writer = Self {
            root: root.to_path_buf(),
            manifest: LadderManifest {
                format_version: FORMAT_VERSION,
                stamp,
                solver: archive.config,
                eval_resolution: r.grid().resolution(),
                requested: requested.to_vec(),
                reference,
                levels: Vec::new(),
                complete: false,
            },
        };
        for level in &archive.levels {
            writer.push_level(level)?;
        }
        writer.flush()?;
        Ok(writer)
    }

    /// Reopen an archive for appending.
    pub fn open(root: &Path, requested: &[usize]) -> Result<Self> {
        let mut manifest: LadderManifest = read_manifest(root)?;
        manifest.requested = requested.to_vec();
        Ok(Self {
            root: root.to_path_buf(),
            manifest,
        })
    }

    pub fn manifest(&self) -> &LadderManifest {
        &self.manifest
    }

    fn push_level<T: Real>(&mut self, level: &LevelRecord<T>) -> Result<()> {
        let n = level.resolution();
        let dir = level_dir(n);
        fs::create_dir_all(self.root.join(&dir))?;
        let entry = LevelEntry {
            resolution: n,
            omega: format!("{dir}/omega.glsf"),
            advection: format!("{dir}/advection.glsf"),
            advection_mode: level.advection_mode,
            residual: level.steady.residual,
            march_residual: level.steady.march_residual,
            steps: level.steady.steps,
            newton_iterations: level.steady.newton_iterations,
            converged: level.steady.converged,
            residual_log: format!("{dir}/residuals.csv"),
        };
        write_field(&self.root.join(&entry.omega), &level.steady.omega)?;
        write_field(&self.root.join(&entry.advection), &level.advection)?;
        let mut log = csv::Writer::from_path(self.root.join(&entry.residual_log))?;
        for s in &level.steady.history {
            log.serialize(s)?;
        }
        log.flush()?;
        self.manifest.levels.retain(|l| l.resolution != n);
        self.manifest.levels.push(entry);
        self.manifest.levels.sort_by_key(|l| l.resolution);
        Ok(())
    }

    /// Record one solved level and rewrite the manifest.
    pub fn add_level<T: Real>(&mut self, level: &LevelRecord<T>) -> Result<()> {
        self.push_level(level)?;
        self.flush()
    }

    pub fn flush(&mut self) -> Result<()> {
        let m = &mut self.manifest;
        m.complete = m
            .requested
            .iter()
            .all(|n| m.levels.iter().any(|l| l.resolution == *n && l.converged));
        let text = serde_json::to_string_pretty(m)?;
        write_atomic(&self.root.join(MANIFEST), text.as_bytes())
    }
}

/// Load a ladder archive with every field it references.
pub fn load_ladder<T: Real>(root: &Path) -> Result<(LadderArchive<T>, LadderManifest)> {
    let manifest: LadderManifest = read_manifest(root)?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::Format {
            path: root.join(MANIFEST),
            reason: format!("unsupported format version {}", manifest.format_version),
        });
    }
    let f = &manifest.reference;
    let reference = Reference {
        omega: read_field(&root.join(&f.omega))?,
        forcing: read_field(&root.join(&f.forcing))?,
        advection: read_field(&root.join(&f.advection))?,
    };
    if reference.grid().resolution() != manifest.eval_resolution {
        return Err(Error::Format {
            path: root.join(&f.omega),
            reason: format!(
                "reference resolution {} differs from manifest {}",
                reference.grid().resolution(),
                manifest.eval_resolution
            ),
        });
    }
    let mut levels = Vec::with_capacity(manifest.levels.len());
    for e in &manifest.levels {
        let omega: crate::spectral::SpectralField<T> = read_field(&root.join(&e.omega))?;
        let advection = read_field(&root.join(&e.advection))?;
        let history = read_residual_log(&root.join(&e.residual_log))?;
        levels.push(LevelRecord {
            steady: SteadyStateRecord {
                omega,
                residual: e.residual,
                march_residual: e.march_residual,
                steps: e.steps,
                newton_iterations: e.newton_iterations,
                wall_time: 0.0,
                converged: e.converged,
                history,
            },
            advection,
            advection_mode: e.advection_mode,
        });
    }
    let archive = LadderArchive {
        config: manifest.solver,
        reference,
        levels,
    };
    Ok((archive, manifest))
}

pub fn read_residual_log(path: &Path) -> Result<Vec<ResidualSample>> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.display().to_string()));
    }
    let mut reader = csv::Reader::from_path(path)?;
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub format_version: u32,
    #[serde(flatten)]
    pub stamp: Stamp,
    pub resolution: usize,
    pub sample_interval: f64,
    pub samples: Vec<String>,
    pub failure: Option<String>,
}

/// Write `traj` under `root` as one coefficient file per sample.
pub fn save_trajectory<T: Real>(root: &Path, traj: &Trajectory<T>, stamp: Stamp) -> Result<TrajectoryManifest> {
    fs::create_dir_all(root.join("samples"))?;
    let mut names = Vec::with_capacity(traj.len());
    for (j, s) in traj.samples().iter().enumerate() {
        let name = format!("samples/s{j:05}.glsf");
        write_field(&root.join(&name), s)?;
        names.push(name);
    }
    let manifest = TrajectoryManifest {
        format_version: FORMAT_VERSION,
        stamp,
        resolution: traj.grid().resolution(),
        sample_interval: traj.sample_interval().to_f64_lossy(),
        samples: names,
        failure: traj.failure.clone(),
    };
    write_atomic(&root.join(MANIFEST), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(manifest)
}

pub fn load_trajectory<T: Real>(root: &Path) -> Result<(Trajectory<T>, TrajectoryManifest)> {
    let manifest: TrajectoryManifest = read_manifest(root)?;
    let samples = manifest
        .samples
        .iter()
        .map(|s| read_field(&root.join(s)))
        .collect::<Result<Vec<_>>>()?;
    let mut traj = Trajectory::new(samples, T::lit(manifest.sample_interval))?;
    traj.failure = manifest.failure.clone();
    Ok((traj, manifest))
}
