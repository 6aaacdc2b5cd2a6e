//! Key-value experiment configuration.
//!
//! ```text
//! # comment
//! mode = ladder
//! solver.nu = 0.01
//! [ladder]
//! resolutions = 32, 48, 64
//! ```
//!
//! A `[section]` line prefixes the keys that follow with `section.`; a bare
//! `[]` clears the prefix. Every key may appear once, except
//! `expand.scale`, which adds one scale per line.

use std::collections::BTreeSet;
use std::path::PathBuf;

use galerkin_lab::comparability::ComparabilityOptions;
use galerkin_lab::diagnostics::DiagnosticsOptions;
use galerkin_lab::expansion::{LimitMode, SobolevScale};
use galerkin_lab::fractional_time::HGammaParams;
use galerkin_lab::solver::SolverConfig;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("{}", self.render())]
pub struct ConfigError {
    /// 1-based; 0 for whole-file problems.
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    fn render(&self) -> String {
        match self.line {
            0 => self.message.clone(),
            n => format!("line {n}: {}", self.message),
        }
    }

    fn whole(message: impl Into<String>) -> Self {
        Self {
            line: 0,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ladder,
    Diagnose,
    Expand,
    Timedep,
    Example3,
}

/// Steady state whose forcing drives a ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LadderSource {
    /// The smooth manufactured vorticity.
    #[default]
    Manufactured,
    /// `ω = cos x`, forced by `g = ν cos x`.
    SingleMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// `D(A^s)` norms of the vorticity.
    #[default]
    Vorticity,
    /// `D(A^s)` norms of the velocity.
    Velocity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `Σ cos(kx)/k` over `k ∈ {1, 3, 20, 40, 50, 70}`; transport vanishes.
    #[default]
    Shear,
    Manufactured,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TransientForcing {
    #[default]
    None,
    /// Forcing of the manufactured steady state.
    Manufactured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TimeNorm {
    /// `L²(0,T;D(A^s))`.
    #[default]
    L2,
    /// `𝓗^γ(0,T;D(A^s),H)` with the `hgamma.*` parameters.
    Hgamma,
}

pub const DESK_LADDER: [usize; 13] = [32, 36, 48, 54, 64, 72, 96, 108, 128, 144, 192, 216, 256];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderSection {
    pub source: LadderSource,
    pub resolutions: Vec<usize>,
    /// Defaults to twice the finest level.
    pub eval_resolution: Option<usize>,
}

impl Default for LadderSection {
    fn default() -> Self {
        Self {
            source: LadderSource::default(),
            resolutions: DESK_LADDER.to_vec(),
            eval_resolution: None,
        }
    }
}

impl LadderSection {
    pub fn eval_resolution(&self) -> usize {
        self.eval_resolution
            .unwrap_or_else(|| 2 * self.resolutions.last().copied().unwrap_or(0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandSection {
    pub scales: Vec<SobolevScale>,
    pub limit: LimitMode,
    pub measure: Measure,
    /// Defaults to the scale length.
    pub max_terms: Option<usize>,
    pub degenerate_threshold: f64,
    pub floor_rel: f64,
    pub window: usize,
}

impl Default for ExpandSection {
    fn default() -> Self {
        Self {
            scales: Vec::new(),
            limit: LimitMode::Reference,
            measure: Measure::Vorticity,
            max_terms: None,
            degenerate_threshold: 0.1,
            floor_rel: 1e-12,
            window: 1,
        }
    }
}

impl ExpandSection {
    pub fn default_scale() -> SobolevScale {
        SobolevScale::new(vec![1.0, 0.5, 0.0]).expect("valid")
    }

    pub fn scales(&self) -> Vec<SobolevScale> {
        if self.scales.is_empty() {
            vec![Self::default_scale()]
        } else {
            self.scales.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example3Section {
    pub source: String,
    pub resolutions: Vec<usize>,
    pub eval_resolution: Option<usize>,
    pub scale: SobolevScale,
}

impl Default for Example3Section {
    fn default() -> Self {
        Self {
            source: "manufactured-forcing".into(),
            resolutions: vec![32, 64, 128, 256],
            eval_resolution: None,
            scale: SobolevScale::new(vec![1.0, 0.75, 0.5]).expect("valid"),
        }
    }
}

impl Example3Section {
    pub fn eval_resolution(&self) -> usize {
        self.eval_resolution
            .unwrap_or_else(|| 2 * self.resolutions.iter().copied().max().unwrap_or(0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedepSection {
    pub initial: InitialState,
    pub forcing: TransientForcing,
    pub final_time: f64,
    /// Time steps between stored samples.
    pub stride: usize,
    pub norm: TimeNorm,
    pub scale: SobolevScale,
}

impl Default for TimedepSection {
    fn default() -> Self {
        Self {
            initial: InitialState::Shear,
            forcing: TransientForcing::None,
            final_time: 1.0,
            stride: 10,
            norm: TimeNorm::L2,
            scale: SobolevScale::new(vec![0.25, 0.125]).expect("valid"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub output: Option<PathBuf>,
    pub solver: SolverConfig,
    pub ladder: LadderSection,
    pub expand: ExpandSection,
    pub comparability: ComparabilityOptions,
    pub diagnostics: DiagnosticsOptions,
    /// Exponent of the tail norms in the second relation method.
    pub beta: f64,
    pub example3: Example3Section,
    pub timedep: TimedepSection,
    pub hgamma: HGammaParams,
    /// Keys that were set explicitly, in file order.
    #[serde(skip)]
    pub keys: Vec<String>,
}

fn enum_value<E: DeserializeOwned>(v: &str) -> Result<E, String> {
    serde_json::from_value(serde_json::Value::String(v.to_string())).map_err(|e| e.to_string())
}

fn number<N: std::str::FromStr>(v: &str) -> Result<N, String>
where
    N::Err: std::fmt::Display,
{
    v.parse().map_err(|e: N::Err| format!("'{v}': {e}"))
}

fn list<N: std::str::FromStr>(v: &str) -> Result<Vec<N>, String>
where
    N::Err: std::fmt::Display,
{
    v.split(',').map(|s| number(s.trim())).collect()
}

fn boolean(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        _ => Err(format!("'{v}' is not a boolean")),
    }
}

fn scale(v: &str) -> Result<SobolevScale, String> {
    SobolevScale::new(list(v)?).map_err(|e| e.to_string())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen = BTreeSet::new();
        let mut prefix = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| ConfigError { line: line_no, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(section) = line.strip_prefix('[') {
                let name = section
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("unterminated section header '{line}'")))?
                    .trim();
                prefix = if name.is_empty() { String::new() } else { format!("{name}.") };
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
            let key = format!("{prefix}{}", key.trim());
            let value = value.trim();
            if value.is_empty() {
                return Err(err(format!("{key}: empty value")));
            }
            if key != "expand.scale" && !seen.insert(key.clone()) {
                return Err(err(format!("{key} set twice")));
            }
            cfg.set(&key, value).map_err(|m| err(format!("{key}: {m}")))?;
            cfg.keys.push(key);
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        let s = &mut self.solver;
        let n = &mut s.newton;
        let d = &mut self.diagnostics;
        let c = &mut self.comparability;
        let e = &mut self.expand;
        let h = &mut self.hgamma;
        let t = &mut self.timedep;
        let x = &mut self.example3;
        match key {
            "mode" => self.mode = Some(enum_value(v)?),
            "output" => self.output = Some(PathBuf::from(v)),
            "solver.nu" => s.nu = number(v)?,
            "solver.dt" => s.dt = number(v)?,
            "solver.dealias" => s.dealias = enum_value(v)?,
            "solver.viscous" => s.viscous = enum_value(v)?,
            "solver.steady_tol" => s.steady_tol = number(v)?,
            "solver.max_steps" => s.max_steps = number(v)?,
            "solver.nonlinear" => s.nonlinear = enum_value(v)?,
            "solver.newton.enabled" => n.enabled = boolean(v)?,
            "solver.newton.target_ratio" => n.target_ratio = number(v)?,
            "solver.newton.max_iterations" => n.max_iterations = number(v)?,
            "solver.newton.initial_pseudo_step" => n.initial_pseudo_step = number(v)?,
            "solver.newton.max_pseudo_step" => n.max_pseudo_step = number(v)?,
            "solver.newton.gmres_restart" => n.gmres_restart = number(v)?,
            "solver.newton.gmres_max_iterations" => n.gmres_max_iterations = number(v)?,
            "solver.newton.gmres_tolerance" => n.gmres_tolerance = number(v)?,
            "ladder.source" => self.ladder.source = enum_value(v)?,
            "ladder.resolutions" => self.ladder.resolutions = list(v)?,
            "ladder.eval_resolution" => self.ladder.eval_resolution = Some(number(v)?),
            "expand.scale" => e.scales.push(scale(v)?),
            "expand.limit" => e.limit = enum_value(v)?,
            "expand.measure" => e.measure = enum_value(v)?,
            "expand.max_terms" => e.max_terms = Some(number(v)?),
            "expand.degenerate_threshold" => e.degenerate_threshold = number(v)?,
            "expand.floor_rel" => e.floor_rel = number(v)?,
            "expand.window" => e.window = number(v)?,
            "comparability.slope_tolerance" => c.slope_tolerance = number(v)?,
            "comparability.band" => c.band = number(v)?,
            "comparability.trailing_fraction" => c.trailing_fraction = number(v)?,
            "comparability.confidence_threshold" => c.confidence_threshold = number(v)?,
            "diagnose.alpha_grid" => d.alpha_grid = list(v)?,
            "diagnose.scaling" => d.scaling = enum_value(v)?,
            "diagnose.residual_bound_factor" => d.residual_bound_factor = number(v)?,
            "diagnose.trivial_rel" => d.trivial_rel = number(v)?,
            "diagnose.window" => d.window = number(v)?,
            "diagnose.beta" => self.beta = number(v)?,
            "example3.source" => x.source = v.to_string(),
            "example3.resolutions" => x.resolutions = list(v)?,
            "example3.eval_resolution" => x.eval_resolution = Some(number(v)?),
            "example3.scale" => x.scale = scale(v)?,
            "timedep.initial" => t.initial = enum_value(v)?,
            "timedep.forcing" => t.forcing = enum_value(v)?,
            "timedep.final_time" => t.final_time = number(v)?,
            "timedep.stride" => t.stride = number(v)?,
            "timedep.norm" => t.norm = enum_value(v)?,
            "timedep.scale" => t.scale = scale(v)?,
            "hgamma.gamma" => h.gamma = number(v)?,
            "hgamma.alpha_x" => h.alpha_x = number(v)?,
            "hgamma.pad" => h.pad = number(v)?,
            "hgamma.quadrature" => h.quadrature = enum_value(v)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Whether any key that shapes a ladder archive was set.
    pub fn sets_ladder(&self) -> bool {
        self.keys
            .iter()
            .any(|k| k.starts_with("solver.") || k == "ladder.source" || k == "ladder.eval_resolution")
    }

    /// Check the fields `mode` needs.
    pub fn validate(&self, mode: Mode) -> Result<(), ConfigError> {
        if let Some(m) = self.mode {
            if m != mode {
                return Err(ConfigError::whole(format!("config is for mode {m:?}, not {mode:?}")));
            }
        }
        self.solver.validate().map_err(|e| ConfigError::whole(e.to_string()))?;
        let ladder_grid = |res: &[usize], eval: usize| -> Result<(), ConfigError> {
            let finest = res
                .iter()
                .copied()
                .max()
                .ok_or_else(|| ConfigError::whole("no resolutions given"))?;
            if eval < 2 * finest {
                return Err(ConfigError::whole(format!(
                    "evaluation resolution {eval} must be at least twice the finest level {finest}"
                )));
            }
            Ok(())
        };
        match mode {
            Mode::Ladder => {
                ladder_grid(&self.ladder.resolutions, self.ladder.eval_resolution())?;
                galerkin_lab::solver::validate_resolutions(&self.ladder.resolutions, self.ladder.eval_resolution())
                    .map_err(|e| ConfigError::whole(e.to_string()))?;
            }
            Mode::Diagnose => {
                self.comparability.validate().map_err(|e| ConfigError::whole(e.to_string()))?;
                if !(self.beta >= 0.0) {
                    return Err(ConfigError::whole("diagnose.beta must be >= 0"));
                }
            }
            Mode::Expand => self.expansion_check()?,
            Mode::Timedep => {
                ladder_grid(&self.ladder.resolutions, self.ladder.eval_resolution())?;
                self.hgamma.validate().map_err(|e| ConfigError::whole(e.to_string()))?;
                if self.timedep.stride == 0 {
                    return Err(ConfigError::whole("timedep.stride must be >= 1"));
                }
                if !(self.timedep.final_time > 0.0) {
                    return Err(ConfigError::whole("timedep.final_time must be positive"));
                }
            }
            Mode::Example3 => {
                let x = &self.example3;
                let mut sorted = x.resolutions.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != x.resolutions.len() || sorted != x.resolutions {
                    return Err(ConfigError::whole("example3.resolutions must increase strictly"));
                }
                if x.eval_resolution() <= sorted.last().copied().unwrap_or(0) {
                    return Err(ConfigError::whole("example3.eval_resolution must exceed every cutoff"));
                }
                galerkin_lab::expansion::TailSource::builtin(&x.source, self.solver.nu)
                    .map_err(|e| ConfigError::whole(e.to_string()))?;
            }
        }
        Ok(())
    }

    fn expansion_check(&self) -> Result<(), ConfigError> {
        for s in self.expand.scales() {
            self.expansion_options(&s)
                .validate()
                .map_err(|e| ConfigError::whole(e.to_string()))?;
        }
        Ok(())
    }

    pub fn expansion_options(&self, scale: &SobolevScale) -> galerkin_lab::expansion::ExpansionOptions {
        let e = &self.expand;
        galerkin_lab::expansion::ExpansionOptions {
            scale: scale.clone(),
            limit: e.limit,
            max_terms: e.max_terms.unwrap_or(scale.len()),
            degenerate_threshold: e.degenerate_threshold,
            floor_rel: e.floor_rel,
            window: e.window,
        }
    }
}

/// What a ladder archive depends on; its hash is stamped in the manifest.
#[derive(Serialize)]
struct LadderIdentity<'a> {
    solver: &'a SolverConfig,
    source: LadderSource,
    eval_resolution: usize,
}

/// SHA-256 of the settings that determine a ladder's levels, hex encoded.
/// The resolution list is left out so that `--resume` may extend a ladder.
pub fn ladder_hash(cfg: &ExperimentConfig) -> String {
    use sha2::{Digest, Sha256};
    let id = LadderIdentity {
        solver: &cfg.solver,
        source: cfg.ladder.source,
        eval_resolution: cfg.ladder.eval_resolution(),
    };
    let bytes = serde_json::to_vec(&id).expect("serializable");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use galerkin_lab::solver::Dealias;

    #[test]
    fn sections_and_comments() {
        let cfg = ExperimentConfig::parse(
            "mode = ladder  # trailing\n[solver]\nnu = 0.02\ndealias = none\n[ladder]\nresolutions = 32, 48\nsource = single-mode\n[]\noutput = runs/x\n",
        )
        .unwrap();
        assert_eq!(cfg.mode, Some(Mode::Ladder));
        assert_eq!(cfg.solver.nu, 0.02);
        assert_eq!(cfg.solver.dealias, Dealias::None);
        assert_eq!(cfg.ladder.resolutions, vec![32, 48]);
        assert_eq!(cfg.ladder.source, LadderSource::SingleMode);
        assert_eq!(cfg.ladder.eval_resolution(), 96);
        assert_eq!(cfg.output, Some(PathBuf::from("runs/x")));
        assert!(cfg.sets_ladder());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = ExperimentConfig::parse("solver.nu = 0.01\nsolver.nu = 0.02\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(ExperimentConfig::parse("\nbogus = 1").unwrap_err().line, 2);
        assert!(ExperimentConfig::parse("solver.dt = fast").is_err());
        assert!(ExperimentConfig::parse("solver.dealias = sometimes").is_err());
        assert!(ExperimentConfig::parse("just words").is_err());
        assert!(ExperimentConfig::parse("expand.scale = 0.5, 1").is_err());
    }

    #[test]
    fn repeated_scales_accumulate() {
        let cfg = ExperimentConfig::parse("expand.scale = 1, 0.5\nexpand.scale = 0.5, 0.25, 0\n").unwrap();
        assert_eq!(cfg.expand.scales().len(), 2);
        cfg.validate(Mode::Expand).unwrap();
    }

    #[test]
    fn eval_grid_must_cover_twice_the_finest_level() {
        let cfg = ExperimentConfig::parse("ladder.resolutions = 32, 64\nladder.eval_resolution = 96\n").unwrap();
        assert!(cfg.validate(Mode::Ladder).is_err());
        let cfg = ExperimentConfig::parse("mode = expand").unwrap();
        assert!(cfg.validate(Mode::Ladder).is_err());
    }

    #[test]
    fn hash_ignores_resolution_list() {
        let a = ExperimentConfig::parse("ladder.resolutions = 32, 48\nladder.eval_resolution = 256").unwrap();
        let b = ExperimentConfig::parse("ladder.resolutions = 32, 48, 64\nladder.eval_resolution = 256").unwrap();
        let c = ExperimentConfig::parse("ladder.resolutions = 32\nladder.eval_resolution = 256\nsolver.nu = 0.02").unwrap();
        assert_eq!(ladder_hash(&a), ladder_hash(&b));
        assert_ne!(ladder_hash(&a), ladder_hash(&c));
        assert_eq!(ladder_hash(&a).len(), 64);
    }
}
