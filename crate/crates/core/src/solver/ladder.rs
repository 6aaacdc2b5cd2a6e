//! Resolution ladders of steady states with warm starts.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{is_2p3q, SpectralField, WaveGrid};

use super::config::{Dealias, NonlinearMode, SolverConfig};
use super::nonlinear::Advection;
use super::steady::{run_to_steady, SteadyStateRecord};

/// Exact steady state on an evaluation grid finer than every level.
///
/// The forcing is defined on that grid as `νAω + P_E(u·∇ω)`, so `ω` solves
/// the steady problem truncated at the evaluation grid exactly.
#[derive(Debug, Clone)]
pub struct Reference<T: Real> {
    pub omega: SpectralField<T>,
    pub forcing: SpectralField<T>,
    /// `P_E(u·∇ω)`.
    pub advection: SpectralField<T>,
}

impl<T: Real> Reference<T> {
    pub fn from_vorticity(omega: SpectralField<T>, nu: T, dealias: Dealias) -> Result<Self> {
        let advection = Advection::new(*omega.grid(), dealias)?.term(&omega)?;
        let forcing = omega.laplacian_neg().scale(nu).add(&advection)?;
        Ok(Self {
            omega,
            forcing,
            advection,
        })
    }

    pub fn grid(&self) -> &WaveGrid {
        self.omega.grid()
    }
}

#[derive(Debug, Clone)]
pub struct LevelRecord<T: Real> {
    pub steady: SteadyStateRecord<T>,
    /// Transport term at the converged state, per the configured mode.
    pub advection: SpectralField<T>,
    pub advection_mode: NonlinearMode,
}

impl<T: Real> LevelRecord<T> {
    pub fn resolution(&self) -> usize {
        self.steady.grid().resolution()
    }

    pub fn grid(&self) -> &WaveGrid {
        self.steady.grid()
    }
}

#[derive(Debug, Clone)]
pub struct LadderArchive<T: Real> {
    pub config: SolverConfig,
    pub reference: Reference<T>,
    pub levels: Vec<LevelRecord<T>>,
}

impl<T: Real> LadderArchive<T> {
    pub fn resolutions(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.resolution()).collect()
    }

    pub fn all_converged(&self) -> bool {
        self.levels.iter().all(|l| l.steady.converged)
    }
}

/// Check that resolutions are even, strictly increasing, of the form
/// `2^p 3^q`, and strictly coarser than the evaluation grid by a factor 2.
pub fn validate_resolutions(resolutions: &[usize], eval_resolution: usize) -> Result<()> {
    if resolutions.is_empty() {
        return Err(Error::Config("ladder needs at least one resolution".into()));
    }
    for w in resolutions.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Config(format!("resolutions must increase strictly: {} then {}", w[0], w[1])));
        }
    }
    for &n in resolutions {
        if n % 2 != 0 || !is_2p3q(n) {
            return Err(Error::Config(format!("resolution {n} is not an even number of the form 2^p 3^q")));
        }
    }
    let finest = *resolutions.last().expect("nonempty");
    if eval_resolution < 2 * finest {
        return Err(Error::Config(format!(
            "evaluation resolution {eval_resolution} must be at least twice the finest level {finest}"
        )));
    }
    Ok(())
}

/// Solve every level, warm-starting each from the previous converged state;
/// the first level starts from zero.
pub fn run_ladder<T: Real>(
    resolutions: &[usize],
    config: &SolverConfig,
    reference: Reference<T>,
) -> Result<LadderArchive<T>> {
    let mut archive = LadderArchive {
        config: *config,
        reference,
        levels: Vec::new(),
    };
    extend_ladder(&mut archive, resolutions, |_| Ok(()))?;
    Ok(archive)
}

/// Add the missing or unconverged levels of `resolutions` to `archive`,
/// calling `on_level` after each newly solved level.
pub fn extend_ladder<T: Real>(
    archive: &mut LadderArchive<T>,
    resolutions: &[usize],
    mut on_level: impl FnMut(&LevelRecord<T>) -> Result<()>,
) -> Result<()> {
    archive.config.validate()?;
    validate_resolutions(resolutions, archive.reference.grid().resolution())?;
    let config = archive.config;
    let forcing = archive.reference.forcing.clone();
    let mut warm: Option<SpectralField<T>> = None;
    for &n in resolutions {
        let grid = WaveGrid::square(n)?;
        if let Some(pos) = archive.levels.iter().position(|l| l.resolution() == n) {
            if archive.levels[pos].steady.converged {
                log::info!("level n={n} already converged; skipping");
                warm = Some(archive.levels[pos].steady.omega.clone());
                continue;
            }
            archive.levels.remove(pos);
        }
        let initial = warm.as_ref().map_or_else(|| SpectralField::zeros(grid), |w| w.resample(grid));
        let steady = run_to_steady(grid, &forcing, &config, &initial)?;
        log::info!(
            "level n={n}: residual {:.3e}, {} steps, {} newton, {:.1}s",
            steady.residual,
            steady.steps,
            steady.newton_iterations,
            steady.wall_time
        );
        let advection = Advection::for_mode(grid, config.dealias, config.nonlinear)?.term(&steady.omega)?;
        let level = LevelRecord {
            steady,
            advection,
            advection_mode: config.nonlinear,
        };
        on_level(&level)?;
        warm = Some(level.steady.omega.clone());
        archive.levels.push(level);
        archive.levels.sort_by_key(|l| l.resolution());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_validation() {
        assert!(validate_resolutions(&[32, 36, 48], 96).is_ok());
        assert!(validate_resolutions(&[33], 96).is_err());
        assert!(validate_resolutions(&[40], 96).is_err());
        assert!(validate_resolutions(&[36, 32], 96).is_err());
        assert!(validate_resolutions(&[32, 48], 64).is_err());
        assert!(validate_resolutions(&[], 64).is_err());
    }

    #[test]
    fn single_mode_ladder_is_exact() {
        let eval = WaveGrid::square(128).unwrap();
        let cos = SpectralField::<f64>::cosine(eval, 1, 0, 1.0).unwrap();
        let config = SolverConfig {
            max_steps: 5,
            ..Default::default()
        };
        let reference = Reference::from_vorticity(cos.clone(), config.nu, config.dealias).unwrap();
        assert!(reference.advection.max_abs() < 1e-15);
        let archive = run_ladder(&[32, 64], &config, reference).unwrap();
        assert_eq!(archive.resolutions(), vec![32, 64]);
        for level in &archive.levels {
            assert!(level.steady.converged);
            let err = level.steady.omega.resample(eval).sub(&cos).unwrap().l2_norm();
            assert!(err < 1e-8);
        }
    }
}
