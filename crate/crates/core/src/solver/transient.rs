//! Fixed-step transient runs with uniform sampling.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{SpectralField, WaveGrid};
use crate::trajectory::Trajectory;

use super::config::SolverConfig;
use super::stepper::{Forcing, Integrator};

/// Integrate from `P_n ω₀` on `grid` over `[0, final_time]`, keeping every
/// `stride`-th state including both endpoints.
///
/// A blow-up stops the run; the samples gathered so far are returned with
/// [`Trajectory::failure`] set.
pub fn run_transient<T: Real>(
    grid: WaveGrid,
    initial: &SpectralField<T>,
    forcing: Forcing<T>,
    final_time: f64,
    config: &SolverConfig,
    stride: usize,
) -> Result<Trajectory<T>> {
    config.validate()?;
    if !(final_time > 0.0) || !final_time.is_finite() {
        return Err(Error::Config(format!("final time must be positive, got {final_time}")));
    }
    if stride == 0 {
        return Err(Error::Config("sample stride must be >= 1".into()));
    }
    let steps = (final_time / config.dt).round() as usize;
    if steps == 0 || ((steps as f64) * config.dt - final_time).abs() > 1e-9 * final_time {
        return Err(Error::Config(format!(
            "final time {final_time} is not a whole number of steps of {}",
            config.dt
        )));
    }
    if !steps.is_multiple_of(stride) {
        return Err(Error::Config(format!("{steps} steps are not a multiple of the stride {stride}")));
    }
    let mut integrator = Integrator::new(config, &initial.resample(grid), forcing)?;
    let mut samples = vec![integrator.state().clone()];
    let mut failure = None;
    for step in 1..=steps {
        if let Err(e) = integrator.step() {
            match e {
                Error::BlowUp { .. } => {
                    failure = Some(e.to_string());
                    break;
                }
                other => return Err(other),
            }
        }
        if step % stride == 0 {
            samples.push(integrator.state().clone());
        }
    }
    let mut traj = Trajectory::new(samples, T::lit(config.dt * stride as f64))?;
    traj.failure = failure;
    Ok(traj)
}

/// Exact solution of `∂tω = νΔω` from `P_grid ω₀`: every coefficient decays
/// as `e^{−ν|k|²t}`. Sampled at `t_j = j·interval`, `j = 0..=count`.
pub fn heat_decay<T: Real>(
    grid: WaveGrid,
    initial: &SpectralField<T>,
    nu: f64,
    interval: f64,
    count: usize,
) -> Result<Trajectory<T>> {
    let start = initial.resample(grid);
    let samples = (0..=count)
        .map(|j| {
            let t = interval * j as f64;
            start.map_real_multiplier(|k1, k2| T::lit((-nu * (k1 * k1 + k2 * k2) as f64 * t).exp()))
        })
        .collect();
    Trajectory::new(samples, T::lit(interval))
}
