//! Steady states of the Galerkin system `νAω + P(u·∇ω) = P g`.
//!
//! The state is first marched with AB3; if the march stops above the
//! tolerance the remaining distance is closed by pseudo-transient
//! continuation: implicit Euler steps `(1/τ + νA + L(ω))δ = F(ω)` with `τ`
//! growing as `‖F‖` falls, which become Newton steps once `τ` is large.
//! The linear systems are solved by GMRES, right-preconditioned with the
//! diagonal `1/τ + νA`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{SpectralField, WaveGrid};

use super::config::SolverConfig;
use super::nonlinear::Advection;
use super::stepper::{Forcing, Integrator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    March,
    Newton,
}

/// One entry of a residual log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub phase: Phase,
    /// Time step for [`Phase::March`], Newton iteration for [`Phase::Newton`].
    pub iteration: usize,
    /// `‖ω^{m+1} − ω^m‖/Δt` while marching, `‖F(ω)‖` during Newton.
    pub residual: f64,
    /// GMRES iterations spent on this Newton step.
    pub linear_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct SteadyStateRecord<T: Real> {
    pub omega: SpectralField<T>,
    /// `‖P g − νAω − P(u·∇ω)‖_{L²}` at the returned state.
    pub residual: f64,
    /// Last march increment `‖ω^{m+1} − ω^m‖/Δt`, if any step was taken.
    pub march_residual: Option<f64>,
    pub steps: usize,
    pub newton_iterations: usize,
    pub wall_time: f64,
    pub converged: bool,
    pub history: Vec<ResidualSample>,
}

impl<T: Real> SteadyStateRecord<T> {
    pub fn grid(&self) -> &WaveGrid {
        self.omega.grid()
    }
}

/// `F(ω) = P g − νAω − P(u·∇ω)` on `ω`'s grid.
pub fn steady_residual<T: Real>(
    advection: &Advection<T>,
    forcing: &SpectralField<T>,
    omega: &SpectralField<T>,
    nu: T,
) -> Result<SpectralField<T>> {
    let n = advection.term(omega)?;
    forcing.sub(&omega.laplacian_neg().scale(nu))?.sub(&n)
}

/// Below this many steps between log entries every step is logged.
const LOG_STRIDE: usize = 100;

/// March to a steady state from `initial` on `grid`, then polish with
/// Newton if enabled and needed.
pub fn run_to_steady<T: Real>(
    grid: WaveGrid,
    forcing: &SpectralField<T>,
    config: &SolverConfig,
    initial: &SpectralField<T>,
) -> Result<SteadyStateRecord<T>> {
    config.validate()?;
    let start = Instant::now();
    let g = forcing.resample(grid);
    let nu = T::lit(config.nu);
    let tol = config.steady_tol;
    let mut history = Vec::new();
    let mut integrator = Integrator::new(config, &initial.resample(grid), Forcing::Steady(g.clone()))?;
    let mut march_residual = None;
    let mut marched_to_tol = false;
    for step in 1..=config.max_steps {
        let prev = integrator.state().clone();
        integrator.step()?;
        let r = integrator.state().sub(&prev)?.l2_norm().to_f64_lossy() / config.dt;
        march_residual = Some(r);
        marched_to_tol = r <= tol;
        if step % LOG_STRIDE == 0 || step == 1 || marched_to_tol || step == config.max_steps {
            history.push(ResidualSample {
                phase: Phase::March,
                iteration: step,
                residual: r,
                linear_iterations: 0,
            });
        }
        if marched_to_tol {
            break;
        }
    }
    let steps = integrator.steps();
    let advection = integrator.advection().clone();
    let mut omega = integrator.state().clone();
    let mut residual = steady_residual(&advection, &g, &omega, nu)?.l2_norm().to_f64_lossy();
    let mut newton_iterations = 0;
    if config.newton.enabled && residual > tol * config.newton.target_ratio {
        let out = newton(&advection, &g, omega, config, &mut history)?;
        omega = out.0;
        residual = out.1;
        newton_iterations = out.2;
    }
    let converged = if config.newton.enabled {
        residual <= tol
    } else {
        marched_to_tol
    };
    if !converged {
        log::warn!("{grid}: not converged, residual {residual:.3e} after {steps} steps");
    }
    Ok(SteadyStateRecord {
        omega,
        residual,
        march_residual,
        steps,
        newton_iterations,
        wall_time: start.elapsed().as_secs_f64(),
        converged,
        history,
    })
}

fn newton<T: Real>(
    advection: &Advection<T>,
    g: &SpectralField<T>,
    mut omega: SpectralField<T>,
    config: &SolverConfig,
    history: &mut Vec<ResidualSample>,
) -> Result<(SpectralField<T>, f64, usize)> {
    let opts = &config.newton;
    let nu = T::lit(config.nu);
    let target = config.steady_tol * opts.target_ratio;
    let mut f = steady_residual(advection, g, &omega, nu)?;
    let mut r = f.l2_norm().to_f64_lossy();
    let mut iterations = 0;
    let mut tau = opts.initial_pseudo_step;
    let mut rejected = 0;
    history.push(ResidualSample {
        phase: Phase::Newton,
        iteration: 0,
        residual: r,
        linear_iterations: 0,
    });
    while iterations < opts.max_iterations && r > target {
        iterations += 1;
        let at = advection.sample(&omega)?;
        let shift = T::lit(1.0 / tau);
        // M = 1/τ + νA, diagonal
        let precondition = |y: &SpectralField<T>| y.map_real_multiplier(|k1, k2| (shift + nu * T::from_i64_lossy(k1 * k1 + k2 * k2)).recip());
        // (M + L(ω)) M^{-1} y, L(ω)v = P(u(ω)·∇v + u(v)·∇ω)
        let op = |y: &SpectralField<T>| -> Result<SpectralField<T>> {
            let lin = advection.linearized(&at, &precondition(y))?;
            y.add(&lin)
        };
        let solve = gmres(op, &f, T::lit(opts.gmres_tolerance), opts.gmres_restart, opts.gmres_max_iterations)?;
        let trial = omega.add(&precondition(&solve.solution))?;
        let ft = steady_residual(advection, g, &trial, nu)?;
        let rt = ft.l2_norm().to_f64_lossy();
        if rt.is_finite() && rt < 2.0 * r {
            // switched evolution relaxation: τ grows as the residual falls
            tau = (tau * r / rt).min(opts.max_pseudo_step);
            omega = trial;
            f = ft;
            r = rt;
            rejected = 0;
            history.push(ResidualSample {
                phase: Phase::Newton,
                iteration: iterations,
                residual: r,
                linear_iterations: solve.iterations,
            });
        } else {
            rejected += 1;
            tau *= 0.25;
            if rejected > 6 {
                log::debug!("pseudo-transient continuation stalled at residual {r:.3e}");
                break;
            }
        }
    }
    if !r.is_finite() {
        return Err(Error::BlowUp {
            steps: iterations,
            reason: "non-finite residual in Newton iteration".into(),
        });
    }
    Ok((omega, r, iterations))
}

#[derive(Debug, Clone)]
pub struct GmresOutcome<T: Real> {
    pub solution: SpectralField<T>,
    pub iterations: usize,
    /// Final residual norm relative to `‖b‖`.
    pub relative_residual: f64,
}

/// Restarted GMRES for `op(x) = b`, starting from `x = 0`, with the field
/// inner product.
pub fn gmres<T: Real>(
    mut op: impl FnMut(&SpectralField<T>) -> Result<SpectralField<T>>,
    b: &SpectralField<T>,
    rel_tol: T,
    restart: usize,
    max_iterations: usize,
) -> Result<GmresOutcome<T>> {
    let grid = *b.grid();
    let bnorm = b.l2_norm();
    let mut x = SpectralField::zeros(grid);
    if bnorm == T::zero() {
        return Ok(GmresOutcome {
            solution: x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let target = rel_tol * bnorm;
    let mut total = 0;
    let mut res_norm = bnorm;
    let mut r = b.clone();
    while total < max_iterations {
        let beta = res_norm;
        let mut basis = vec![r.scale(beta.recip())];
        let mut hess: Vec<Vec<T>> = Vec::new();
        let mut cs: Vec<T> = Vec::new();
        let mut sn: Vec<T> = Vec::new();
        let mut s = vec![beta];
        let mut j = 0;
        while j < restart && total < max_iterations {
            let mut w = op(&basis[j])?;
            let mut h = vec![T::zero(); j + 2];
            for (i, v) in basis.iter().enumerate() {
                h[i] = w.inner(v)?;
                w.axpy_mut(-h[i], v)?;
            }
            h[j + 1] = w.l2_norm();
            for i in 0..j {
                let t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            let denom = (h[j] * h[j] + h[j + 1] * h[j + 1]).sqrt();
            let (c, sv) = if denom == T::zero() {
                (T::one(), T::zero())
            } else {
                (h[j] / denom, h[j + 1] / denom)
            };
            cs.push(c);
            sn.push(sv);
            let hj1 = h[j + 1];
            h[j] = c * h[j] + sv * hj1;
            h[j + 1] = T::zero();
            s.push(-sv * s[j]);
            s[j] = c * s[j];
            hess.push(h);
            total += 1;
            j += 1;
            res_norm = s[j].abs();
            if res_norm <= target || hj1 == T::zero() {
                break;
            }
            basis.push(w.scale(hj1.recip()));
        }
        // back substitution on the j×j triangle
        let mut y = vec![T::zero(); j];
        for i in (0..j).rev() {
            let mut acc = s[i];
            for (k, yk) in y.iter().enumerate().take(j).skip(i + 1) {
                acc = acc - hess[k][i] * *yk;
            }
            y[i] = acc / hess[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            x.axpy_mut(*yi, &basis[i])?;
        }
        if res_norm <= target {
            break;
        }
        r = b.sub(&op(&x)?)?;
        res_norm = r.l2_norm();
        if res_norm <= target {
            break;
        }
    }
    Ok(GmresOutcome {
        solution: x,
        iterations: total,
        relative_residual: (res_norm / bnorm).to_f64_lossy(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::config::{Dealias, NewtonOptions, Viscous};
    use num_complex::Complex;

    #[test]
    fn gmres_solves_diagonal_system() {
        let g = WaveGrid::square(8).unwrap();
        let b = SpectralField::<f64>::from_fn(g, |k1, k2| Complex::new(1.0, (k1 - k2) as f64));
        let op = |v: &SpectralField<f64>| Ok(v.map_real_multiplier(|k1, k2| 1.0 + (k1 * k1 + k2) as f64));
        let out = gmres(op, &b, 1e-12, 200, 400).unwrap();
        let back = op(&out.solution).unwrap();
        assert!(back.sub(&b).unwrap().l2_norm() < 1e-10 * b.l2_norm());
        assert!(out.relative_residual < 1e-12);
    }

    #[test]
    fn gmres_restarts_still_converge() {
        let g = WaveGrid::square(10).unwrap();
        let b = SpectralField::<f64>::from_fn(g, |k1, k2| Complex::new((k1 + 2 * k2) as f64, 0.5));
        let op = |v: &SpectralField<f64>| Ok(v.map_real_multiplier(|k1, k2| 1.0 + 0.1 * (k1 * k1 + k2 * k2) as f64));
        let out = gmres(op, &b, 1e-10, 5, 2000).unwrap();
        assert!(out.relative_residual < 1e-10);
    }

    #[test]
    fn single_mode_forcing_converges_to_cosine() {
        let g = WaveGrid::square(16).unwrap();
        let nu = 0.01;
        let cos = SpectralField::<f64>::cosine(g, 1, 0, 1.0).unwrap();
        let config = SolverConfig {
            max_steps: 10,
            ..Default::default()
        };
        let rec = run_to_steady(g, &cos.scale(nu), &config, &SpectralField::zeros(g)).unwrap();
        assert!(rec.converged);
        assert!(rec.omega.sub(&cos).unwrap().l2_norm() < 1e-8);
    }

    #[test]
    fn unforced_state_decays_to_zero() {
        let g = WaveGrid::square(16).unwrap();
        let start = SpectralField::<f64>::from_fn(g, |k1, k2| Complex::new(1.0 / (1 + k1 * k1 + k2 * k2) as f64, 0.0));
        let rec = run_to_steady(g, &SpectralField::zeros(g), &SolverConfig::default(), &start).unwrap();
        assert!(rec.converged);
        assert!(rec.omega.l2_norm() < 1e-8);
    }

    #[test]
    fn unconverged_march_is_flagged_not_an_error() {
        let g = WaveGrid::square(8).unwrap();
        let cos = SpectralField::<f64>::cosine(g, 1, 0, 1.0).unwrap();
        let config = SolverConfig {
            max_steps: 3,
            newton: NewtonOptions {
                enabled: false,
                ..Default::default()
            },
            ..Default::default()
        };
        let rec = run_to_steady(g, &cos.scale(0.01), &config, &SpectralField::zeros(g)).unwrap();
        assert!(!rec.converged);
        assert_eq!(rec.steps, 3);
    }

    #[test]
    fn explicit_march_fixed_point_matches_newton() {
        // Explicit AB3 fixed points solve the steady equation exactly, so a
        // long march and a Newton solve must land on the same state.
        let g = WaveGrid::square(12).unwrap();
        let nu = 0.05;
        let forcing = SpectralField::<f64>::from_fn(g, |k1, k2| {
            let l = (k1 * k1 + k2 * k2) as f64;
            Complex::new(0.2 / (l * l), 0.1 * k1 as f64 / (l * l * l))
        });
        let march = SolverConfig {
            nu,
            dt: 0.01,
            viscous: Viscous::Explicit,
            dealias: Dealias::TwoThirds,
            steady_tol: 1e-10,
            max_steps: 200_000,
            newton: NewtonOptions {
                enabled: false,
                ..Default::default()
            },
            ..Default::default()
        };
        let a = run_to_steady(g, &forcing, &march, &SpectralField::zeros(g)).unwrap();
        assert!(a.converged);
        let solve = SolverConfig {
            max_steps: 0,
            newton: NewtonOptions::default(),
            ..march
        };
        let b = run_to_steady(g, &forcing, &solve, &SpectralField::zeros(g)).unwrap();
        assert!(b.converged);
        let diff = a.omega.sub(&b.omega).unwrap().l2_norm();
        assert!(diff < 1e-8, "march vs newton differ by {diff:e}");
    }
}
