//! Third-order Adams–Bashforth time stepping with an SSP-RK3 start-up.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{SpectralField, WaveGrid};

use super::config::{SolverConfig, Viscous};
use super::nonlinear::Advection;

/// Right-hand side forcing `g(t)`, projected onto the integration grid on use.
pub enum Forcing<T: Real> {
    Zero,
    Steady(SpectralField<T>),
    Unsteady(Box<dyn Fn(T) -> SpectralField<T> + Send + Sync>),
}

impl<T: Real> std::fmt::Debug for Forcing<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Forcing::Zero => f.write_str("Forcing::Zero"),
            Forcing::Steady(g) => write!(f, "Forcing::Steady({})", g.grid()),
            Forcing::Unsteady(_) => f.write_str("Forcing::Unsteady(..)"),
        }
    }
}

impl<T: Real> Forcing<T> {
    fn on_grid(&self, grid: WaveGrid, t: T) -> Option<SpectralField<T>> {
        match self {
            Forcing::Zero => None,
            Forcing::Steady(g) => Some(g.resample(grid)),
            Forcing::Unsteady(f) => Some(f(t).resample(grid)),
        }
    }
}

pub const AB3_WEIGHTS: [f64; 3] = [23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0];

/// Per-mode viscous factors `e^{−c ν|k|²Δt}` for `c = 1/2, −1/2, 1, 2, 3`.
#[derive(Debug, Clone)]
struct Factors<T> {
    half: Vec<T>,
    neg_half: Vec<T>,
    one: Vec<T>,
    two: Vec<T>,
    three: Vec<T>,
    nu_lambda: Vec<T>,
}

impl<T: Real> Factors<T> {
    fn new(grid: &WaveGrid, nu: T, dt: T) -> Self {
        let n = grid.storage_len();
        let mut f = Self {
            half: vec![T::zero(); n],
            neg_half: vec![T::zero(); n],
            one: vec![T::zero(); n],
            two: vec![T::zero(); n],
            three: vec![T::zero(); n],
            nu_lambda: vec![T::zero(); n],
        };
        for (idx, k1, k2) in grid.half_plane() {
            let nl = nu * T::from_i64_lossy(k1 * k1 + k2 * k2);
            let z = nl * dt;
            let h = T::lit(0.5);
            f.half[idx] = (-h * z).exp();
            f.neg_half[idx] = (h * z).exp();
            f.one[idx] = (-z).exp();
            f.two[idx] = (-z - z).exp();
            f.three[idx] = (-T::lit(3.0) * z).exp();
            f.nu_lambda[idx] = nl;
        }
        f
    }
}

fn mul<T: Real>(f: &SpectralField<T>, m: &[T]) -> SpectralField<T> {
    let grid = *f.grid();
    f.map_real_multiplier(|k1, k2| {
        let idx = if k2 >= 0 { grid.index(k1, k2) } else { grid.index(-k1, -k2) };
        m[idx]
    })
}

/// Linear combination `Σ c_i f_i` of fields on a common grid.
fn combine<T: Real>(terms: &[(T, &SpectralField<T>)]) -> Result<SpectralField<T>> {
    let mut acc = SpectralField::zeros(*terms[0].1.grid());
    for (c, f) in terms {
        acc.axpy_mut(*c, f)?;
    }
    Ok(acc)
}

/// Time integrator for `∂tω + νAω + P(u·∇ω) = P g`.
#[derive(Debug)]
pub struct Integrator<T: Real> {
    grid: WaveGrid,
    viscous: Viscous,
    dt: T,
    advection: Advection<T>,
    forcing: Forcing<T>,
    factors: Factors<T>,
    /// Newest first. Holds the tendency `P g − P(u·∇ω)` in integrating-factor
    /// mode and the full right-hand side in explicit mode.
    history: VecDeque<SpectralField<T>>,
    omega: SpectralField<T>,
    time: T,
    steps: usize,
}

impl<T: Real> Integrator<T> {
    pub fn new(config: &SolverConfig, initial: &SpectralField<T>, forcing: Forcing<T>) -> Result<Self> {
        config.validate()?;
        let grid = *initial.grid();
        let nu = T::lit(config.nu);
        let dt = T::lit(config.dt);
        Ok(Self {
            grid,
            viscous: config.viscous,
            dt,
            advection: Advection::new(grid, config.dealias)?,
            forcing,
            factors: Factors::new(&grid, nu, dt),
            history: VecDeque::with_capacity(3),
            omega: initial.clone(),
            time: T::zero(),
            steps: 0,
        })
    }

    #[inline]
    pub fn state(&self) -> &SpectralField<T> {
        &self.omega
    }

    #[inline]
    pub fn time(&self) -> T {
        self.time
    }

    #[inline]
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn advection(&self) -> &Advection<T> {
        &self.advection
    }

    /// `P g(t) − P(u·∇ω)`.
    fn tendency(&self, omega: &SpectralField<T>, t: T) -> Result<SpectralField<T>> {
        let n = self.advection.term(omega)?;
        match self.forcing.on_grid(self.grid, t) {
            Some(g) => g.sub(&n),
            None => Ok(n.scale(-T::one())),
        }
    }

    /// Right-hand side stored in the AB3 history.
    fn rate(&self, omega: &SpectralField<T>, t: T) -> Result<SpectralField<T>> {
        let tend = self.tendency(omega, t)?;
        match self.viscous {
            Viscous::IntegratingFactor => Ok(tend),
            Viscous::Explicit => tend.sub(&mul(omega, &self.factors.nu_lambda)),
        }
    }

    fn rk3_step(&self, rate0: &SpectralField<T>) -> Result<SpectralField<T>> {
        let (dt, t) = (self.dt, self.time);
        let u0 = &self.omega;
        let (q, h, tq, tt) = (T::lit(0.25), T::lit(0.5), T::lit(0.75), T::lit(1.0 / 3.0));
        match self.viscous {
            Viscous::Explicit => {
                let u1 = u0.axpy(dt, rate0)?;
                let r1 = self.rate(&u1, t + dt)?;
                let u2 = combine(&[(tq, u0), (q, &u1), (q * dt, &r1)])?;
                let r2 = self.rate(&u2, t + h * dt)?;
                combine(&[(tt, u0), (T::one() - tt, &u2), ((T::one() - tt) * dt, &r2)])
            }
            Viscous::IntegratingFactor => {
                let f = &self.factors;
                let u1 = mul(&u0.axpy(dt, rate0)?, &f.one);
                let r1 = self.rate(&u1, t + dt)?;
                let u2 = combine(&[(tq, &mul(u0, &f.half)), (q, &mul(&u1.axpy(dt, &r1)?, &f.neg_half))])?;
                let r2 = self.rate(&u2, t + h * dt)?;
                combine(&[(tt, &mul(u0, &f.one)), (T::one() - tt, &mul(&u2.axpy(dt, &r2)?, &f.half))])
            }
        }
    }

    /// Advance one step of size `Δt`. The first two steps use SSP-RK3 to
    /// fill the AB3 history.
    pub fn step(&mut self) -> Result<()> {
        let rate = self.rate(&self.omega, self.time)?;
        let next = if self.history.len() < 2 {
            self.rk3_step(&rate)?
        } else {
            ab3_combine(
                &self.omega,
                [&rate, &self.history[0], &self.history[1]],
                self.dt,
                self.viscous,
                &self.factors,
            )?
        };
        if !next.is_finite() {
            return Err(Error::BlowUp {
                steps: self.steps + 1,
                reason: format!("non-finite vorticity at t = {}", self.time + self.dt),
            });
        }
        self.history.push_front(rate);
        self.history.truncate(2);
        self.omega = next;
        self.steps += 1;
        self.time = T::from_usize_lossy(self.steps) * self.dt;
        Ok(())
    }
}

fn ab3_combine<T: Real>(
    omega: &SpectralField<T>,
    rates: [&SpectralField<T>; 3],
    dt: T,
    viscous: Viscous,
    f: &Factors<T>,
) -> Result<SpectralField<T>> {
    let [b0, b1, b2] = AB3_WEIGHTS.map(|w| T::lit(w) * dt);
    match viscous {
        Viscous::Explicit => combine(&[(T::one(), omega), (b0, rates[0]), (b1, rates[1]), (b2, rates[2])]),
        Viscous::IntegratingFactor => {
            let lead = omega.axpy(b0, rates[0])?;
            combine(&[
                (T::one(), &mul(&lead, &f.one)),
                (b1, &mul(rates[1], &f.two)),
                (b2, &mul(rates[2], &f.three)),
            ])
        }
    }
}

/// One AB3 step from `ω^m` given the rates at steps `m, m−1, m−2`
/// (newest first): tendencies `P g − P(u·∇ω)` in integrating-factor mode,
/// full right-hand sides in explicit mode.
pub fn ab3_step<T: Real>(
    omega: &SpectralField<T>,
    rates: [&SpectralField<T>; 3],
    config: &SolverConfig,
) -> Result<SpectralField<T>> {
    config.validate()?;
    let factors = Factors::new(omega.grid(), T::lit(config.nu), T::lit(config.dt));
    let next = ab3_combine(omega, rates, T::lit(config.dt), config.viscous, &factors)?;
    if !next.is_finite() {
        return Err(Error::BlowUp {
            steps: 1,
            reason: "non-finite vorticity after AB3 step".into(),
        });
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(viscous: Viscous) -> SolverConfig {
        SolverConfig {
            viscous,
            ..Default::default()
        }
    }

    #[test]
    fn integrating_factor_is_exact_for_free_decay() {
        let g = WaveGrid::square(16).unwrap();
        let c = SpectralField::<f64>::cosine(g, 2, 0, 1.0).unwrap();
        let config = cfg(Viscous::IntegratingFactor);
        let mut it = Integrator::new(&config, &c, Forcing::Zero).unwrap();
        for m in 1..=5 {
            it.step().unwrap();
            let want = 0.5 * (-4.0 * config.nu * config.dt * m as f64).exp();
            assert!((it.state().coeff(2, 0).re - want).abs() < 1e-16, "step {m}");
        }
    }

    #[test]
    fn explicit_ab3_follows_scalar_recurrence() {
        let g = WaveGrid::square(8).unwrap();
        let c = SpectralField::<f64>::cosine(g, 2, 0, 1.0).unwrap();
        let config = cfg(Viscous::Explicit);
        let a = -4.0 * config.nu;
        let rates = [c.scale(a), c.scale(a * 1.001), c.scale(a * 1.002)];
        let next = ab3_step(&c, [&rates[0], &rates[1], &rates[2]], &config).unwrap();
        let want = 0.5 * (1.0 + config.dt * a * (23.0 - 16.0 * 1.001 + 5.0 * 1.002) / 12.0);
        assert!((next.coeff(2, 0).re - want).abs() < 1e-16);
    }

    #[test]
    fn explicit_rk3_startup_is_third_order() {
        // y' = −λ y, SSP-RK3 amplification 1 − z + z²/2 − z³/6.
        let g = WaveGrid::square(8).unwrap();
        let c = SpectralField::<f64>::cosine(g, 0, 3, 2.0).unwrap();
        let config = cfg(Viscous::Explicit);
        let mut it = Integrator::new(&config, &c, Forcing::Zero).unwrap();
        it.step().unwrap();
        let z = 9.0 * config.nu * config.dt;
        let want = 1.0 - z + z * z / 2.0 - z * z * z / 6.0;
        assert!((it.state().coeff(0, 3).re - want).abs() < 1e-15);
    }

    #[test]
    fn nan_state_is_a_blow_up() {
        let g = WaveGrid::square(8).unwrap();
        let c = SpectralField::<f64>::cosine(g, 1, 0, f64::NAN).unwrap();
        let mut it = Integrator::new(&SolverConfig::default(), &c, Forcing::Zero).unwrap();
        assert!(matches!(it.step(), Err(Error::BlowUp { .. })));
    }
}
