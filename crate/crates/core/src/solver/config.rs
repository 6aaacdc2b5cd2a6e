use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical grid used for the quadratic transport product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    /// Product formed on a grid padded by 3/2; equivalent to zeroing the
    /// upper third of a 3/2-sized grid and exact for the Galerkin product.
    #[default]
    TwoThirds,
    /// Product formed on the smallest grid that represents the truncation,
    /// so aliased wavenumbers fold back into the retained set.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Viscous {
    /// Exact per-mode factor `e^{−ν|k|²Δt}`; AB3 acts on the remaining tendency.
    #[default]
    IntegratingFactor,
    /// AB3 applied to the full right-hand side, viscous term included.
    Explicit,
}

/// Which transport term is stored alongside each converged level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearMode {
    /// `P_n(u_n·∇ω_n)`, the term appearing in the Galerkin system.
    #[default]
    Projected,
    /// The unprojected product, resolved on a grid of twice the resolution.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonOptions {
    pub enabled: bool,
    /// Stop once `‖F(ω)‖` falls below this fraction of the steady tolerance.
    pub target_ratio: f64,
    pub max_iterations: usize,
    /// First pseudo time step of the continuation.
    pub initial_pseudo_step: f64,
    /// Cap on the pseudo time step; large values recover plain Newton.
    pub max_pseudo_step: f64,
    pub gmres_restart: usize,
    pub gmres_max_iterations: usize,
    /// Relative GMRES tolerance ceiling; tightened as the residual drops.
    pub gmres_tolerance: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            enabled: true,
            target_ratio: 1e-2,
            max_iterations: 60,
            initial_pseudo_step: 10.0,
            max_pseudo_step: 1e12,
            gmres_restart: 60,
            gmres_max_iterations: 600,
            gmres_tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub nu: f64,
    pub dt: f64,
    pub dealias: Dealias,
    pub viscous: Viscous,
    /// Steady tolerance on `‖ω^{m+1} − ω^m‖/Δt`, and on the steady residual.
    pub steady_tol: f64,
    pub max_steps: usize,
    pub nonlinear: NonlinearMode,
    pub newton: NewtonOptions,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            nu: 0.01,
            dt: 1e-3,
            dealias: Dealias::TwoThirds,
            viscous: Viscous::IntegratingFactor,
            steady_tol: 1e-11,
            max_steps: 2000,
            nonlinear: NonlinearMode::Projected,
            newton: NewtonOptions::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("nu", self.nu)?;
        positive("dt", self.dt)?;
        positive("steady_tol", self.steady_tol)?;
        positive("newton.target_ratio", self.newton.target_ratio)?;
        positive("newton.gmres_tolerance", self.newton.gmres_tolerance)?;
        positive("newton.initial_pseudo_step", self.newton.initial_pseudo_step)?;
        positive("newton.max_pseudo_step", self.newton.max_pseudo_step)?;
        if self.newton.gmres_restart == 0 {
            return Err(Error::Config("newton.gmres_restart must be >= 1".into()));
        }
        Ok(())
    }
}
