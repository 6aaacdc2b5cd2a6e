//! Pseudo-spectral integration of the vorticity equation
//! `∂tω − νΔω + u·∇ω = g`, `u = ∇⊥ψ`, `−Δψ = ω`.

mod config;
mod ladder;
pub mod manufactured;
mod nonlinear;
mod steady;
mod stepper;
mod transient;

pub use config::{Dealias, NewtonOptions, NonlinearMode, SolverConfig, Viscous};
pub use ladder::{extend_ladder, run_ladder, validate_resolutions, LadderArchive, LevelRecord, Reference};
pub use manufactured::manufactured_vorticity;
pub use nonlinear::{compute_forcing, nonlinear_term, Advection, Sampled};
pub use steady::{gmres, run_to_steady, steady_residual, GmresOutcome, Phase, ResidualSample, SteadyStateRecord};
pub use stepper::{ab3_step, Forcing, Integrator, AB3_WEIGHTS};
pub use transient::{heat_decay, run_transient};
