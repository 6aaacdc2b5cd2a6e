//! Spectral-Galerkin approximations of the 2D periodic Navier–Stokes
//! equations in vorticity form, and tools for extracting asymptotic
//! expansions from sequences of truncated solutions.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` also rejects NaN.

pub mod archive;
pub mod comparability;
pub mod diagnostics;
pub mod error;
pub mod expansion;
pub mod fit;
pub mod fractional_time;
pub mod scalar;
pub mod solver;
pub mod spectral;
pub mod trajectory;

pub use error::{Error, Result};
pub use scalar::Real;
pub use spectral::{SpectralField, Truncation, WaveGrid};
pub use trajectory::Trajectory;

/// Double-precision field, the type all experiments run in.
pub type Field = SpectralField<f64>;
