//! Fourier-side fields on the `[0, 2π]²` torus.

mod field;
mod grid;
pub mod io;
mod ops;
mod transform;

pub use field::SpectralField;
pub use grid::{fft_friendly_size, is_2p3q, Truncation, WaveGrid};
pub use ops::Velocity;
pub use transform::Transform2d;
