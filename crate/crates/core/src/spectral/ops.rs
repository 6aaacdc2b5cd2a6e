//! Fractional powers of the Stokes operator, projectors and the
//! vorticity/velocity maps.

use super::field::SpectralField;
use super::grid::WaveGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[inline]
fn eigenvalue<T: Real>(k1: i64, k2: i64) -> T {
    T::from_i64_lossy(k1 * k1 + k2 * k2)
}

/// `λ^p` for an eigenvalue `λ = |k|²`, with integer fast paths.
#[inline]
fn eigen_power<T: Real>(lambda: T, p: T) -> T {
    if p == T::zero() {
        T::one()
    } else if p == T::one() {
        lambda
    } else if p == -T::one() {
        lambda.recip()
    } else {
        lambda.powf(p)
    }
}

/// Divergence-free velocity `u = (u1, u2)` stored as two scalar fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Velocity<T: Real> {
    pub u1: SpectralField<T>,
    pub u2: SpectralField<T>,
}

impl<T: Real> Velocity<T> {
    /// `‖A^α u‖` of the vector field.
    pub fn frac_norm(&self, alpha: T) -> Result<T> {
        let a = self.u1.frac_norm(alpha)?;
        let b = self.u2.frac_norm(alpha)?;
        Ok((a * a + b * b).sqrt())
    }

    /// `∂x u2 − ∂y u1`.
    pub fn curl(&self) -> Result<SpectralField<T>> {
        self.u2.derivative_x().sub(&self.u1.derivative_y())
    }

    /// `∂x u1 + ∂y u2`.
    pub fn divergence(&self) -> Result<SpectralField<T>> {
        self.u1.derivative_x().add(&self.u2.derivative_y())
    }
}

impl<T: Real> SpectralField<T> {
    /// `‖A^α f‖`, with `A = −Δ` and `α >= 0`. At `α = 0` this is the `L²` norm.
    pub fn frac_norm(&self, alpha: T) -> Result<T> {
        if alpha.is_nan() || alpha < T::zero() {
            return Err(Error::invalid(format!("fractional exponent must be >= 0, got {alpha}")));
        }
        Ok(self.frac_norm_unchecked(alpha))
    }

    pub(crate) fn frac_norm_unchecked(&self, alpha: T) -> T {
        let p = alpha + alpha;
        let e = self.weighted_energy(|k1, k2| eigen_power(eigenvalue::<T>(k1, k2), p));
        (e * T::torus_area()).sqrt()
    }

    /// `‖A^s u‖` of the velocity `u = ∇⊥A^{-1}ω` carried by this vorticity,
    /// computed as `‖A^{s−1/2} ω‖` since `|û_k| = |ω̂_k|/|k|`.
    pub fn velocity_norm(&self, s: T) -> T {
        self.frac_norm_unchecked(s - T::lit(0.5))
    }

    /// `A^α f`; any real `α` is allowed since the zero mode is never stored.
    pub fn apply_a_power(&self, alpha: T) -> Self {
        self.map_real_multiplier(|k1, k2| eigen_power(eigenvalue::<T>(k1, k2), alpha))
    }

    /// `−Δ f`.
    pub fn laplacian_neg(&self) -> Self {
        self.map_real_multiplier(|k1, k2| eigenvalue::<T>(k1, k2))
    }

    pub fn derivative_x(&self) -> Self {
        self.map_imag_multiplier(|k1, _| T::from_i64_lossy(k1))
    }

    pub fn derivative_y(&self) -> Self {
        self.map_imag_multiplier(|_, k2| T::from_i64_lossy(k2))
    }

    /// Streamfunction `ψ` with `−Δψ = ω`.
    pub fn streamfunction(&self) -> Self {
        self.apply_a_power(-T::one())
    }

    /// `u = ∇⊥ψ = (∂y ψ, −∂x ψ)`, so that `curl u = ω` and `div u = 0`.
    pub fn velocity_from_vorticity(&self) -> Velocity<T> {
        let psi = self.streamfunction();
        Velocity {
            u1: psi.derivative_y(),
            u2: psi.derivative_x().scale(-T::one()),
        }
    }

    /// Zero every mode outside `cutoff`; the result stays on `self`'s grid.
    pub fn project(&self, cutoff: &WaveGrid) -> Result<Self> {
        self.check_cutoff(cutoff)?;
        let mut out = self.clone();
        let zero: Vec<usize> = self
            .grid()
            .half_plane()
            .filter(|&(_, k1, k2)| !cutoff.retains(k1, k2))
            .map(|(idx, _, _)| idx)
            .collect();
        out.zero_slots(&zero);
        Ok(out)
    }

    /// `f − project(f, cutoff)`.
    pub fn complement(&self, cutoff: &WaveGrid) -> Result<Self> {
        self.check_cutoff(cutoff)?;
        let mut out = self.clone();
        let zero: Vec<usize> = self
            .grid()
            .half_plane()
            .filter(|&(_, k1, k2)| cutoff.retains(k1, k2))
            .map(|(idx, _, _)| idx)
            .collect();
        out.zero_slots(&zero);
        Ok(out)
    }

    /// `‖A^α (f − P f)‖` summed directly over excluded modes.
    pub fn tail_norm(&self, cutoff: &WaveGrid, alpha: T) -> Result<T> {
        self.check_cutoff(cutoff)?;
        if alpha.is_nan() || alpha < T::zero() {
            return Err(Error::invalid(format!("fractional exponent must be >= 0, got {alpha}")));
        }
        let p = alpha + alpha;
        let e = self.weighted_energy(|k1, k2| {
            if cutoff.retains(k1, k2) {
                T::zero()
            } else {
                eigen_power(eigenvalue::<T>(k1, k2), p)
            }
        });
        Ok((e * T::torus_area()).sqrt())
    }

    fn check_cutoff(&self, cutoff: &WaveGrid) -> Result<()> {
        if !cutoff.is_subset_of(self.grid()) {
            return Err(Error::GridMismatch(format!(
                "cutoff {cutoff} is not contained in field grid {}; resample first",
                self.grid()
            )));
        }
        Ok(())
    }

    /// Move the field to `new_grid`: zero-pad modes that are new, drop modes
    /// that are no longer retained.
    pub fn resample(&self, new_grid: WaveGrid) -> Self {
        if new_grid == *self.grid() {
            return self.clone();
        }
        SpectralField::from_fn(new_grid, |k1, k2| self.coeff(k1, k2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use std::f64::consts::PI;

    fn sq(n: usize) -> WaveGrid {
        WaveGrid::square(n).unwrap()
    }

    #[test]
    fn cosine_norms() {
        let g = sq(16);
        let f = SpectralField::<f64>::cosine(g, 1, 0, 1.0).unwrap();
        for a in [0.0, 0.25, 1.0, 2.5] {
            assert!((f.frac_norm(a).unwrap() - PI * 2f64.sqrt()).abs() < 1e-13);
        }
        let f2 = SpectralField::<f64>::cosine(g, 2, 0, 1.0).unwrap();
        for a in [0.0, 0.5, 0.75] {
            let want = 4f64.powf(a) * PI * 2f64.sqrt();
            assert!((f2.frac_norm(a).unwrap() - want).abs() < 1e-12 * want);
        }
        assert!(f.frac_norm(-0.5).is_err());
    }

    #[test]
    fn stokes_powers_on_eigenmodes() {
        let g = sq(16);
        let c1 = SpectralField::<f64>::cosine(g, 1, 0, 1.0).unwrap();
        assert_eq!(c1.apply_a_power(1.0), c1);
        let c2 = SpectralField::<f64>::cosine(g, 0, 2, 1.0).unwrap();
        let four = SpectralField::<f64>::cosine(g, 0, 2, 4.0).unwrap();
        assert_eq!(c2.apply_a_power(1.0), four);
        let quarter = SpectralField::<f64>::cosine(g, 0, 2, 0.25).unwrap();
        assert_eq!(c2.apply_a_power(-1.0), quarter);
    }

    #[test]
    fn projector_examples() {
        let big = sq(64);
        let cut = sq(32);
        let f = SpectralField::<f64>::cosine(big, 20, 0, 1.0).unwrap();
        assert_eq!(f.project(&cut).unwrap().max_abs(), 0.0);
        assert_eq!(f.complement(&cut).unwrap(), f);
        let c = SpectralField::<f64>::cosine(big, 1, 0, 1.0).unwrap();
        assert_eq!(c.project(&sq(2)).unwrap(), c);
        assert_eq!(c.complement(&sq(2)).unwrap().max_abs(), 0.0);
        assert!(c.resample(cut).project(&big).is_err());
    }

    #[test]
    fn velocity_examples() {
        let g = sq(8);
        let w = SpectralField::<f64>::cosine(g, 0, 1, 1.0).unwrap();
        let u = w.velocity_from_vorticity();
        assert_eq!(u.u1, SpectralField::sine(g, 0, 1, -1.0).unwrap());
        assert_eq!(u.u2.max_abs(), 0.0);
        let w = SpectralField::<f64>::cosine(g, 1, 0, 1.0).unwrap();
        let u = w.velocity_from_vorticity();
        assert_eq!(u.u1.max_abs(), 0.0);
        assert_eq!(u.u2, SpectralField::sine(g, 1, 0, 1.0).unwrap());
    }

    #[test]
    fn velocity_norm_matches_components() {
        let g = sq(16);
        let w = SpectralField::<f64>::from_fn(g, |k1, k2| Complex::new(1.0 / (1 + k1 * k1 + k2 * k2) as f64, 0.3 / (2 + k2) as f64));
        let u = w.velocity_from_vorticity();
        for s in [0.0, 0.25, 0.5, 1.0] {
            let a = u.frac_norm(s).unwrap();
            assert!((a - w.velocity_norm(s)).abs() < 1e-13 * a);
        }
        assert!((w.velocity_norm(0.5) - w.frac_norm(0.0).unwrap()).abs() < 1e-14);
        assert!(u.divergence().unwrap().max_abs() < 1e-16);
        assert!(u.curl().unwrap().sub(&w).unwrap().max_abs() < 1e-16);
    }

    #[test]
    fn resample_roundtrip_on_cosine() {
        let c = SpectralField::<f64>::cosine(sq(32), 1, 0, 1.0).unwrap();
        let up = c.resample(sq(64));
        assert_eq!(up, SpectralField::cosine(sq(64), 1, 0, 1.0).unwrap());
        assert_eq!(up.resample(sq(32)), c);
    }

    #[test]
    fn resample_shrink_is_projection() {
        let g = sq(16);
        let f = SpectralField::<f64>::from_fn(g, |k1, k2| Complex::new(1.0 / (1 + k1.abs() + k2) as f64, 0.1));
        let small = f.resample(sq(8));
        let projected = f.project(&sq(8)).unwrap();
        assert_eq!(small.resample(g), projected);
    }
}
