//! Fourier coefficients of real, zero-mean scalar fields on the torus.

use num_complex::Complex;

use super::grid::WaveGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Complex Fourier coefficients `f(x) = Σ_k c_k e^{i k·x}` of a real field.
///
/// Only the half plane `k2 >= 0` is stored (see [`WaveGrid::index`]); the
/// `k2 = 0` row stores both signs of `k1` and is kept Hermitian,
/// `c(-k1, 0) = conj(c(k1, 0))`. Slots outside the retained set, including
/// the zero mode, hold exact zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T: Real> {
    grid: WaveGrid,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(grid: WaveGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex::new(T::zero(), T::zero()); grid.storage_len()],
        }
    }

    /// Build from a coefficient function evaluated on the half plane.
    ///
    /// `f(k1, k2)` is only called for retained modes with `k2 >= 0`; the
    /// `k2 = 0` row is symmetrised afterwards from its `k1 > 0` half.
    pub fn from_fn(grid: WaveGrid, mut f: impl FnMut(i64, i64) -> Complex<T>) -> Self {
        let mut out = Self::zeros(grid);
        for (idx, k1, k2) in grid.half_plane() {
            if k2 > 0 || k1 > 0 {
                out.coeffs[idx] = f(k1, k2);
            }
        }
        out.fill_conjugate_row();
        out
    }

    /// Wrap raw half-plane storage. The `k2 = 0` row is re-symmetrised from
    /// its `k1 > 0` half and non-retained slots are zeroed.
    pub fn from_storage(grid: WaveGrid, mut coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != grid.storage_len() {
            return Err(Error::GridMismatch(format!(
                "expected {} coefficients for {grid}, got {}",
                grid.storage_len(),
                coeffs.len()
            )));
        }
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let (k1, k2) = grid.wavevector(idx);
            if !grid.retains(k1, k2) {
                *c = Complex::new(T::zero(), T::zero());
            }
        }
        let mut out = Self { grid, coeffs };
        out.fill_conjugate_row();
        Ok(out)
    }

    fn fill_conjugate_row(&mut self) {
        let h = self.grid.half_width() as i64;
        for k1 in 1..=h {
            let c = self.coeffs[self.grid.index(k1, 0)];
            let j = self.grid.index(-k1, 0);
            self.coeffs[j] = c.conj();
        }
    }

    pub(crate) fn zero_slots(&mut self, slots: &[usize]) {
        for &i in slots {
            self.coeffs[i] = Complex::new(T::zero(), T::zero());
        }
    }

    #[inline]
    pub fn grid(&self) -> &WaveGrid {
        &self.grid
    }

    /// Raw half-plane storage.
    #[inline]
    pub fn storage(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Coefficient of `e^{i k·x}` for any `k`; zero outside the retained set.
    pub fn coeff(&self, k1: i64, k2: i64) -> Complex<T> {
        if !self.grid.retains(k1, k2) {
            return Complex::new(T::zero(), T::zero());
        }
        if k2 >= 0 {
            self.coeffs[self.grid.index(k1, k2)]
        } else {
            self.coeffs[self.grid.index(-k1, -k2)].conj()
        }
    }

    /// Copy with the pair `±k` set to `c` and `conj(c)`.
    pub fn with_mode(mut self, k1: i64, k2: i64, c: Complex<T>) -> Result<Self> {
        if !self.grid.retains(k1, k2) {
            return Err(Error::invalid(format!("mode ({k1}, {k2}) not retained by {}", self.grid)));
        }
        let (k1, k2, c) = if k2 < 0 || (k2 == 0 && k1 < 0) {
            (-k1, -k2, c.conj())
        } else {
            (k1, k2, c)
        };
        let idx = self.grid.index(k1, k2);
        self.coeffs[idx] = c;
        if k2 == 0 {
            let j = self.grid.index(-k1, 0);
            self.coeffs[j] = c.conj();
        }
        Ok(self)
    }

    /// `cos(k·x)` scaled by `amplitude`.
    pub fn cosine(grid: WaveGrid, k1: i64, k2: i64, amplitude: T) -> Result<Self> {
        let half = amplitude / T::lit(2.0);
        Self::zeros(grid).with_mode(k1, k2, Complex::new(half, T::zero()))
    }

    /// `sin(k·x)` scaled by `amplitude`.
    pub fn sine(grid: WaveGrid, k1: i64, k2: i64, amplitude: T) -> Result<Self> {
        // sin θ = (e^{iθ} - e^{-iθ}) / 2i, so c_k = -i a / 2.
        let half = amplitude / T::lit(2.0);
        Self::zeros(grid).with_mode(k1, k2, Complex::new(T::zero(), -half))
    }

    /// Apply a real multiplier `m(k1, k2)` to every retained coefficient.
    ///
    /// The multiplier must be even in `k` to preserve Hermitian symmetry.
    pub fn map_real_multiplier(&self, mut m: impl FnMut(i64, i64) -> T) -> Self {
        let mut out = self.clone();
        for (idx, k1, k2) in self.grid.half_plane() {
            out.coeffs[idx] = out.coeffs[idx] * m(k1, k2);
        }
        out
    }

    /// Apply a purely imaginary multiplier `i·m(k)` with `m` odd in `k`,
    /// e.g. a derivative.
    pub fn map_imag_multiplier(&self, mut m: impl FnMut(i64, i64) -> T) -> Self {
        let mut out = self.clone();
        for (idx, k1, k2) in self.grid.half_plane() {
            let c = out.coeffs[idx];
            let s = m(k1, k2);
            out.coeffs[idx] = Complex::new(-c.im * s, c.re * s);
        }
        out
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{} vs {}", self.grid, other.grid)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid, coeffs })
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: T, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b * s).collect();
        Ok(Self { grid: self.grid, coeffs })
    }

    /// In-place `self += s * other`.
    pub fn axpy_mut(&mut self, s: T, other: &Self) -> Result<()> {
        self.check_same_grid(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = *a + b * s;
        }
        Ok(())
    }

    /// Weighted sum over the full plane: `Σ_k w(k) |c_k|²`.
    pub fn weighted_energy(&self, mut w: impl FnMut(i64, i64) -> T) -> T {
        let mut acc = T::zero();
        for (idx, k1, k2) in self.grid.half_plane() {
            let mult = if k2 == 0 { T::one() } else { T::lit(2.0) };
            acc = acc + mult * w(k1, k2) * self.coeffs[idx].norm_sqr();
        }
        acc
    }

    /// Real `L²([0,2π]²)` inner product.
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.check_same_grid(other)?;
        let mut acc = T::zero();
        for (idx, _, k2) in self.grid.half_plane() {
            let mult = if k2 == 0 { T::one() } else { T::lit(2.0) };
            let a = self.coeffs[idx];
            let b = other.coeffs[idx];
            acc = acc + mult * (a.re * b.re + a.im * b.im);
        }
        Ok(acc * T::torus_area())
    }

    /// `L²` norm of the field.
    pub fn l2_norm(&self) -> T {
        (self.weighted_energy(|_, _| T::one()) * T::torus_area()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest `|c(-k) - conj(c(k))|` on the `k2 = 0` row.
    pub fn hermitian_defect(&self) -> T {
        let h = self.grid.half_width() as i64;
        (1..=h)
            .map(|k1| {
                let a = self.coeffs[self.grid.index(k1, 0)];
                let b = self.coeffs[self.grid.index(-k1, 0)];
                (a - b.conj()).norm()
            })
            .fold(T::zero(), T::max)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    /// Convert the scalar type.
    pub fn cast<U: Real>(&self) -> SpectralField<U> {
        SpectralField {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Complex::new(U::lit(c.re.to_f64_lossy()), U::lit(c.im.to_f64_lossy())))
                .collect(),
        }
    }

    /// Evaluate the field at a physical point by direct summation.
    pub fn eval(&self, x: T, y: T) -> T {
        let mut acc = T::zero();
        for (idx, k1, k2) in self.grid.half_plane() {
            let mult = if k2 == 0 { T::one() } else { T::lit(2.0) };
            let phase = T::from_i64_lossy(k1) * x + T::from_i64_lossy(k2) * y;
            let c = self.coeffs[idx];
            acc = acc + mult * (c.re * phase.cos() - c.im * phase.sin());
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_has_expected_coefficients() {
        let g = WaveGrid::square(8).unwrap();
        let f = SpectralField::<f64>::cosine(g, 1, 0, 1.0).unwrap();
        assert_eq!(f.coeff(1, 0), Complex::new(0.5, 0.0));
        assert_eq!(f.coeff(-1, 0), Complex::new(0.5, 0.0));
        assert_eq!(f.coeff(0, 1), Complex::new(0.0, 0.0));
        assert!((f.eval(0.3, 1.1) - 0.3f64.cos()).abs() < 1e-14);
    }

    #[test]
    fn sine_evaluates() {
        let g = WaveGrid::square(8).unwrap();
        let f = SpectralField::<f64>::sine(g, 2, -1, 3.0).unwrap();
        let (x, y) = (0.7, 2.3);
        assert!((f.eval(x, y) - 3.0 * (2.0 * x - y).sin()).abs() < 1e-13);
    }

    #[test]
    fn from_fn_keeps_hermitian_row() {
        let g = WaveGrid::square(6).unwrap();
        let f = SpectralField::<f64>::from_fn(g, |k1, k2| Complex::new(k1 as f64, (k2 + 1) as f64));
        assert_eq!(f.hermitian_defect(), 0.0);
        assert_eq!(f.coeff(-2, 0), f.coeff(2, 0).conj());
        assert_eq!(f.coeff(-2, -3), f.coeff(2, 3).conj());
    }

    #[test]
    fn unretained_mode_rejected() {
        let g = WaveGrid::square(8).unwrap();
        assert!(SpectralField::<f64>::cosine(g, 5, 0, 1.0).is_err());
        assert!(SpectralField::<f64>::cosine(g, 0, 0, 1.0).is_err());
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let a = SpectralField::<f64>::zeros(WaveGrid::square(8).unwrap());
        let b = SpectralField::<f64>::zeros(WaveGrid::square(10).unwrap());
        assert!(a.add(&b).is_err());
        assert!(a.inner(&b).is_err());
    }
}
