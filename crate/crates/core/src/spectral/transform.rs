//! Square 2D FFTs between half-plane spectral storage and physical samples.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::field::SpectralField;
use super::grid::WaveGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Complex-to-complex FFT pair on an `m × m` collocation grid.
///
/// Physical samples are stored row-major as `data[i1 * m + i2]` at
/// `(x, y) = (2π i1 / m, 2π i2 / m)`. The inverse transform evaluates
/// `Σ c_k e^{i k·x}` exactly; the forward transform divides by `m²`.
pub struct Transform2d<T: Real> {
    size: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Clone for Transform2d<T> {
    fn clone(&self) -> Self {
        Self {
            size: self.size,
            forward: Arc::clone(&self.forward),
            inverse: Arc::clone(&self.inverse),
        }
    }
}

impl<T: Real> std::fmt::Debug for Transform2d<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform2d").field("size", &self.size).finish()
    }
}

impl<T: Real> Transform2d<T> {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidGrid(format!("transform size must be >= 2, got {size}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    /// Largest half-width whose modes are represented without aliasing.
    #[inline]
    pub fn max_half_width(&self) -> usize {
        (self.size - 1) / 2
    }

    fn check_fits(&self, grid: &WaveGrid) -> Result<()> {
        if grid.half_width() > self.max_half_width() {
            return Err(Error::GridMismatch(format!(
                "{grid} does not fit a {0}x{0} transform",
                self.size
            )));
        }
        Ok(())
    }

    #[inline]
    fn wrap(&self, k: i64) -> usize {
        k.rem_euclid(self.size as i64) as usize
    }

    fn fft2(&self, data: &mut [Complex<T>], inverse: bool) {
        let plan = if inverse { &self.inverse } else { &self.forward };
        let m = self.size;
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        transpose_square(data, m);
        plan.process_with_scratch(data, &mut scratch);
        transpose_square(data, m);
    }

    /// Scatter `a + i b` into a full complex spectrum.
    fn scatter(&self, a: &SpectralField<T>, b: Option<&SpectralField<T>>) -> Vec<Complex<T>> {
        let m = self.size;
        let zero = Complex::new(T::zero(), T::zero());
        let mut spec = vec![zero; m * m];
        let i = Complex::new(T::zero(), T::one());
        for (idx, k1, k2) in a.grid().half_plane() {
            let ca = a.storage()[idx];
            let cb = b.map_or(zero, |b| b.storage()[idx]);
            spec[self.wrap(k1) * m + self.wrap(k2)] = ca + i * cb;
            if k2 > 0 {
                spec[self.wrap(-k1) * m + self.wrap(-k2)] = ca.conj() + i * cb.conj();
            }
        }
        spec
    }

    /// Complex samples of the inverse transform; the imaginary part is
    /// round-off for Hermitian input.
    pub fn inverse_complex(&self, f: &SpectralField<T>) -> Result<Vec<Complex<T>>> {
        self.check_fits(f.grid())?;
        let mut data = self.scatter(f, None);
        self.fft2(&mut data, true);
        Ok(data)
    }

    /// Real physical samples of `f`.
    pub fn to_physical(&self, f: &SpectralField<T>) -> Result<Vec<T>> {
        Ok(self.inverse_complex(f)?.into_iter().map(|c| c.re).collect())
    }

    /// Physical samples of two fields with a single complex transform.
    pub fn to_physical_pair(&self, a: &SpectralField<T>, b: &SpectralField<T>) -> Result<(Vec<T>, Vec<T>)> {
        if a.grid() != b.grid() {
            return Err(Error::GridMismatch(format!("{} vs {}", a.grid(), b.grid())));
        }
        self.check_fits(a.grid())?;
        let mut data = self.scatter(a, Some(b));
        self.fft2(&mut data, true);
        Ok(data.into_iter().map(|c| (c.re, c.im)).unzip())
    }

    fn check_samples(&self, len: usize) -> Result<()> {
        if len != self.size * self.size {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {len}",
                self.size * self.size
            )));
        }
        Ok(())
    }

    /// Fourier coefficients of real samples, restricted to `grid`.
    ///
    /// The mean is discarded; `grid` may be wider than the transform only if
    /// the caller accepts aliased coefficients, so that case is rejected.
    pub fn from_physical(&self, samples: &[T], grid: WaveGrid) -> Result<SpectralField<T>> {
        self.check_samples(samples.len())?;
        self.check_fits(&grid)?;
        let mut data: Vec<Complex<T>> = samples.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.fft2(&mut data, false);
        let m = self.size;
        let norm = T::from_usize_lossy(m * m).recip();
        Ok(SpectralField::from_fn(grid, |k1, k2| data[self.wrap(k1) * m + self.wrap(k2)] * norm))
    }

    /// Fourier coefficients of two real sample arrays with one transform.
    pub fn from_physical_pair(
        &self,
        a: &[T],
        b: &[T],
        grid: WaveGrid,
    ) -> Result<(SpectralField<T>, SpectralField<T>)> {
        self.check_samples(a.len())?;
        self.check_samples(b.len())?;
        self.check_fits(&grid)?;
        let mut data: Vec<Complex<T>> = a.iter().zip(b).map(|(&x, &y)| Complex::new(x, y)).collect();
        self.fft2(&mut data, false);
        let m = self.size;
        let half = T::lit(0.5) / T::from_usize_lossy(m * m);
        let at = |k1: i64, k2: i64| data[self.wrap(k1) * m + self.wrap(k2)];
        let fa = SpectralField::from_fn(grid, |k1, k2| (at(k1, k2) + at(-k1, -k2).conj()) * half);
        let fb = SpectralField::from_fn(grid, |k1, k2| {
            let d = (at(k1, k2) - at(-k1, -k2).conj()) * half;
            // divide by i
            Complex::new(d.im, -d.re)
        });
        Ok((fa, fb))
    }
}

fn transpose_square<T: Copy>(data: &mut [T], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            data.swap(i * m + j, j * m + i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn inverse_matches_direct_evaluation() {
        let g = WaveGrid::square(6).unwrap();
        let f = SpectralField::<f64>::from_fn(g, |k1, k2| Complex::new(0.1 * k1 as f64, 0.05 * (k2 - 1) as f64));
        let t = Transform2d::new(10).unwrap();
        let phys = t.to_physical(&f).unwrap();
        for i1 in 0..10 {
            for i2 in 0..10 {
                let (x, y) = (TAU * i1 as f64 / 10.0, TAU * i2 as f64 / 10.0);
                assert!((phys[i1 * 10 + i2] - f.eval(x, y)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn roundtrip_and_pairs() {
        let g = WaveGrid::square(8).unwrap();
        let a = SpectralField::<f64>::from_fn(g, |k1, k2| Complex::new((k1 + 2 * k2) as f64, 1.0));
        let b = SpectralField::<f64>::from_fn(g, |k1, k2| Complex::new(0.5, (k1 - k2) as f64));
        let t = Transform2d::new(12).unwrap();
        let (pa, pb) = t.to_physical_pair(&a, &b).unwrap();
        assert_eq!(pa.len(), 144);
        let back = t.from_physical(&pa, g).unwrap();
        assert!(back.sub(&a).unwrap().max_abs() < 1e-12);
        let (ra, rb) = t.from_physical_pair(&pa, &pb, g).unwrap();
        assert!(ra.sub(&a).unwrap().max_abs() < 1e-12);
        assert!(rb.sub(&b).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn too_small_transform_rejected() {
        let g = WaveGrid::square(8).unwrap();
        let t = Transform2d::<f64>::new(8).unwrap();
        assert!(t.to_physical(&SpectralField::zeros(g)).is_err());
    }
}
