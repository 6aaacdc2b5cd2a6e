//! Manufactured steady vorticity built from a `C¹` cubic bump.
//!
//! `ω(x, y) = S(x) S(y) (1 + cos(8x) cos(6y) / 4) − mean`, with
//! `S(z) = σ(φ(z))`, `σ(s) = 1 − 3s² + 2s³` and `φ` the even reflection map
//! `φ(z) = z/π` on `[0, π]`, `(2π − z)/π` on `[π, 2π]`.
//!
//! `S` has Fourier coefficients `Ŝ_0 = 1/2`, `Ŝ_k = 24/(πk)⁴` for odd `k`
//! and zero for even `k ≠ 0`, so the field's coefficients are known in
//! closed form and no sampling error enters the reference state.

use num_complex::Complex;

use crate::scalar::Real;
use crate::spectral::{SpectralField, WaveGrid};

/// `σ(s) = 1 − 3s² + 2s³`.
pub fn spline<T: Real>(s: T) -> T {
    T::one() - T::lit(3.0) * s * s + T::lit(2.0) * s * s * s
}

/// Even reflection of `[0, 2π]` onto `[0, 1]`, extended periodically.
pub fn reflection<T: Real>(z: T) -> T {
    let two_pi = T::TAU();
    let z = z - (z / two_pi).floor() * two_pi;
    if z <= T::PI() {
        z / T::PI()
    } else {
        (two_pi - z) / T::PI()
    }
}

/// `S(z) = σ(φ(z))`.
pub fn bump<T: Real>(z: T) -> T {
    spline(reflection(z))
}

/// Physical value of the manufactured vorticity, mean included.
pub fn vorticity_at<T: Real>(x: T, y: T) -> T {
    let modulation = T::one() + T::lit(0.25) * (T::lit(8.0) * x).cos() * (T::lit(6.0) * y).cos();
    bump(x) * bump(y) * modulation
}

/// Mean of [`vorticity_at`] over the torus.
pub const MEAN: f64 = 0.25;

/// Fourier coefficient of `S`.
pub fn bump_coefficient<T: Real>(k: i64) -> T {
    if k == 0 {
        T::lit(0.5)
    } else if k % 2 == 0 {
        T::zero()
    } else {
        let pk = T::PI() * T::from_i64_lossy(k);
        T::lit(24.0) / (pk * pk * pk * pk)
    }
}

/// Exact Fourier coefficient of the manufactured vorticity at `k ≠ 0`.
pub fn vorticity_coefficient<T: Real>(k1: i64, k2: i64) -> T {
    let s = bump_coefficient::<T>;
    let base = s(k1) * s(k2);
    // cos 8x cos 6y / 4 = Σ_{±,±} e^{i(±8x ± 6y)} / 16
    let shifted = (s(k1 - 8) + s(k1 + 8)) * (s(k2 - 6) + s(k2 + 6));
    base + shifted / T::lit(16.0)
}

/// Manufactured vorticity with the mean removed, restricted to `grid`.
pub fn manufactured_vorticity<T: Real>(grid: WaveGrid) -> SpectralField<T> {
    SpectralField::from_fn(grid, |k1, k2| Complex::new(vorticity_coefficient(k1, k2), T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn spline_endpoints() {
        assert_eq!(spline(0.0f64), 1.0);
        assert_eq!(spline(1.0f64), 0.0);
        // σ'(s) = −6s + 6s²
        let d = |s: f64| -6.0 * s + 6.0 * s * s;
        assert_eq!(d(0.0), 0.0);
        assert_eq!(d(1.0), 0.0);
    }

    #[test]
    fn reflection_map() {
        assert_eq!(reflection(0.0f64), 0.0);
        assert!((reflection(PI) - 1.0f64).abs() < 1e-15);
        assert!((reflection(1.5 * PI) - 0.5f64).abs() < 1e-15);
        assert!((reflection(2.0 * PI + 0.5) - reflection(0.5f64)).abs() < 1e-12);
    }

    #[test]
    fn vorticity_vanishes_at_centre() {
        assert!(vorticity_at(PI, PI).abs() < 1e-15);
        assert!((vorticity_at(0.0f64, 0.0) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn bump_coefficients_match_quadrature() {
        // Midpoint quadrature of S(x) e^{−ikx} / 2π on a fine grid.
        let m = 20_000;
        for k in 0..6i64 {
            let mut acc = 0.0;
            for j in 0..m {
                let x = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                acc += bump(x) * (k as f64 * x).cos();
            }
            acc /= m as f64;
            assert!((acc - bump_coefficient::<f64>(k)).abs() < 1e-9, "k = {k}");
        }
    }

    #[test]
    fn coefficients_synthesize_the_field() {
        let g = WaveGrid::square(128).unwrap();
        let w = manufactured_vorticity::<f64>(g);
        for (x, y) in [(0.3, 1.9), (2.0, 4.4), (PI, PI)] {
            let direct = vorticity_at(x, y) - MEAN;
            assert!((w.eval(x, y) - direct).abs() < 1e-6, "at ({x}, {y})");
        }
    }
}
