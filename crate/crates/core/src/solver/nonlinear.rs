//! Pseudo-spectral transport term `u·∇ω` with `u = ∇⊥(−Δ)^{-1} ω`.

use crate::error::Result;
use crate::scalar::Real;
use crate::spectral::{fft_friendly_size, SpectralField, Transform2d, WaveGrid};

use super::config::{Dealias, NonlinearMode};

/// Physical samples of `u(ω)` and `∇ω`, reusable across many products.
#[derive(Debug, Clone)]
pub struct Sampled<T: Real> {
    u1: Vec<T>,
    u2: Vec<T>,
    dx: Vec<T>,
    dy: Vec<T>,
}

/// Transport products on one truncation grid.
#[derive(Debug, Clone)]
pub struct Advection<T: Real> {
    grid: WaveGrid,
    output: WaveGrid,
    transform: Transform2d<T>,
}

impl<T: Real> Advection<T> {
    /// Galerkin-projected products `P_n(u(a)·∇b)` on `grid`.
    pub fn new(grid: WaveGrid, dealias: Dealias) -> Result<Self> {
        let h = grid.half_width();
        let size = match dealias {
            // Modes up to 2h appear in the product; a grid of 3h+1 points keeps
            // every alias outside |k_i| <= h.
            Dealias::TwoThirds => fft_friendly_size(3 * h + 1),
            Dealias::None => 2 * h + 1,
        };
        Ok(Self {
            grid,
            output: grid,
            transform: Transform2d::new(size)?,
        })
    }

    /// Unprojected products, returned on the square grid of twice the
    /// resolution where they are exact.
    pub fn unprojected(grid: WaveGrid) -> Result<Self> {
        let h = grid.half_width();
        Ok(Self {
            grid,
            output: WaveGrid::square(4 * h)?,
            transform: Transform2d::new(fft_friendly_size(4 * h + 1))?,
        })
    }

    pub fn for_mode(grid: WaveGrid, dealias: Dealias, mode: NonlinearMode) -> Result<Self> {
        match mode {
            NonlinearMode::Projected => Self::new(grid, dealias),
            NonlinearMode::Raw => Self::unprojected(grid),
        }
    }

    #[inline]
    pub fn grid(&self) -> &WaveGrid {
        &self.grid
    }

    #[inline]
    pub fn output_grid(&self) -> &WaveGrid {
        &self.output
    }

    #[inline]
    pub fn transform_size(&self) -> usize {
        self.transform.size()
    }

    pub fn sample(&self, omega: &SpectralField<T>) -> Result<Sampled<T>> {
        let omega = self.on_grid(omega);
        let u = omega.velocity_from_vorticity();
        let (u1, u2) = self.transform.to_physical_pair(&u.u1, &u.u2)?;
        let (dx, dy) = self.transform.to_physical_pair(&omega.derivative_x(), &omega.derivative_y())?;
        Ok(Sampled { u1, u2, dx, dy })
    }

    fn on_grid(&self, f: &SpectralField<T>) -> SpectralField<T> {
        if f.grid() == &self.grid {
            f.clone()
        } else {
            f.resample(self.grid)
        }
    }

    fn finish(&self, product: &[T]) -> Result<SpectralField<T>> {
        self.transform.from_physical(product, self.output)
    }

    /// `u(ω)·∇ω`.
    pub fn term(&self, omega: &SpectralField<T>) -> Result<SpectralField<T>> {
        let s = self.sample(omega)?;
        let p: Vec<T> = (0..s.u1.len()).map(|i| s.u1[i] * s.dx[i] + s.u2[i] * s.dy[i]).collect();
        self.finish(&p)
    }

    /// `u(a)·∇b`.
    pub fn bilinear(&self, a: &SpectralField<T>, b: &SpectralField<T>) -> Result<SpectralField<T>> {
        let sa = self.sample(a)?;
        let sb = self.sample(b)?;
        let p: Vec<T> = (0..sa.u1.len()).map(|i| sa.u1[i] * sb.dx[i] + sa.u2[i] * sb.dy[i]).collect();
        self.finish(&p)
    }

    /// Derivative of the transport term at the sampled state `ω` in
    /// direction `v`: `u(ω)·∇v + u(v)·∇ω`.
    pub fn linearized(&self, at: &Sampled<T>, v: &SpectralField<T>) -> Result<SpectralField<T>> {
        let sv = self.sample(v)?;
        let p: Vec<T> = (0..at.u1.len())
            .map(|i| at.u1[i] * sv.dx[i] + at.u2[i] * sv.dy[i] + sv.u1[i] * at.dx[i] + sv.u2[i] * at.dy[i])
            .collect();
        self.finish(&p)
    }
}

/// One-shot `u·∇ω` on `ω`'s own grid.
pub fn nonlinear_term<T: Real>(
    omega: &SpectralField<T>,
    dealias: Dealias,
    mode: NonlinearMode,
) -> Result<SpectralField<T>> {
    Advection::for_mode(*omega.grid(), dealias, mode)?.term(omega)
}

/// `ν A ω + u·∇ω`: the force for which `ω` is an exact steady state, up to
/// the truncation of the product to `ω`'s grid.
pub fn compute_forcing<T: Real>(omega: &SpectralField<T>, nu: T, dealias: Dealias) -> Result<SpectralField<T>> {
    let n = nonlinear_term(omega, dealias, NonlinearMode::Projected)?;
    omega.laplacian_neg().scale(nu).add(&n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn sq(n: usize) -> WaveGrid {
        WaveGrid::square(n).unwrap()
    }

    #[test]
    fn single_modes_do_not_self_advect() {
        let g = sq(16);
        let c = SpectralField::<f64>::cosine(g, 0, 1, 1.0).unwrap();
        let n = nonlinear_term(&c, Dealias::TwoThirds, NonlinearMode::Projected).unwrap();
        assert!(n.max_abs() < 1e-15);
        let tg = SpectralField::cosine(g, 1, 0, 1.0).unwrap().add(&c).unwrap();
        let n = nonlinear_term(&tg, Dealias::TwoThirds, NonlinearMode::Projected).unwrap();
        assert!(n.max_abs() < 1e-15);
    }

    #[test]
    fn two_mode_product_matches_hand_derivation() {
        // ω = cos x + cos 2y: ψ = cos x + cos(2y)/4, u = (−sin(2y)/2, sin x),
        // u·∇ω = (−sin 2y/2)(−sin x) + sin x (−2 sin 2y) = −(3/2) sin x sin 2y.
        let g = sq(16);
        let w = SpectralField::<f64>::cosine(g, 1, 0, 1.0)
            .unwrap()
            .add(&SpectralField::cosine(g, 0, 2, 1.0).unwrap())
            .unwrap();
        let n = nonlinear_term(&w, Dealias::TwoThirds, NonlinearMode::Projected).unwrap();
        // sin x sin 2y = (cos(x−2y) − cos(x+2y))/2
        let want = SpectralField::cosine(g, 1, -2, -0.75)
            .unwrap()
            .add(&SpectralField::cosine(g, 1, 2, 0.75).unwrap())
            .unwrap();
        assert!(n.sub(&want).unwrap().max_abs() < 1e-15);
        let raw = nonlinear_term(&w, Dealias::TwoThirds, NonlinearMode::Raw).unwrap();
        assert_eq!(raw.grid().resolution(), 32);
        assert!(raw.sub(&want.resample(sq(32))).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn forcing_of_cosine_is_viscous() {
        let g = sq(8);
        let c = SpectralField::<f64>::cosine(g, 1, 0, 1.0).unwrap();
        let f = compute_forcing(&c, 0.01, Dealias::TwoThirds).unwrap();
        assert!(f.sub(&c.scale(0.01)).unwrap().max_abs() < 1e-17);
        let z = SpectralField::<f64>::zeros(g);
        assert_eq!(compute_forcing(&z, 0.01, Dealias::TwoThirds).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn linearization_is_symmetric_part_of_bilinear() {
        let g = sq(12);
        let a = SpectralField::<f64>::from_fn(g, |k1, k2| Complex::new(1.0 / (1 + k1 * k1 + k2 * k2) as f64, 0.2 / (1 + k2) as f64));
        let b = SpectralField::<f64>::from_fn(g, |k1, k2| Complex::new(0.3 / (1 + k1.abs() + k2) as f64, 0.0));
        let adv = Advection::new(g, Dealias::TwoThirds).unwrap();
        let s = adv.sample(&a).unwrap();
        let lin = adv.linearized(&s, &b).unwrap();
        let want = adv.bilinear(&a, &b).unwrap().add(&adv.bilinear(&b, &a).unwrap()).unwrap();
        assert!(lin.sub(&want).unwrap().max_abs() < 1e-15);
    }
}
