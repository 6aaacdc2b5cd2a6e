//! Fractional space-time norms of sampled trajectories and expansions of
//! transient ladders.
//!
//! The time transform uses cycles per unit time, `f̂(τ) = ∫ f(t) e^{−2πiτt} dt`,
//! of the trajectory extended by zero outside `[0, T]`.

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{extract, ExpansionOptions, ExpansionReport, ScaleVector};
use crate::scalar::Real;
use crate::spectral::SpectralField;
use crate::trajectory::Trajectory;

/// Summation rule for the `|τ|^{2γ}`-weighted frequency integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TauQuadrature {
    /// Plain Riemann sum over the padded DFT frequencies.
    Riemann,
    /// Riemann sum minus the leading cusp and endpoint error terms.
    #[default]
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HGammaParams {
    /// Time-regularity exponent, in `[0, 1]`.
    pub gamma: f64,
    /// `X = D(A^{alpha_x})`; `Y` is `L²`.
    pub alpha_x: f64,
    /// Window length of the zero extension in units of `T`.
    pub pad: usize,
    pub quadrature: TauQuadrature,
}

impl Default for HGammaParams {
    fn default() -> Self {
        Self {
            gamma: 0.2,
            alpha_x: 0.25,
            pad: 4,
            quadrature: TauQuadrature::Corrected,
        }
    }
}

impl HGammaParams {
    pub fn new(gamma: f64, alpha_x: f64) -> Self {
        Self {
            gamma,
            alpha_x,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        if !(self.alpha_x >= 0.0) || !self.alpha_x.is_finite() {
            return Err(Error::invalid(format!("alpha_x must be >= 0, got {}", self.alpha_x)));
        }
        if self.pad < 2 {
            return Err(Error::invalid(format!("pad factor must be >= 2, got {}", self.pad)));
        }
        Ok(())
    }
}

#[inline]
fn trapezoid_weight(j: usize, last: usize) -> f64 {
    if j == 0 || j == last {
        0.5
    } else {
        1.0
    }
}

/// `‖f‖_{L²(0,T;D(A^s))}` by the trapezoid rule.
pub fn l2_time_norm<T: Real>(traj: &Trajectory<T>, s: T) -> T {
    let last = traj.len() - 1;
    if last == 0 {
        return T::zero();
    }
    let acc: T = traj
        .samples()
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let n = f.frac_norm_unchecked(s);
            T::lit(trapezoid_weight(j, last)) * n * n
        })
        .sum();
    (acc * traj.sample_interval()).sqrt()
}

/// Trapezoid-weighted DFT of `values` zero-extended to `pad·(M)` points:
/// entry `m` approximates `f̂(m/(pad·T))`, indices above half are negative
/// frequencies.
pub fn zero_extended_transform<T: Real>(values: &[T], sample_interval: T, pad: usize) -> Result<Vec<Complex<T>>> {
    if values.len() < 2 || pad < 1 {
        return Err(Error::invalid("transform needs at least two samples and pad >= 1"));
    }
    let last = values.len() - 1;
    let len = pad * last;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); len.max(values.len())];
    for (j, &v) in values.iter().enumerate() {
        let w = T::lit(trapezoid_weight(j, last)) * sample_interval;
        buf[j % len] = buf[j % len] + Complex::new(v * w, T::zero());
    }
    buf.truncate(len);
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    Ok(buf)
}

/// Riemann zeta for real `s != 1`.
///
/// Euler–Maclaurin summation for `s > 1/2`; the functional equation
/// otherwise.
pub fn zeta(s: f64) -> f64 {
    if s == 0.0 {
        return -0.5;
    }
    if s < 0.5 {
        if s == s.floor() && (s as i64) % 2 == 0 {
            return 0.0;
        }
        let r = 1.0 - s;
        return 2f64.powf(s)
            * std::f64::consts::PI.powf(s - 1.0)
            * (std::f64::consts::FRAC_PI_2 * s).sin()
            * statrs::function::gamma::gamma(r)
            * zeta(r);
    }
    const N: usize = 12;
    const BERNOULLI: [f64; 6] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let nf = N as f64;
    let mut acc: f64 = (1..N).map(|n| (n as f64).powf(-s)).sum();
    acc += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // Rising product s(s+1)…(s+2j−2) over (2j)!.
    let mut rising = s;
    let mut fact = 2.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let p = 2 * j + 1;
        acc += b / fact * rising * nf.powf(-s - p as f64);
        rising *= (s + p as f64) * (s + p as f64 + 1.0);
        fact *= ((p + 2) * (p + 3)) as f64;
    }
    acc
}

/// Coefficient `c(γ)` of the leading endpoint error `c(γ)·Δs^{1−2γ}·(‖f(0)‖² + ‖f(T)‖²)`
/// in the weighted sum of a trapezoid DFT with jumps at the window ends,
/// for `γ < 1/2`.
///
/// `c(γ) = ¼∫_{|u|≤½} |u|^{2γ}(cot²πu − 1/(πu)²) du − 2^{2−2γ}/((1−2γ)·4π²)`;
/// the bracket is expanded in `ζ(2k) u^{2k−2}` and integrated termwise.
pub fn endpoint_coefficient(gamma: f64) -> f64 {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let e = 2.0 * gamma;
    let mut integral = -(0.5f64).powf(e + 1.0) / (e + 1.0);
    for k in 1..=60 {
        let p = (2 * k - 1) as f64;
        let term = 2.0 / pi2 * p * zeta(2.0 * k as f64) * (0.5f64).powf(e + p) / (e + p);
        integral += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    0.5 * integral - 2.0 * (0.5f64).powf(e - 1.0) / ((1.0 - e) * 4.0 * pi2)
}

/// The space-time norm `(‖f‖²_{L²(0,T;X)} + ∫ |τ|^{2γ} ‖f̂(τ)‖²_{L²} dτ)^{1/2}`.
pub fn hgamma_norm<T: Real>(traj: &Trajectory<T>, params: &HGammaParams) -> Result<T> {
    params.validate()?;
    if traj.len() < 4 {
        return Err(Error::invalid(format!("need at least 4 samples, got {}", traj.len())));
    }
    let weighted = weighted_frequency_integral(traj, params)?;
    let base = l2_time_norm(traj, T::lit(params.alpha_x));
    Ok((base * base + T::lit(weighted.max(0.0))).sqrt())
}

/// `∫ |τ|^{2γ} ‖f̂(τ)‖² dτ` alone.
pub fn weighted_frequency_integral<T: Real>(traj: &Trajectory<T>, params: &HGammaParams) -> Result<f64> {
    params.validate()?;
    let last = traj.len() - 1;
    let len = params.pad * last;
    let dt = traj.sample_interval().to_f64_lossy();
    let dtau = 1.0 / (len as f64 * dt);
    let e = 2.0 * params.gamma;
    let weights: Vec<f64> = (0..len)
        .map(|i| {
            let m = i.min(len - i) as f64;
            if m == 0.0 {
                0.0
            } else {
                (m * dtau).powf(e)
            }
        })
        .collect();
    let fft = FftPlanner::<T>::new().plan_fft_forward(len);
    let grid = *traj.grid();
    let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
    let mut sum = 0.0;
    for (idx, _, k2) in grid.half_plane() {
        buf.iter_mut().for_each(|c| *c = Complex::new(T::zero(), T::zero()));
        for (j, f) in traj.samples().iter().enumerate() {
            let w = T::lit(trapezoid_weight(j, last)) * traj.sample_interval();
            buf[j % len] = buf[j % len] + f.storage()[idx] * w;
        }
        fft.process(&mut buf);
        let mult = if k2 == 0 { 1.0 } else { 2.0 };
        let s: f64 = buf.iter().zip(&weights).map(|(c, w)| w * c.norm_sqr().to_f64_lossy()).sum();
        sum += mult * s;
    }
    let area = T::torus_area().to_f64_lossy();
    let mut total = sum * area * dtau;
    if params.quadrature == TauQuadrature::Corrected {
        total -= cusp_correction(traj, params.gamma, dtau)?;
        if params.gamma < 0.5 {
            let ends = {
                let a = traj.samples()[0].l2_norm().to_f64_lossy();
                let b = traj.samples()[last].l2_norm().to_f64_lossy();
                a * a + b * b
            };
            total -= endpoint_coefficient(params.gamma) * dt.powf(1.0 - e) * ends;
        }
    }
    Ok(total)
}

/// Leading generalized Euler–Maclaurin terms of the `|τ|^{2γ}` cusp:
/// `2ζ(−2γ)Δτ^{1+2γ}φ(0) + ζ(−2γ−2)Δτ^{3+2γ}φ''(0)` with `φ = ‖f̂‖²`.
fn cusp_correction<T: Real>(traj: &Trajectory<T>, gamma: f64, dtau: f64) -> Result<f64> {
    let last = traj.len() - 1;
    let dt = traj.sample_interval();
    let mut moments = [
        SpectralField::zeros(*traj.grid()),
        SpectralField::zeros(*traj.grid()),
        SpectralField::zeros(*traj.grid()),
    ];
    for (j, f) in traj.samples().iter().enumerate() {
        let t = T::from_usize_lossy(j) * dt;
        let w = T::lit(trapezoid_weight(j, last)) * dt;
        moments[0].axpy_mut(w, f)?;
        moments[1].axpy_mut(w * t, f)?;
        moments[2].axpy_mut(w * t * t, f)?;
    }
    let phi0 = moments[0].inner(&moments[0])?.to_f64_lossy();
    let m1 = moments[1].inner(&moments[1])?.to_f64_lossy();
    let m20 = moments[2].inner(&moments[0])?.to_f64_lossy();
    let phi2 = 8.0 * std::f64::consts::PI * std::f64::consts::PI * (m1 - m20);
    let e = 2.0 * gamma;
    Ok(2.0 * zeta(-e) * dtau.powf(1.0 + e) * phi0 + zeta(-e - 2.0) * dtau.powf(3.0 + e) * phi2)
}

/// A trajectory measured in the space-time norms of [`hgamma_norm`], with
/// `X = D(A^s)` varying along the scale.
#[derive(Debug, Clone, PartialEq)]
pub struct InHGamma<T: Real> {
    pub trajectory: Trajectory<T>,
    pub gamma: f64,
    pub pad: usize,
}

impl<T: Real> ScaleVector<T> for InHGamma<T> {
    fn norm(&self, s: f64) -> T {
        let params = HGammaParams {
            gamma: self.gamma,
            alpha_x: s,
            pad: self.pad,
            quadrature: TauQuadrature::Corrected,
        };
        hgamma_norm(&self.trajectory, &params).unwrap_or_else(|_| T::nan())
    }

    fn axpy(&self, a: T, other: &Self) -> Result<Self> {
        Ok(Self {
            trajectory: self.trajectory.axpy(a, &other.trajectory)?,
            ..*self
        })
    }

    fn scale(&self, a: T) -> Self {
        Self {
            trajectory: self.trajectory.scale(a),
            ..*self
        }
    }

    fn zeros_like(&self) -> Self {
        Self {
            trajectory: ScaleVector::zeros_like(&self.trajectory),
            ..*self
        }
    }

    fn is_finite(&self) -> bool {
        ScaleVector::is_finite(&self.trajectory)
    }
}

/// Expansion of a ladder of trajectories against `reference` in the
/// `L²(0,T;D(A^s))` scale. Every trajectory is moved to the reference grid.
pub fn transient_expansion<T: Real>(
    trajectories: &[Trajectory<T>],
    labels: Option<&[f64]>,
    reference: &Trajectory<T>,
    options: &ExpansionOptions,
) -> Result<ExpansionReport<Trajectory<T>>> {
    let grid = *reference.grid();
    let mut aligned = Vec::with_capacity(trajectories.len());
    for (i, t) in trajectories.iter().enumerate() {
        if let Some(reason) = &t.failure {
            return Err(Error::invalid(format!("trajectory {i} is incomplete: {reason}")));
        }
        reference.check_aligned(t)?;
        aligned.push(t.resample(grid));
    }
    extract(&aligned, labels, Some(reference), options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::WaveGrid;

    fn constant(m: usize, t_final: f64) -> Trajectory<f64> {
        let g = WaveGrid::square(8).unwrap();
        let f = SpectralField::cosine(g, 1, 0, 1.0).unwrap();
        Trajectory::new(vec![f; m + 1], t_final / m as f64).unwrap()
    }

    #[test]
    fn zeta_values() {
        let pi = std::f64::consts::PI;
        assert!((zeta(2.0) - pi * pi / 6.0).abs() < 1e-15);
        assert!((zeta(4.0) - pi.powi(4) / 90.0).abs() < 1e-15);
        assert!((zeta(3.0) - 1.2020569031595942).abs() < 1e-15);
        assert!((zeta(-1.0) + 1.0 / 12.0).abs() < 1e-15);
        assert!((zeta(-3.0) - 1.0 / 120.0).abs() < 1e-15);
        assert_eq!(zeta(-2.0), 0.0);
        assert_eq!(zeta(0.0), -0.5);
        // mpmath.zeta(-0.4)
        assert!((zeta(-0.4) + 0.247165460831715).abs() < 1e-13);
    }

    #[test]
    fn endpoint_coefficient_values() {
        assert!((endpoint_coefficient(0.0) + 0.25).abs() < 1e-15);
        assert!((endpoint_coefficient(0.2) + 0.20601111525533428).abs() < 1e-13);
    }

    #[test]
    fn l2_norm_of_constant() {
        let t = constant(10, 2.0);
        let v = l2_time_norm(&t, 0.0);
        let pi = std::f64::consts::PI;
        assert!((v * v - 2.0 * 2.0 * pi * pi).abs() < 1e-12);
    }

    #[test]
    fn transform_of_constant_at_zero_is_integral() {
        let vals = vec![1.0f64; 11];
        let f = zero_extended_transform(&vals, 0.1, 4).unwrap();
        assert_eq!(f.len(), 40);
        assert!((f[0].re - 1.0).abs() < 1e-15);
        assert!(f[0].im.abs() < 1e-15);
    }

    #[test]
    fn parameter_validation() {
        assert!(HGammaParams::new(1.5, 0.0).validate().is_err());
        assert!(HGammaParams::new(0.2, -0.1).validate().is_err());
        assert!(HGammaParams { pad: 1, ..HGammaParams::default() }.validate().is_err());
        let t = constant(2, 1.0);
        assert!(hgamma_norm(&t, &HGammaParams::default()).is_err());
    }

    #[test]
    fn boxcar_refinement() {
        // ∫|τ|^{0.4} sinc²(τ) dτ = 2π^{−1.4}·(−Γ(−0.6) cos(−0.3π))/2^{0.4}
        let pi = std::f64::consts::PI;
        let exact = 2.0 * pi * pi * (1.0 + 0.663236456969661);
        let err = |pad, quadrature| {
            let p = HGammaParams { pad, quadrature, ..HGammaParams::default() };
            let v = hgamma_norm(&constant(100, 1.0), &p).unwrap();
            ((v * v - exact) / exact).abs()
        };
        let corrected: Vec<f64> = [2, 4, 8].iter().map(|&p| err(p, TauQuadrature::Corrected)).collect();
        assert!(corrected.windows(2).all(|w| w[1] < w[0]));
        assert!(corrected[1] < 1e-4);
        assert!(err(4, TauQuadrature::Riemann) > 1e-2);
    }
}
