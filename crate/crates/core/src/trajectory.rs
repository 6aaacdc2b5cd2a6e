//! Uniformly sampled time histories of spectral fields.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{SpectralField, WaveGrid};

/// Samples `f(t_j)`, `t_j = j Δs`, `j = 0..=M`, on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real> {
    sample_interval: T,
    samples: Vec<SpectralField<T>>,
    /// Set when the run that produced the samples stopped early.
    pub failure: Option<String>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(samples: Vec<SpectralField<T>>, sample_interval: T) -> Result<Self> {
        if !(sample_interval > T::zero()) || !sample_interval.is_finite() {
            return Err(Error::invalid(format!("sample interval must be positive, got {sample_interval}")));
        }
        let first = samples
            .first()
            .ok_or_else(|| Error::invalid("trajectory needs at least one sample"))?;
        if let Some(bad) = samples.iter().find(|s| s.grid() != first.grid()) {
            return Err(Error::GridMismatch(format!("{} vs {}", first.grid(), bad.grid())));
        }
        if let Some(j) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFinite(format!("trajectory sample {j}")));
        }
        Ok(Self {
            sample_interval,
            samples,
            failure: None,
        })
    }

    pub fn grid(&self) -> &WaveGrid {
        self.samples[0].grid()
    }

    #[inline]
    pub fn sample_interval(&self) -> T {
        self.sample_interval
    }

    #[inline]
    pub fn samples(&self) -> &[SpectralField<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `T = M Δs`.
    pub fn final_time(&self) -> T {
        T::from_usize_lossy(self.samples.len() - 1) * self.sample_interval
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.samples.len()).map(|j| T::from_usize_lossy(j) * self.sample_interval).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    /// Every sample moved to `grid`.
    pub fn resample(&self, grid: WaveGrid) -> Self {
        Self {
            sample_interval: self.sample_interval,
            samples: self.samples.iter().map(|s| s.resample(grid)).collect(),
            failure: self.failure.clone(),
        }
    }

    /// Sample-wise map, e.g. a spatial multiplier.
    pub fn map(&self, f: impl Fn(&SpectralField<T>) -> SpectralField<T>) -> Self {
        Self {
            sample_interval: self.sample_interval,
            samples: self.samples.iter().map(f).collect(),
            failure: self.failure.clone(),
        }
    }

    /// Check that `other` has the same sampling.
    pub fn check_aligned(&self, other: &Self) -> Result<()> {
        let rel = ((self.sample_interval - other.sample_interval) / self.sample_interval).abs();
        if self.len() != other.len() || rel > T::lit(1e-12) {
            return Err(Error::invalid(format!(
                "misaligned trajectories: {} samples every {} vs {} samples every {}",
                self.len(),
                self.sample_interval,
                other.len(),
                other.sample_interval
            )));
        }
        Ok(())
    }

    /// Sample-wise `self + s·other` on a common grid.
    pub fn axpy(&self, s: T, other: &Self) -> Result<Self> {
        self.check_aligned(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.axpy(s, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            sample_interval: self.sample_interval,
            samples,
            failure: None,
        })
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|f| f.scale(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks() {
        let g = WaveGrid::square(8).unwrap();
        let z = SpectralField::<f64>::zeros(g);
        assert!(Trajectory::new(vec![z.clone(); 3], 0.0).is_err());
        assert!(Trajectory::<f64>::new(vec![], 0.1).is_err());
        let other = SpectralField::zeros(WaveGrid::square(10).unwrap());
        assert!(Trajectory::new(vec![z.clone(), other], 0.1).is_err());
        let t = Trajectory::new(vec![z; 5], 0.25).unwrap();
        assert_eq!(t.final_time(), 1.0);
        assert_eq!(t.times(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn alignment() {
        let g = WaveGrid::square(8).unwrap();
        let z = SpectralField::<f64>::zeros(g);
        let a = Trajectory::new(vec![z.clone(); 5], 0.25).unwrap();
        let b = Trajectory::new(vec![z.clone(); 4], 0.25).unwrap();
        let c = Trajectory::new(vec![z; 5], 0.2).unwrap();
        assert!(a.check_aligned(&a).is_ok());
        assert!(a.check_aligned(&b).is_err());
        assert!(a.check_aligned(&c).is_err());
    }
}
