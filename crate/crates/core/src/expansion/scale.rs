use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest exponent accepted in a scale.
pub const MAX_EXPONENT: f64 = 4.0;

/// Strictly decreasing exponents `s₀ > s₁ > … >= 0` of nested norms
/// `D(A^{s_k})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SobolevScale(Vec<f64>);

impl SobolevScale {
    pub fn new(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::invalid("a Sobolev scale needs at least one exponent"));
        }
        for &s in &exponents {
            if !(0.0..=MAX_EXPONENT).contains(&s) {
                return Err(Error::invalid(format!("exponent {s} outside [0, {MAX_EXPONENT}]")));
            }
        }
        if exponents.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid(format!("exponents must decrease strictly: {exponents:?}")));
        }
        Ok(Self(exponents))
    }

    /// `start, start − step, …` with `count` entries.
    pub fn stepped(start: f64, step: f64, count: usize) -> Result<Self> {
        Self::new((0..count).map(|i| start - step * i as f64).collect())
    }

    #[inline]
    pub fn exponents(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `s_k`.
    #[inline]
    pub fn get(&self, k: usize) -> Option<f64> {
        self.0.get(k).copied()
    }
}

impl TryFrom<Vec<f64>> for SobolevScale {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SobolevScale> for Vec<f64> {
    fn from(s: SobolevScale) -> Self {
        s.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SobolevScale::new(vec![1.0, 0.75, 0.5]).is_ok());
        assert!(SobolevScale::new(vec![]).is_err());
        assert!(SobolevScale::new(vec![0.5, 0.5]).is_err());
        assert!(SobolevScale::new(vec![0.5, 0.75]).is_err());
        assert!(SobolevScale::new(vec![1.0, -0.25]).is_err());
        assert!(SobolevScale::new(vec![5.0]).is_err());
    }

    #[test]
    fn stepped_and_serde() {
        let s = SobolevScale::stepped(1.0, 0.25, 4).unwrap();
        assert_eq!(s.exponents(), &[1.0, 0.75, 0.5, 0.25]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, "[1.0,0.75,0.5,0.25]");
        assert!(serde_json::from_str::<SobolevScale>("[0.1,0.2]").is_err());
    }
}
