//! Truncation lattices for fields on the `[0, 2π]²` torus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the retained wavevector set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Truncation {
    /// `max(|k1|, |k2|) <= n/2`.
    Square,
    /// `|k|² <= lambda_max`, the eigenvalue-ordered projector.
    Ball { lambda_max: u64 },
}

/// A truncation of the integer lattice `Z² \ {0}`.
///
/// The retained set is always symmetric under `k -> -k` and never contains
/// the zero mode. Fields on the grid store the half plane `k2 >= 0`,
/// `-h <= k1 <= h` where `h` is [`WaveGrid::half_width`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WaveGrid {
    resolution: usize,
    truncation: Truncation,
}

impl WaveGrid {
    /// Square truncation with half-width `resolution / 2`.
    pub fn square(resolution: usize) -> Result<Self> {
        if resolution == 0 || !resolution.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "resolution must be an even positive integer, got {resolution}"
            )));
        }
        Ok(Self {
            resolution,
            truncation: Truncation::Square,
        })
    }

    /// Ball truncation `|k|² <= lambda_max`.
    pub fn ball(lambda_max: u64) -> Result<Self> {
        if lambda_max == 0 {
            return Err(Error::InvalidGrid("ball truncation needs lambda_max >= 1".into()));
        }
        let h = isqrt(lambda_max) as usize;
        Ok(Self {
            resolution: 2 * h,
            truncation: Truncation::Ball { lambda_max },
        })
    }

    pub fn new(resolution: usize, truncation: Truncation) -> Result<Self> {
        match truncation {
            Truncation::Square => Self::square(resolution),
            Truncation::Ball { lambda_max } => {
                let g = Self::ball(lambda_max)?;
                if resolution != g.resolution {
                    return Err(Error::InvalidGrid(format!(
                        "ball truncation with lambda_max {lambda_max} has resolution {}, got {resolution}",
                        g.resolution
                    )));
                }
                Ok(g)
            }
        }
    }

    #[inline]
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    #[inline]
    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// Largest `|k_i|` that can be retained.
    #[inline]
    pub fn half_width(&self) -> usize {
        self.resolution / 2
    }

    /// Number of `k1` slots per stored row, `2h + 1`.
    #[inline]
    pub fn row_len(&self) -> usize {
        2 * self.half_width() + 1
    }

    /// Number of stored half-plane coefficients.
    #[inline]
    pub fn storage_len(&self) -> usize {
        self.row_len() * (self.half_width() + 1)
    }

    /// Half-plane storage index of `(k1, k2)` with `k2 >= 0`.
    #[inline]
    pub fn index(&self, k1: i64, k2: i64) -> usize {
        debug_assert!(k2 >= 0);
        let h = self.half_width() as i64;
        (k2 * (2 * h + 1) + (k1 + h)) as usize
    }

    /// Wavevector stored at half-plane index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> (i64, i64) {
        let row = self.row_len();
        let h = self.half_width() as i64;
        ((idx % row) as i64 - h, (idx / row) as i64)
    }

    /// Whether `k` belongs to the retained set.
    pub fn retains(&self, k1: i64, k2: i64) -> bool {
        if k1 == 0 && k2 == 0 {
            return false;
        }
        let h = self.half_width() as i64;
        match self.truncation {
            Truncation::Square => k1.abs() <= h && k2.abs() <= h,
            Truncation::Ball { lambda_max } => {
                k1.abs() <= h && k2.abs() <= h && ((k1 * k1 + k2 * k2) as u64) <= lambda_max
            }
        }
    }

    /// Iterate the retained half-plane modes as `(index, k1, k2)`.
    ///
    /// On the `k2 = 0` row both signs of `k1` are yielded.
    pub fn half_plane(&self) -> impl Iterator<Item = (usize, i64, i64)> + '_ {
        (0..self.storage_len()).filter_map(move |idx| {
            let (k1, k2) = self.wavevector(idx);
            self.retains(k1, k2).then_some((idx, k1, k2))
        })
    }

    /// `true` when every mode retained by `self` is retained by `other`.
    pub fn is_subset_of(&self, other: &WaveGrid) -> bool {
        let h = self.half_width() as i64;
        (0..=h).all(|k2| (-h..=h).all(|k1| !self.retains(k1, k2) || other.retains(k1, k2)))
    }

    /// Smallest `|k|²` not retained: the surrogate for the first excluded
    /// Stokes eigenvalue.
    pub fn lambda_cut(&self) -> u64 {
        match self.truncation {
            Truncation::Square => {
                let h = self.half_width() as u64 + 1;
                h * h
            }
            Truncation::Ball { lambda_max } => {
                let mut m = lambda_max + 1;
                while !is_sum_of_two_squares(m) {
                    m += 1;
                }
                m
            }
        }
    }

    /// Number of retained modes over the full plane, `dim P_n`.
    pub fn dimension(&self) -> usize {
        let h = self.half_width() as i64;
        (-h..=h)
            .flat_map(|k1| (-h..=h).map(move |k2| (k1, k2)))
            .filter(|&(k1, k2)| self.retains(k1, k2))
            .count()
    }

    /// Square grid whose half-width is at least the largest retained `|k_i|`.
    pub fn bounding_square(&self) -> WaveGrid {
        WaveGrid {
            resolution: self.resolution,
            truncation: Truncation::Square,
        }
    }
}

impl std::fmt::Display for WaveGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.truncation {
            Truncation::Square => write!(f, "square(n={})", self.resolution),
            Truncation::Ball { lambda_max } => write!(f, "ball(lambda<={lambda_max})"),
        }
    }
}

/// `true` for `n = 2^p 3^q`, `n >= 1`.
pub fn is_2p3q(mut n: usize) -> bool {
    if n == 0 {
        return false;
    }
    while n.is_multiple_of(2) {
        n /= 2;
    }
    while n.is_multiple_of(3) {
        n /= 3;
    }
    n == 1
}

/// Smallest integer `>= min` whose prime factors are all in `{2, 3, 5}`.
pub fn fft_friendly_size(min: usize) -> usize {
    let mut m = min.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

fn is_sum_of_two_squares(m: u64) -> bool {
    let r = isqrt(m);
    (0..=r).any(|a| {
        let rest = m - a * a;
        let b = isqrt(rest);
        b * b == rest
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_cut_examples() {
        assert_eq!(WaveGrid::square(32).unwrap().lambda_cut(), 289);
        assert_eq!(WaveGrid::ball(2).unwrap().lambda_cut(), 4);
        assert_eq!(WaveGrid::ball(1).unwrap().lambda_cut(), 2);
        assert_eq!(WaveGrid::ball(4).unwrap().lambda_cut(), 5);
    }

    #[test]
    fn odd_and_zero_resolutions_rejected() {
        assert!(WaveGrid::square(33).is_err());
        assert!(WaveGrid::square(0).is_err());
        assert!(WaveGrid::ball(0).is_err());
    }

    #[test]
    fn retained_set_is_symmetric_and_excludes_zero() {
        for g in [WaveGrid::square(8).unwrap(), WaveGrid::ball(10).unwrap()] {
            assert!(!g.retains(0, 0));
            let h = g.half_width() as i64;
            for k1 in -h..=h {
                for k2 in -h..=h {
                    assert_eq!(g.retains(k1, k2), g.retains(-k1, -k2));
                }
            }
        }
    }

    #[test]
    fn dimension_counts() {
        // (2h+1)^2 - 1 on the square.
        assert_eq!(WaveGrid::square(4).unwrap().dimension(), 24);
        // |k|^2 <= 2: the 8 neighbours of the origin.
        assert_eq!(WaveGrid::ball(2).unwrap().dimension(), 8);
    }

    #[test]
    fn index_roundtrip() {
        let g = WaveGrid::square(6).unwrap();
        for idx in 0..g.storage_len() {
            let (k1, k2) = g.wavevector(idx);
            assert_eq!(g.index(k1, k2), idx);
        }
    }

    #[test]
    fn subset_relation() {
        let small = WaveGrid::square(8).unwrap();
        let big = WaveGrid::square(16).unwrap();
        assert!(small.is_subset_of(&big));
        assert!(!big.is_subset_of(&small));
        assert!(WaveGrid::ball(16).unwrap().is_subset_of(&WaveGrid::square(8).unwrap()));
        assert!(!WaveGrid::square(8).unwrap().is_subset_of(&WaveGrid::ball(16).unwrap()));
    }

    #[test]
    fn smooth_sizes() {
        assert!(is_2p3q(32) && is_2p3q(36) && is_2p3q(54) && is_2p3q(4096));
        assert!(!is_2p3q(33) && !is_2p3q(40) && !is_2p3q(0));
        assert_eq!(fft_friendly_size(49), 50);
        assert_eq!(fft_friendly_size(385), 400);
        assert_eq!(fft_friendly_size(7), 8);
    }
}
