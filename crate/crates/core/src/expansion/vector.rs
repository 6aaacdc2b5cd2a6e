use crate::error::Result;
use crate::scalar::Real;
use crate::spectral::SpectralField;
use crate::trajectory::Trajectory;

/// An element of a nested family of normed spaces indexed by a real
/// exponent `s`, as used by the peeling construction.
pub trait ScaleVector<T: Real>: Clone {
    /// Norm in the space of exponent `s`.
    fn norm(&self, s: f64) -> T;
    /// `self + a·other`.
    fn axpy(&self, a: T, other: &Self) -> Result<Self>;
    fn scale(&self, a: T) -> Self;
    fn zeros_like(&self) -> Self;
    fn is_finite(&self) -> bool;
}

/// `D(A^s)` norms of the field itself.
impl<T: Real> ScaleVector<T> for SpectralField<T> {
    fn norm(&self, s: f64) -> T {
        self.frac_norm_unchecked(T::lit(s))
    }

    fn axpy(&self, a: T, other: &Self) -> Result<Self> {
        SpectralField::axpy(self, a, other)
    }

    fn scale(&self, a: T) -> Self {
        SpectralField::scale(self, a)
    }

    fn zeros_like(&self) -> Self {
        SpectralField::zeros(*self.grid())
    }

    fn is_finite(&self) -> bool {
        SpectralField::is_finite(self)
    }
}

/// A vorticity measured through its velocity: `‖A^s u‖ = ‖A^{s−1/2} ω‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsVelocity<T: Real>(pub SpectralField<T>);

impl<T: Real> ScaleVector<T> for AsVelocity<T> {
    fn norm(&self, s: f64) -> T {
        self.0.velocity_norm(T::lit(s))
    }

    fn axpy(&self, a: T, other: &Self) -> Result<Self> {
        Ok(Self(self.0.axpy(a, &other.0)?))
    }

    fn scale(&self, a: T) -> Self {
        Self(self.0.scale(a))
    }

    fn zeros_like(&self) -> Self {
        Self(SpectralField::zeros(*self.0.grid()))
    }

    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
}

/// `L²(0, T; D(A^s))` norms, trapezoid rule in time.
impl<T: Real> ScaleVector<T> for Trajectory<T> {
    fn norm(&self, s: f64) -> T {
        crate::fractional_time::l2_time_norm(self, T::lit(s))
    }

    fn axpy(&self, a: T, other: &Self) -> Result<Self> {
        Trajectory::axpy(self, a, other)
    }

    fn scale(&self, a: T) -> Self {
        Trajectory::scale(self, a)
    }

    fn zeros_like(&self) -> Self {
        self.map(|f| SpectralField::zeros(*f.grid()))
    }

    fn is_finite(&self) -> bool {
        self.samples().iter().all(|f| f.is_finite())
    }
}
