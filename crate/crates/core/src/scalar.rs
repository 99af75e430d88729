//! Scalar abstraction: the crate is generic over the underlying real float.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar.
///
/// `f64` is the production choice; `f32` also satisfies the bound and is
/// exercised by smoke tests, with validation tolerances widened in proportion
/// to the machine epsilon (see [`Real::tol`]).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Convert a finite `f64` literal into `Self`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// A numerical tolerance stated for `f64`, rescaled so that the same
    /// number of ulps is allowed at this scalar's precision.
    fn tol(base: f64) -> Self {
        let ulps = base / f64::EPSILON;
        Self::of(base).max(Self::epsilon() * Self::of(ulps))
    }

    /// Lossy conversion to `f64` for diagnostics.
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
}

/// Complex literal over a generic scalar.
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::of(re), T::of(im))
}

/// Real literal promoted to a complex value.
pub fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}
