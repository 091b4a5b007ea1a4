//! Scalar abstraction shared by every numerical routine.

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Real floating-point scalar usable by the solvers (`f32` or `f64`).
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + Default + Send + Sync + 'static
{
    /// Multiplier applied to the f64 tolerance table for this precision.
    const TOL_SCALE: f64;

    /// Converts an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("representable literal")
    }

    /// Lossy conversion to `f64` for reporting.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Positive infinity.
    #[inline]
    fn infinity() -> Self {
        Self::of(f64::INFINITY)
    }

    /// Machine epsilon.
    fn epsilon() -> Self;

    /// Scales a tolerance from the f64 table to this precision.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::of(x * Self::TOL_SCALE)
    }
}

impl Real for f64 {
    const TOL_SCALE: f64 = 1.0;
    fn epsilon() -> Self {
        f64::EPSILON
    }
}

impl Real for f32 {
    const TOL_SCALE: f64 = 1.0e6;
    fn epsilon() -> Self {
        f32::EPSILON
    }
}

/// Complex scalar.
pub type C<T> = Complex<T>;
/// Dense complex matrix (column-major).
pub type CMatrix<T> = DMatrix<Complex<T>>;
/// Dense complex vector.
pub type CVector<T> = DVector<Complex<T>>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn ci<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter()
        .map(|z| z.norm_sqr().sqrt())
        .fold(T::zero(), |a, b| if b > a { b } else { a })
}

/// Frobenius norm.
pub fn frobenius<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
}

pub(crate) fn all_finite<T: Real>(m: &CMatrix<T>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn fmax<T: Real>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

pub(crate) fn fmin<T: Real>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}
