//! Minimal scalar abstraction so sparse and dense containers can hold either
//! real or complex entries.

use core::fmt::Debug;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::C64;

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Send
    + Sync
    + 'static
{
    /// Absolute value (complex modulus).
    fn modulus(self) -> f64;
    /// Squared modulus.
    fn modulus_sqr(self) -> f64;
    fn conjugate(self) -> Self;
    fn to_complex(self) -> C64;
    fn from_real(x: f64) -> Self;
    fn scale(self, a: f64) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn modulus(self) -> f64 {
        num_traits::Float::abs(self)
    }
    #[inline]
    fn modulus_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn conjugate(self) -> Self {
        self
    }
    #[inline]
    fn to_complex(self) -> C64 {
        C64::new(self, 0.0)
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline]
    fn scale(self, a: f64) -> Self {
        self * a
    }
}

impl Scalar for C64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn modulus_sqr(self) -> f64 {
        self.norm_sqr()
    }
    #[inline]
    fn conjugate(self) -> Self {
        self.conj()
    }
    #[inline]
    fn to_complex(self) -> C64 {
        self
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    #[inline]
    fn scale(self, a: f64) -> Self {
        self * a
    }
}

/// Euclidean norm of a vector.
pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    num_traits::Float::sqrt(x.iter().map(|v| v.modulus_sqr()).sum::<f64>())
}

/// Maximum modulus of a vector; zero for an empty slice.
pub fn norm_inf<T: Scalar>(x: &[T]) -> f64 {
    x.iter().fold(0.0, |m, v| f64::max(m, v.modulus()))
}

/// Hermitian inner product `yᴴ x`.
pub fn dot_c(y: &[C64], x: &[C64]) -> C64 {
    y.iter().zip(x).fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b)
}
