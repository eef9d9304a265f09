//! Scalar traits shared by the generic algebra.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Coefficient ring for polynomials and matrices: integers or rationals.
pub trait Ring: Clone + Debug + PartialEq + Num + Neg<Output = Self> {}

impl<T> Ring for T where T: Clone + Debug + PartialEq + Num + Neg<Output = T> {}

/// Exact signed integer type.
///
/// Implemented for `i64`, `i128` and `BigInt`. Primitive widths are the
/// caller's responsibility: arithmetic overflow panics (overflow checks are
/// enabled in every build profile of this workspace) rather than wrapping.
pub trait Scalar:
    Ring + Ord + Integer + Signed + FromPrimitive + ToPrimitive + Display + Send + Sync + 'static
{
    fn to_big(&self) -> BigInt;
    fn from_big(x: &BigInt) -> Option<Self>;
}

impl Scalar for i64 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_big(x: &BigInt) -> Option<Self> {
        x.to_i64()
    }
}

impl Scalar for i128 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_big(x: &BigInt) -> Option<Self> {
        x.to_i128()
    }
}

impl Scalar for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn from_big(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
}

/// Converts between scalar types, panicking if the value does not fit.
pub fn cast<S: Scalar, T: Scalar>(x: &S) -> T {
    T::from_big(&x.to_big()).expect("integer does not fit target scalar type")
}
