//! Arithmetic of the cubic and quartic fields attached to a prime conductor
//! ℓ ≡ 1 (mod 3), and the census of level-raising auxiliary primes built on it.
//!
//! Layers, bottom to top:
//!
//! - [`arith`]: integers, polynomials over `Z` and `F_p`, integer matrices
//!   (HNF/SNF), LLL, prime iteration.
//! - [`field`]: number fields of degree ≤ 4 with maximal orders, ideals and
//!   prime decomposition; construction of the cubic field `L` and the
//!   tetrahedral quartic `F` of conductor ℓ.
//! - [`class`]: class groups and unit groups.
//! - [`ray`]: 3-elementary ray class quotients and their Artin maps.
//! - [`census`]: classification of auxiliary primes into `C3`, `CΛ`, `Cτ̄`.
//! - [`stats`], [`model`]: density statistics and the probabilistic model.
//! - [`config`]: configuration files and the field-data cache.
//!
//! The exact algebra is generic over a [`Scalar`] integer type; the aliases
//! below fix the arbitrary-precision instantiation used by the higher layers.

// index loops read more naturally than iterator chains in the matrix code
#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod census;
pub mod class;
pub mod config;
pub mod error;
pub mod field;
pub mod model;
pub mod ray;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::{Ring, Scalar};

/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;
/// Exact rational number.
pub type Rational = num_rational::BigRational;
/// Polynomial with integer coefficients.
pub type IntPoly = arith::poly::Poly<Int>;
/// Polynomial with rational coefficients.
pub type RatPoly = arith::poly::Poly<Rational>;
/// Dense integer matrix.
pub type IntMatrix = arith::matrix::Matrix<Int>;
