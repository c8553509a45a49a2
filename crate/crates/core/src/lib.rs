//! Exact computations with Lie[1]∞ and Loday[1]∞ structures, coherent
//! Lie∞-actions, hemisemidirect products and non-abelian homotopy
//! embedding tensors.
//!
//! Everything is generic over a [`Scalar`]; [`Q`] (arbitrary precision
//! rationals) is the default and [`Q64`] is a faster fixed-width variant.

pub mod action;
pub mod coalgebra;
pub mod error;
pub mod fixtures;
pub mod graded;
pub mod homotopy;
pub mod linear;
pub mod multimap;
pub mod random;
pub mod report;
pub mod scalar;
pub mod tensor;

pub use error::{AlgebraError, Result};
pub use graded::{GradedSpace, Permutation, Word};
pub use multimap::{Family, Flavor, MultiMap, Space, Vector};
pub use scalar::{Scalar, Sign};

/// Arbitrary precision rationals.
pub type Q = num_rational::BigRational;

/// Rationals with `i64` parts; overflow panics.
pub type Q64 = num_rational::Rational64;
