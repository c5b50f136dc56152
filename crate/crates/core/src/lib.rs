//! Exact combinatorics of logarithmic geometry.
//!
//! The crate computes with fine and saturated monoids, Kato fans glued from
//! their spectra, Kato stacks presented by strict groupoids, extended cone
//! complexes, and a small model of non-Archimedean analytic points on which
//! tropicalization and the skeleton retraction can be evaluated exactly.
//!
//! Integer work is done with arbitrary precision; cone coordinates and
//! valuations are generic over [`Scalar`] and default to [`Rational`].

pub mod cli;
pub mod conecomplex;
pub mod error;
pub mod fm;
pub mod katofan;
pub mod lattice;
pub mod linalg;
pub mod monoid;
pub mod scalar;
pub mod stack;
pub mod trop;
pub mod verify;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use error::{Error, Result};
pub use scalar::{IntegerScalar, Scalar};

/// Arbitrary-precision integer matrix.
pub type IntMatrix = lattice::Matrix<BigInt>;
/// Exact rational scalar used throughout the public API.
pub type Rational = BigRational;

pub type ExtendedValue = conecomplex::ExtendedNonneg<Rational>;
pub type ConePoint = conecomplex::ExtendedConePoint<Rational>;
pub type ComplexPoint = conecomplex::ComplexPoint<Rational>;
pub type LogValue = trop::LogValue<Rational>;
pub type ArcPoint = trop::ArcPoint<Rational>;
pub type GaussPoint = trop::GaussPoint<Rational>;
pub type MonPolynomial = trop::MonPolynomial<Rational>;
pub type BiPolynomial = trop::BiPolynomial<Rational>;

pub use katofan::{FanPoint, KatoFan, KatoFanMorphism};
pub use monoid::{AffineMonoid, Face, MonoidHom};
pub use stack::{GroupAction, KatoGroupoid};
