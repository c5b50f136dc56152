//! Scalar traits shared by the lattice, cone and valuation code.
//!
//! Integer algorithms (Smith and Hermite forms, kernels, memberships) are
//! generic over [`IntegerScalar`]; anything that needs division (cone
//! coordinates, linear solves, Fourier–Motzkin, valuations) is generic over
//! [`Scalar`]. The crate root fixes both to arbitrary precision through
//! type aliases; `i64`, `Ratio<i64>` and the float types are supported for
//! experiments where overflow or rounding is acceptable.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, Signed, ToPrimitive};

pub trait IntegerScalar: Integer + Signed + Clone + Debug + Hash + Send + Sync + 'static {}

impl<T> IntegerScalar for T where T: Integer + Signed + Clone + Debug + Hash + Send + Sync + 'static {}

/// An ordered field.
///
/// Equality tests in the valuation code are exact only for the rational
/// implementations.
pub trait Scalar:
    Num + Signed + Clone + Debug + Display + PartialOrd + Send + Sync + 'static
{
    fn from_bigint(n: &BigInt) -> Self;

    /// Parses `"a"` or `"a/b"`.
    fn parse(s: &str) -> Option<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }
}

impl Scalar for BigRational {
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn parse(s: &str) -> Option<Self> {
        let r = BigRational::from_str(s.trim()).ok()?;
        Some(r)
    }
}

impl Scalar for Ratio<i64> {
    fn from_bigint(n: &BigInt) -> Self {
        Ratio::from_integer(n.to_i64().expect("integer out of i64 range"))
    }

    fn parse(s: &str) -> Option<Self> {
        Ratio::<i64>::from_str(s.trim()).ok()
    }
}

impl Scalar for f64 {
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }

    fn parse(s: &str) -> Option<Self> {
        parse_fraction_float(s)
    }
}

impl Scalar for f32 {
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f32().unwrap_or(f32::NAN)
    }

    fn parse(s: &str) -> Option<Self> {
        parse_fraction_float::<f64>(s).map(|x| x as f32)
    }
}

fn parse_fraction_float<F: FromStr + std::ops::Div<Output = F>>(s: &str) -> Option<F> {
    match s.trim().split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<F>().ok()? / b.trim().parse::<F>().ok()?),
        None => s.trim().parse().ok(),
    }
}
