//! Scalar abstractions.
//!
//! Geometry (coordinates, volumes, masses) is generic over [`Real`], which covers
//! `f32` and `f64`. Linear programs are generic over [`LpScalar`], which is
//! implemented for exact [`BigRational`] and for `f64` with a small tolerance.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::RationalizeError;

/// Floating-point type used for vertex coordinates and simplex volumes.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Ordered field used by the simplex solver.
///
/// Exact implementations compare against zero exactly; floating implementations
/// use a tolerance. Every value can be exported as a rational for reporting.
pub trait LpScalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Signed + Send + Sync + 'static
{
    /// True when arithmetic is exact.
    const EXACT: bool;

    /// Sign of `self` relative to zero (tolerance-aware for floats).
    fn sign(&self) -> Ordering;

    fn from_i64(v: i64) -> Self;

    /// Converts a rational. Floating types round to nearest.
    fn from_rational(v: &BigRational) -> Self;

    fn to_rational(&self) -> BigRational;

    fn to_f64(&self) -> f64;

    /// True when the value is an integer (exactly, or within tolerance).
    fn is_integer(&self) -> bool;

    /// Nearest integer, saturating at the `i64` range.
    fn round_to_i64(&self) -> i64;

    fn is_positive_strict(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    fn is_negative_strict(&self) -> bool {
        self.sign() == Ordering::Less
    }

    fn is_zero_tol(&self) -> bool {
        self.sign() == Ordering::Equal
    }
}

impl LpScalar for BigRational {
    const EXACT: bool = true;

    fn sign(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(v: &BigRational) -> Self {
        v.clone()
    }

    fn to_rational(&self) -> BigRational {
        self.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_integer(&self) -> bool {
        self.denom().is_one()
    }

    fn round_to_i64(&self) -> i64 {
        let r = self.round().to_integer();
        r.to_i64()
            .unwrap_or(if r.is_negative() { i64::MIN } else { i64::MAX })
    }
}

/// Absolute tolerance used by the `f64` implementation of [`LpScalar`].
pub const F64_TOLERANCE: f64 = 1e-9;

impl LpScalar for f64 {
    const EXACT: bool = false;

    fn sign(&self) -> Ordering {
        if *self > F64_TOLERANCE {
            Ordering::Greater
        } else if *self < -F64_TOLERANCE {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(v: &BigRational) -> Self {
        ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> BigRational {
        BigRational::from_f64(*self).unwrap_or_else(BigRational::zero)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_integer(&self) -> bool {
        (self - self.round()).abs() <= 1e-7
    }

    fn round_to_i64(&self) -> i64 {
        self.round() as i64
    }
}

/// Rounds `v` to `sig_digits` significant decimal digits and returns the
/// result as an exact rational.
///
/// The decimal rounding is the one performed by Rust's `{:e}` formatting,
/// which rounds the exact binary value half-to-even.
pub fn rationalize(v: f64, sig_digits: u32) -> Result<BigRational, RationalizeError> {
    if !v.is_finite() {
        return Err(RationalizeError::NonFinite(v));
    }
    if sig_digits == 0 || sig_digits > 30 {
        return Err(RationalizeError::BadPrecision(sig_digits));
    }
    if v == 0.0 {
        return Ok(BigRational::zero());
    }
    let text = format!("{:.*e}", (sig_digits - 1) as usize, v);
    parse_decimal(&text).ok_or(RationalizeError::NonFinite(v))
}

/// Parses a decimal literal such as `-1.25e-3` into an exact rational.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i64>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

/// Formats a rational as `num/den`, keeping the denominator even when it is 1.
pub fn format_fraction(v: &BigRational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Parses `num/den` or an integer into a rational.
pub fn parse_fraction(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => Some(BigRational::from_integer(text.parse().ok()?)),
    }
}
