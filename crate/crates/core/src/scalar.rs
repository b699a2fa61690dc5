//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Elimination, nullspaces and the simplex are written once against [`Scalar`]
//! and instantiated with [`Rational`](crate::Rational) where decisions must be
//! exact, or with `f64`/`f32` where a tolerance is acceptable.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// A field element usable by the generic linear algebra and LP code.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialOrd + Debug + FromPrimitive + Send + Sync + 'static
{
    /// Absolute value.
    fn magnitude(&self) -> Self;

    /// Relative threshold below which a pivot is treated as zero.
    /// Exact types return zero.
    fn tolerance() -> Self;

    /// Lossy conversion used for reporting and for handing values to float code.
    fn as_f64(&self) -> f64;

    fn is_exact() -> bool;

    /// `true` if `|self| <= tolerance * scale`.
    fn negligible(&self, scale: &Self) -> bool {
        if Self::is_exact() {
            self.is_zero()
        } else {
            self.magnitude() <= Self::tolerance() * scale.clone()
        }
    }
}

impl Scalar for f64 {
    fn magnitude(&self) -> Self {
        self.abs()
    }
    fn tolerance() -> Self {
        1e-11
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for f32 {
    fn magnitude(&self) -> Self {
        self.abs()
    }
    fn tolerance() -> Self {
        1e-5
    }
    fn as_f64(&self) -> f64 {
        *self as f64
    }
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for BigRational {
    fn magnitude(&self) -> Self {
        self.abs()
    }
    fn tolerance() -> Self {
        BigRational::zero()
    }
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or_else(|| {
            // to_f64 only fails on overflow; fall back to the sign.
            if self.is_positive() {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        })
    }
    fn is_exact() -> bool {
        true
    }
}

/// Floating-point scalars used by the dynamics and balance modules.
pub trait Real: Scalar + Float {}

impl Real for f64 {}
impl Real for f32 {}

/// Parses `"3"`, `"-1/3"`, `"0.25"`, `"1.5e-3"` into an exact rational.
/// Decimal input is converted exactly, so `0.1` becomes `1/10`.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseError> {
    let s = text.trim();
    let bad = || ParseError::BadNumber(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = all_digits.parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Shortest continued-fraction convergent of `x` within `rel_tol` (relative).
/// Falls back to the exact binary value if no convergent with a denominator
/// below 10^15 is close enough.
pub fn approximate_rational(x: f64, rel_tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(BigRational::zero());
    }
    let target = x.abs();
    let (mut h_prev, mut h) = (0i128, 1i128);
    let (mut k_prev, mut k) = (1i128, 0i128);
    let mut rem = target;
    for _ in 0..64 {
        let a = rem.floor();
        if a > 1e18 {
            break;
        }
        let a_int = a as i128;
        let (h_next, k_next) = (a_int * h + h_prev, a_int * k + k_prev);
        if k_next > 1_000_000_000_000_000 {
            break;
        }
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
        let approx = h as f64 / k as f64;
        if (approx - target).abs() <= rel_tol * target {
            let sign = if x < 0.0 { -1 } else { 1 };
            return Some(BigRational::new(BigInt::from(sign * h), BigInt::from(k)));
        }
        let frac = rem - a;
        if frac <= 0.0 {
            break;
        }
        rem = 1.0 / frac;
    }
    BigRational::from_float(x)
}

/// Exact conversion of a finite float.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn rational_from_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rational_one() -> BigRational {
    BigRational::one()
}

/// Converts an exact value into a generic float.
pub fn to_real<F: Real>(q: &BigRational) -> F {
    F::from_f64(q.as_f64()).expect("finite conversion")
}

/// `serialize_with` helpers that write rationals as `"p/q"` strings.
pub mod serde_rational {
    use num_rational::BigRational;
    use serde::ser::{SerializeSeq, Serializer};

    pub fn one<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(q)
    }

    pub fn vec<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|q| q.to_string()))
    }

    pub fn mat<S: Serializer>(m: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(m.len()))?;
        for row in m {
            let row: Vec<String> = row.iter().map(|q| q.to_string()).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_integers_fractions_and_decimals() {
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        assert_eq!(parse_rational("-1/3").unwrap(), q(-1, 3));
        assert_eq!(parse_rational("0.5").unwrap(), q(1, 2));
        assert_eq!(parse_rational(".25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("1.5e-3").unwrap(), q(3, 2000));
        assert_eq!(parse_rational("2E2").unwrap(), q(200, 1));
        assert_eq!(parse_rational("0.1").unwrap(), q(1, 10));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "1.2.3", "--1", "1e", "."] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn approximate_rational_recovers_simple_fractions() {
        assert_eq!(approximate_rational(0.75, 1e-15).unwrap(), q(3, 4));
        let third = approximate_rational(1.0 / 3.0, 1e-15).unwrap();
        assert_eq!(third, q(1, 3));
    }

    #[test]
    fn negligible_is_exact_for_rationals() {
        let tiny = q(1, 1_000_000_000_000);
        assert!(!tiny.negligible(&q(1, 1)));
        assert!(1e-14_f64.negligible(&1.0));
        assert!(!1e-6_f64.negligible(&1.0));
    }
}
