//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Counting and certificate checks run over [`Rational`](crate::Rational);
//! quick pre-checks and Monte Carlo style estimates run over `f64`. Routines
//! that make sense for both (threshold evaluation, `LDLᵀ`) are written once
//! against [`Scalar`].

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// An ordered field, either exact or floating point.
pub trait Scalar: Clone + PartialOrd + Num + Signed + fmt::Debug {
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
}

impl Scalar for Ratio<i128> {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num as i128, den as i128)
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Best-effort conversion of a big rational to `f64` (for display and
/// float-side comparisons only).
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        return v;
    }
    // Scale numerator and denominator down together when either overflows.
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Exact rational from a finite `f64` (every finite double is a dyadic rational).
pub fn f64_to_ratio(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Round `x` to the nearest multiple of `2^-bits`.
pub fn dyadic(x: f64, bits: u32) -> BigRational {
    let scale = (2.0f64).powi(bits as i32);
    let num = BigInt::from_f64((x * scale).round()).unwrap_or_else(BigInt::zero);
    BigRational::new(num, BigInt::from(1u8) << bits as usize)
}

/// `num/den` as a big rational.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::from_ratio(num, den)
}

/// Parse `p/q`, an integer, or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(i));
    }
    // Decimal literal: read digits exactly instead of going through f64.
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

/// Render as `num/den` (or just `num` for integers).
pub fn fmt_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/3"), Some(ratio(1, 3)));
        assert_eq!(parse_rational("0.25"), Some(ratio(1, 4)));
        assert_eq!(parse_rational("-1.5e-1"), Some(ratio(-3, 20)));
        assert_eq!(parse_rational("7"), Some(ratio(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("pi"), None);
    }

    #[test]
    fn dyadic_rounding() {
        assert_eq!(dyadic(0.3, 2), ratio(1, 4));
        assert_eq!(dyadic(-0.75, 4), ratio(-3, 4));
    }

    #[test]
    fn huge_ratio_to_f64() {
        let big = BigRational::new(BigInt::from(1u8) << 3000usize, (BigInt::from(1u8) << 3000usize) * 3);
        assert!((ratio_to_f64(&big) - 1.0 / 3.0).abs() < 1e-12);
    }
}
