//! Numeric abstraction: the optimization and transport kernels are generic
//! over [`Scalar`], instantiated with `f64` (float mode) or [`Rational`]
//! (exact mode).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

pub type Rational = BigRational;

/// An ordered field with enough structure for simplex pivoting, shortest
/// paths and flow augmentation. `EXACT` distinguishes the rational backend,
/// where validators and invariant checks use zero tolerance.
pub trait Scalar:
    Clone + PartialOrd + std::fmt::Debug + std::fmt::Display + Signed + 'static
{
    const EXACT: bool;

    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn from_int(v: i64) -> Self;
    fn ratio(num: i64, den: i64) -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("non-finite float cannot enter exact mode")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Parses a decimal literal (optionally signed, with fraction and exponent)
/// into an exact rational. This is how `--arithmetic exact` reads JSON
/// numbers without a float round-trip.
pub fn rational_from_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().ok()?;
            (&s[..pos], e)
        }
        None => (s, 0i64),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    let digits: String = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return None;
    }
    let num: BigInt = digits.parse().ok()?;
    let shift = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let pow = num_traits::pow::pow(ten, shift.unsigned_abs() as usize);
    Some(if shift >= 0 {
        BigRational::from_integer(num * pow)
    } else {
        BigRational::new(num, pow)
    })
}

/// Sum of a slice, avoiding the `Sum` bound that `BigRational` lacks for refs.
pub fn sum<R: Scalar>(vals: &[R]) -> R {
    vals.iter().fold(R::zero(), |a, b| a + b.clone())
}

/// Maximum under `PartialOrd`; panics on NaN-style incomparability.
pub fn max<R: Scalar>(a: R, b: R) -> R {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn min<R: Scalar>(a: R, b: R) -> R {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn two<R: Scalar>() -> R {
    R::one() + R::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(rational_from_decimal("0.5").unwrap(), Rational::ratio(1, 2));
        assert_eq!(rational_from_decimal("-3").unwrap(), Rational::from_int(-3));
        assert_eq!(
            rational_from_decimal("1.25e2").unwrap(),
            Rational::from_int(125)
        );
        assert_eq!(
            rational_from_decimal("2e-3").unwrap(),
            Rational::ratio(2, 1000)
        );
        assert_eq!(rational_from_decimal("0.1").unwrap(), Rational::ratio(1, 10));
        assert!(rational_from_decimal("x").is_none());
    }
}
