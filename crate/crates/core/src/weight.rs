//! Numeric scalars for probabilities: `f64` for everyday work and exact big
//! rationals where strict inequalities must be certified.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub trait Weight:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;

    fn from_u64(n: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// Parses a decimal or a fraction such as `1/6`.
    fn parse_value(text: &str) -> Result<Self>;

    /// Splits a non-negative value into its integer part and the remainder in `[0, 1)`.
    fn split_integer(&self) -> (u64, Self);

    /// Whether a residual is small enough to be treated as zero.
    fn negligible(&self) -> bool;

    /// Whether a probability vector total counts as one.
    fn is_unit_total(total: &Self) -> bool;

    fn abs_diff(&self, other: &Self) -> Self {
        if self >= other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }

    fn powu(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }

    fn ratio(num: u64, den: u64) -> Self {
        Self::from_u64(num) / Self::from_u64(den)
    }

    /// Sum with error compensation where the type needs it.
    fn total<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Self {
        items
            .into_iter()
            .fold(Self::zero(), |acc, x| acc + x.clone())
    }
}

/// Tolerance used for float equality of probability totals.
pub const UNIT_TOTAL_TOL: f64 = 1e-12;

impl Weight for f64 {
    const EXACT: bool = false;

    fn from_u64(n: u64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_value(text: &str) -> Result<Self> {
        match text.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => parse_rational(text).map(|r| Weight::to_f64(&r)),
        }
    }

    fn split_integer(&self) -> (u64, Self) {
        // Snap values like 2.9999999999999996 onto the integer grid.
        let snapped = (*self + 1e-12).floor();
        let rem = (*self - snapped).max(0.0);
        (snapped.max(0.0) as u64, rem)
    }

    fn negligible(&self) -> bool {
        self.abs() <= 1e-15
    }

    fn is_unit_total(total: &Self) -> bool {
        (total - 1.0).abs() <= UNIT_TOTAL_TOL
    }

    fn powu(&self, exp: u32) -> Self {
        self.powi(exp as i32)
    }

    fn total<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Self {
        // Neumaier summation.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for &x in items {
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }
}

impl Weight for BigRational {
    const EXACT: bool = true;

    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_value(text: &str) -> Result<Self> {
        parse_rational(text)
    }

    fn split_integer(&self) -> (u64, Self) {
        let floor = self.floor();
        let k = floor.to_integer().to_u64().unwrap_or(0);
        (k, self.clone() - floor)
    }

    fn negligible(&self) -> bool {
        self.is_zero()
    }

    fn is_unit_total(total: &Self) -> bool {
        total.is_one()
    }

    fn abs_diff(&self, other: &Self) -> Self {
        (self.clone() - other.clone()).abs()
    }
}

/// Parses a decimal (`0.347297`, `1e-3`) or fraction (`1/6`) into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not an exact number: {text:?}"));
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = text[pos + 1..].parse().map_err(|_| bad())?;
            (&text[..pos], exp)
        }
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    // The extra trailing zero keeps empty digit strings parseable.
    let scale = frac_part.len() as i32 + 1 - exponent;
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        BigRational::new(digits, num_traits::pow(ten, scale as usize))
    } else {
        BigRational::from_integer(digits * num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Exact rational `num / den`.
pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
