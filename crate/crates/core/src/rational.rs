//! Exact rational scalars.
//!
//! All core math runs on [`Rational`], an arbitrary-precision fraction kept in
//! canonical form (positive denominator, coprime parts). Decimal numerals are
//! converted exactly, so `0.1` becomes `1/10`.

use alloc::string::String;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision exact fraction.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty numeral")]
    Empty,
    #[error("malformed numeral `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"-0.125"`, `"4/3"`, `"7"`, `"+2.50"` or `"-3/-4"` into an exact rational.
///
/// Fraction parts may themselves be decimals (`"0.5/3"`).
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    match text.split_once('/') {
        Some((num, den)) => {
            let num = parse_decimal(num.trim()).ok_or_else(|| malformed(text))?;
            let den = parse_decimal(den.trim()).ok_or_else(|| malformed(text))?;
            if den.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(text.into()));
            }
            Ok(num / den)
        }
        None => parse_decimal(text).ok_or_else(|| malformed(text)),
    }
}

fn malformed(text: &str) -> ParseRationalError {
    ParseRationalError::Malformed(text.into())
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let (negative, body) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return None;
    }
    let mut digits = String::with_capacity(int_part.len() + frac_part.len() + 1);
    digits.push_str(int_part);
    digits.push_str(frac_part);
    if digits.is_empty() {
        digits.push('0');
    }
    let numer = BigInt::from_str(&digits).ok()?;
    let denom = num_traits::pow(BigInt::from(10u8), frac_part.len());
    let value = Rational::new(numer, denom);
    Some(if negative { -value } else { value })
}

/// Renders as `a/b`, or `a` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    alloc::format!("{value}")
}

/// Renders a decimal approximation with `places` digits after the point, rounding
/// toward zero. Used for human-facing summaries only; exact values stay `a/b`.
pub fn format_decimal(value: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u8), places);
    let scaled = (value.abs() * Rational::from_integer(scale.clone())).trunc().to_integer();
    let int_part = &scaled / &scale;
    let frac_part = &scaled % &scale;
    let sign = if value.is_negative() && !scaled.is_zero() { "-" } else { "" };
    if places == 0 {
        return alloc::format!("{sign}{int_part}");
    }
    let frac = alloc::format!("{frac_part}");
    let pad = "0".repeat(places - frac.len());
    alloc::format!("{sign}{int_part}.{pad}{frac}")
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `numer / denom`; panics if `denom == 0`.
pub fn frac(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}
