//! Exact rational numbers.
//!
//! Every value in the crate is a [`Rational`]; there is no floating point in
//! any comparison. Text input accepts `a/b` fractions and decimal literals,
//! both parsed exactly (`"0.2"` is `1/5`).

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty number")]
    Empty,
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("malformed number {0:?}")]
    Malformed(String),
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Builds a vector of rationals from `(numerator, denominator)` pairs.
pub fn fracs(pairs: &[(i64, i64)]) -> Vec<Rational> {
    pairs.iter().map(|&(n, d)| frac(n, d)).collect()
}

/// Builds a vector of integral rationals.
pub fn ints(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| int(v)).collect()
}

fn parse_integer(s: &str, whole: &str) -> Result<BigInt, ParseRationalError> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Malformed(whole.to_string()));
    }
    BigInt::from_str(s).map_err(|_| ParseRationalError::Malformed(whole.to_string()))
}

/// Parses `a/b`, an integer, or a decimal literal (`-0.125`, `.5`, `3.`)
/// into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num.trim(), s)?;
        let den = parse_integer(den.trim(), s)?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, fraction) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && fraction.is_empty()
        || !whole.bytes().all(|b| b.is_ascii_digit())
        || !fraction.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(ParseRationalError::Malformed(s.to_string()));
    }
    let digits = format!("{whole}{fraction}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
    let den = num_traits::pow(BigInt::from(10), fraction.len());
    let value = Rational::new(num, den);
    Ok(if negative { -value } else { value })
}

/// Canonical `a/b` rendering; integers render without a denominator.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// Fixed-point approximation with `places` digits, prefixed by `~` to mark it
/// as approximate. Rounds half away from zero.
pub fn format_decimal(value: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = value * Rational::from_integer(scale.clone());
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let rounded = if scaled.is_negative() {
        -(-scaled + half).floor()
    } else {
        (scaled + half).floor()
    }
    .to_integer();
    let negative = rounded.is_negative();
    let digits = rounded.abs().to_string();
    let body = if places == 0 {
        digits
    } else {
        let padded = format!("{digits:0>width$}", width = places + 1);
        let (int_part, frac_part) = padded.split_at(padded.len() - places);
        format!("{int_part}.{frac_part}")
    };
    format!("~{}{body}", if negative { "-" } else { "" })
}

pub fn format_vector(values: &[Rational]) -> String {
    let parts: Vec<String> = values.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}
