//! Exact rational helpers: decimal literal parsing and canonical printing.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `3`, `-2`, `0.75`, `1/3` and `-1/3` exactly. Returns `None` for anything else.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    if body.is_empty() {
        return None;
    }
    let value = if let Some((num, den)) = body.split_once('/') {
        let num = parse_digits(num)?;
        let den = parse_digits(den)?;
        if den.is_zero() {
            return None;
        }
        Rational::new(num, den)
    } else if let Some((whole, frac)) = body.split_once('.') {
        let whole = parse_digits(whole)?;
        if frac.is_empty() {
            return None;
        }
        let digits = parse_digits(frac)?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        Rational::from_integer(whole) + Rational::new(digits, scale)
    } else {
        Rational::from_integer(parse_digits(body)?)
    };
    Some(if negative { -value } else { value })
}

fn parse_digits(text: &str) -> Option<BigInt> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// Canonical text for a rational: a terminating decimal when one exists
/// (`3`, `0.75`, `-2.5`), otherwise a reduced fraction (`1/3`).
pub fn format_rational(value: &Rational) -> String {
    let denom = value.denom().clone();
    if denom.is_one() {
        return value.numer().to_string();
    }
    let mut rest = denom.clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&rest % &two).is_zero() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{}/{}", value.numer(), denom);
    }
    let places = twos.max(fives);
    let scaled = value.numer().abs() * num_traits::pow(BigInt::from(10), places) / denom;
    let mut digits = scaled.to_string();
    if digits.len() <= places {
        digits = format!("{}{}", "0".repeat(places + 1 - digits.len()), digits);
    }
    let split = digits.len() - places;
    let (whole, frac) = digits.split_at(split);
    let frac = frac.trim_end_matches('0');
    let sign = if value.is_negative() { "-" } else { "" };
    format!("{sign}{whole}.{frac}")
}
