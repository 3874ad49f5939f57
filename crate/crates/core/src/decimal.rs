//! Decimal rendering of exact rationals.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

fn pow10(k: usize) -> BigInt {
    num_traits::pow(BigInt::from(10), k)
}

fn format_scaled(q: &BigInt, digits: usize) -> String {
    let neg = q.sign() == Sign::Minus;
    let s = q.abs().to_string();
    let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
    let (int, frac) = s.split_at(s.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// `x` rounded to `digits` places after the point, ties to even.
pub fn round_half_even(x: &BigRational, digits: usize) -> String {
    let scaled = x * BigRational::from_integer(pow10(digits));
    let (q, r) = scaled.numer().div_mod_floor(scaled.denom());
    // r / denom in [0, 1)
    let twice: BigInt = &r * 2;
    let q = match twice.cmp(scaled.denom()) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    };
    format_scaled(&q, digits)
}

/// `x` rounded toward minus infinity to `digits` places.
pub fn floor_digits(x: &BigRational, digits: usize) -> String {
    let scaled = x * BigRational::from_integer(pow10(digits));
    format_scaled(&scaled.floor().to_integer(), digits)
}

/// `x` rounded toward plus infinity to `digits` places.
pub fn ceil_digits(x: &BigRational, digits: usize) -> String {
    let scaled = x * BigRational::from_integer(pow10(digits));
    format_scaled(&scaled.ceil().to_integer(), digits)
}

/// Longest common prefix of two decimal renderings.
pub fn common_prefix<'a>(a: &'a str, b: &str) -> &'a str {
    let n = a.bytes().zip(b.bytes()).take_while(|(x, y)| x == y).count();
    &a[..n]
}

/// Number of digits after the decimal point in `prefix`.
pub fn fraction_digits(prefix: &str) -> usize {
    match prefix.find('.') {
        Some(i) => prefix.len() - i - 1,
        None => 0,
    }
}

/// Digits of `|x|` before the decimal point, at least 1.
pub fn integer_digits(x: &BigInt) -> usize {
    if x.is_zero() {
        1
    } else {
        x.abs().to_string().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn half_even_ties() {
        assert_eq!(round_half_even(&q(5, 100), 1), "0.0");
        assert_eq!(round_half_even(&q(15, 100), 1), "0.2");
        assert_eq!(round_half_even(&q(25, 100), 1), "0.2");
        assert_eq!(round_half_even(&q(251, 1000), 1), "0.3");
        assert_eq!(round_half_even(&q(-15, 100), 1), "-0.2");
        assert_eq!(round_half_even(&q(1, 3), 4), "0.3333");
        assert_eq!(round_half_even(&q(2, 3), 4), "0.6667");
        assert_eq!(round_half_even(&q(7, 2), 0), "4");
    }

    #[test]
    fn directed() {
        assert_eq!(floor_digits(&q(2, 3), 3), "0.666");
        assert_eq!(ceil_digits(&q(2, 3), 3), "0.667");
        assert_eq!(ceil_digits(&q(1, 2), 3), "0.500");
        assert_eq!(floor_digits(&q(-1, 3), 2), "-0.34");
        assert_eq!(floor_digits(&q(1234, 1), 2), "1234.00");
    }

    #[test]
    fn prefixes() {
        assert_eq!(common_prefix("0.12345", "0.12399"), "0.123");
        assert_eq!(fraction_digits("0.123"), 3);
        assert_eq!(fraction_digits("0."), 0);
        assert_eq!(integer_digits(&BigInt::from(-120)), 3);
    }
}
