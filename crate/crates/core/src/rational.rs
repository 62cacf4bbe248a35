//! Exact rational helpers shared by the explicit-mode code paths.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.45`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{whole_digits}{frac}");
        let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(num, den);
        return Some(if negative { -value } else { value });
    }
    let num: BigInt = text.parse().ok()?;
    Some(Rational::from_integer(num))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Huge numerators and denominators: scale both down before dividing.
        let shift = value.numer().bits().max(value.denom().bits()).saturating_sub(1000);
        let num = (value.numer() >> shift).to_f64().unwrap_or(0.0);
        let den = (value.denom() >> shift).to_f64().unwrap_or(1.0);
        num / den
    })
}

/// Closest rational with denominator `10^digits`; used to turn f64 parameters into exact ones.
pub fn from_f64(value: f64, digits: u32) -> Rational {
    let scale = 10i64.pow(digits);
    rat((value * scale as f64).round() as i64, scale)
}

pub fn pow(base: &Rational, exp: usize) -> Rational {
    num_traits::pow(base.clone(), exp)
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn is_probability(value: &Rational) -> bool {
    !value.is_negative() && value <= &Rational::one()
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("3/9"), Some(rat(1, 3)));
        assert_eq!(parse_rational("0.45"), Some(rat(9, 20)));
        assert_eq!(parse_rational("-1.5"), Some(rat(-3, 2)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("1."), None);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(64, 2), BigInt::from(2016));
        assert_eq!(binomial(5, 7), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }

    #[test]
    fn f64_of_huge_ratio() {
        let big = Rational::new(num_traits::pow(BigInt::from(3), 900), num_traits::pow(BigInt::from(3), 901));
        assert!((to_f64(&big) - 1.0 / 3.0).abs() < 1e-12);
    }
}
