use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(q: &Rational) -> f64 {
    // Large coefficients overflow the naive numer/denom quotient.
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = q.numer().bits().max(q.denom().bits()) as i64 - 900;
            let scale = |x: &BigInt| -> f64 {
                if shift > 0 {
                    (x >> shift as usize).to_f64().unwrap_or(0.0)
                } else {
                    x.to_f64().unwrap_or(0.0)
                }
            };
            scale(q.numer()) / scale(q.denom())
        }
    }
}

/// Parses `n`, `-n`, `n/d` and finite decimals such as `2.5` or `-0.125`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let whole_digits = whole.trim().trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !whole_digits.chars().all(|c| c.is_ascii_digit())
            || (whole_digits.is_empty() && frac.is_empty())
        {
            return None;
        }
        let w: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            whole_digits.parse().ok()?
        };
        let f: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().ok()?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Rational::new(w * &scale + f, scale);
        return Some(if negative { -mag } else { mag });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("3/8"), Some(rat(3, 8)));
        assert_eq!(parse_rational("-6/16"), Some(rat(-3, 8)));
        assert_eq!(parse_rational("2.5"), Some(rat(5, 2)));
        assert_eq!(parse_rational("-0.125"), Some(rat(-1, 8)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn huge_values_convert() {
        let big = Rational::from_integer(num_traits::pow(BigInt::from(10), 400));
        let q = &big / (&big * int(4));
        assert!((to_f64(&q) - 0.25).abs() < 1e-15);
    }
}
