use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Parse `a`, `a/b`, or a finite decimal such as `0.9` or `-1.25e-3` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
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
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut v = BigRational::from_integer(all);
    if scale >= 0 {
        v *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        v /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -v } else { v })
}

/// Exact square root of a non-negative rational, when one exists.
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| BigRational::new(n, d))
}

pub(crate) fn is_unit_interval(x: &BigRational) -> bool {
    x.is_positive() && *x <= BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn forms() {
        assert_eq!(parse_rational("1/2"), Some(q(1, 2)));
        assert_eq!(parse_rational(" -3 / 6 "), Some(q(-1, 2)));
        assert_eq!(parse_rational("0.9"), Some(q(9, 10)));
        assert_eq!(parse_rational("-1.25e-3"), Some(q(-1, 800)));
        assert_eq!(parse_rational("2e2"), Some(q(200, 1)));
        assert_eq!(parse_rational("7"), Some(q(7, 1)));
        assert_eq!(parse_rational(".5"), Some(q(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn square_roots() {
        assert_eq!(rational_sqrt(&q(9, 16)), Some(q(3, 4)));
        assert_eq!(rational_sqrt(&q(1, 2)), None);
        assert_eq!(rational_sqrt(&q(-1, 4)), None);
    }
}
