//! Shared numeric helpers: fraction strings, binomials, integer powers,
//! decimal approximation of exact rationals, composition enumeration.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

/// Reduced fraction as text: `"p"` when the denominator is 1, else `"p/q"`.
pub fn ratio_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"` or `"p/q"` into an exact rational.
pub fn ratio_from_string(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num).map_err(|_| format!("invalid integer `{num}`"))?;
    let d = BigInt::from_str(den).map_err(|_| format!("invalid integer `{den}`"))?;
    if d.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(BigRational::new(n, d))
}

/// Binomial coefficient C(n, k) as an exact integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `base^exp` by binary exponentiation for u64 exponents.
pub fn biguint_pow(base: &BigUint, exp: u64) -> BigUint {
    let mut result = BigUint::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

/// Exact power of a reduced rational. Components stay coprime, so no
/// re-reduction is needed.
pub fn ratio_pow(r: &BigRational, exp: u32) -> BigRational {
    BigRational::new_raw(r.numer().pow(exp), r.denom().pow(exp))
}

/// Truncated scientific-notation rendering of an exact rational with `sig`
/// significant digits, e.g. `"2.3841e-7"`. Exact integer arithmetic only.
pub fn approx_decimal(r: &BigRational, sig: usize) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0".into();
    }
    let neg = r.is_negative();
    let a = r.numer().abs().to_biguint().expect("abs");
    let b = r.denom().to_biguint().expect("positive denominator");
    let est = a.to_string().len() as i64 - b.to_string().len() as i64;
    let mut shift = sig as i64 - 1 - est;
    let ten = BigUint::from(10u32);
    let lo = biguint_pow(&ten, (sig - 1) as u64);
    let hi = &lo * &ten;
    let mantissa_at = |k: i64| -> BigUint {
        if k >= 0 {
            &a * biguint_pow(&ten, k as u64) / &b
        } else {
            &a / (&b * biguint_pow(&ten, (-k) as u64))
        }
    };
    let mut m = mantissa_at(shift);
    while m < lo {
        shift += 1;
        m = mantissa_at(shift);
    }
    while m >= hi {
        shift -= 1;
        m = mantissa_at(shift);
    }
    let exp10 = sig as i64 - 1 - shift;
    let digits = m.to_string();
    let body = if sig == 1 {
        digits
    } else {
        format!("{}.{}", &digits[..1], &digits[1..])
    };
    let sign = if neg { "-" } else { "" };
    if (-3..6).contains(&exp10) && r.denom().to_f64().is_some_and(|d| d < 1e12) {
        // Small magnitudes read better without an exponent.
        match r.to_f64() {
            Some(v) => format!("{v:.6}"),
            None => format!("{sign}{body}e{exp10}"),
        }
    } else {
        format!("{sign}{body}e{exp10}")
    }
}

/// Iterator over all compositions of `total` into `parts` nonnegative
/// integers, in colex order: `(total,0,...,0)` first, `(0,...,0,total)` last.
pub struct Compositions {
    next: Option<Vec<u64>>,
}

impl Compositions {
    pub fn new(total: u64, parts: usize) -> Self {
        assert!(parts >= 1);
        let mut first = vec![0u64; parts];
        first[0] = total;
        Compositions { next: Some(first) }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let n = current.len();
        // Advance: move one unit from the leftmost nonzero entry to its right
        // neighbour, dumping the remainder back into position 0.
        let i = current.iter().position(|&k| k > 0).unwrap_or(n - 1);
        if i + 1 < n {
            let mut succ = current.clone();
            let v = succ[i];
            succ[i] = 0;
            succ[i + 1] += 1;
            succ[0] = v - 1;
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// Serde adapter for exact rationals as fraction strings.
pub mod serde_ratio {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&ratio_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        ratio_from_string(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn fraction_strings_round_trip() {
        for (n, d) in [(1i64, 2i64), (-3, 4), (7, 1), (0, 5)] {
            let r = rat(n, d);
            assert_eq!(ratio_from_string(&ratio_to_string(&r)).unwrap(), r);
        }
        assert!(ratio_from_string("1/0").is_err());
        assert!(ratio_from_string("x").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 1), BigUint::from(3u32));
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(2, 5), BigUint::zero());
        // C(d+n-1, n-1) monomial counts used throughout.
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
    }

    #[test]
    fn approx_decimal_renders() {
        let r = BigRational::new(BigInt::from(1), BigInt::from(4194304));
        assert_eq!(approx_decimal(&r, 5), "2.3841e-7");
        let r = rat(-1, 4);
        assert!(approx_decimal(&r, 5).starts_with("-0.25"));
    }

    #[test]
    fn compositions_colex_order() {
        let got: Vec<Vec<u64>> = Compositions::new(2, 3).collect();
        assert_eq!(
            got,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![0, 1, 1],
                vec![0, 0, 2],
            ]
        );
        assert_eq!(Compositions::new(60, 2).count(), 61);
        assert_eq!(Compositions::new(0, 4).count(), 1);
    }
}
