//! Exact coefficient scalars and their p-adic valuation.
//!
//! Scalars are reduced rationals backed by `num-rational`. Every criterion in
//! the library needs only field operations, zero tests and valuations, so the
//! rational model exercises all of it.

use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Scalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarParseError {
    #[error("malformed scalar `{0}` (expected \"n\" or \"n/d\")")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Exponent of p, or infinity for the zero scalar.
///
/// The derived order puts every finite value below `Infinity`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(BigRational),
    Infinity,
}

impl Valuation {
    pub fn zero() -> Self {
        Valuation::Finite(BigRational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Valuation::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(x), Valuation::Finite(y)) => Valuation::Finite(x + y),
            _ => Valuation::Infinity,
        }
    }
}

impl<'a> Add<&'a Valuation> for &'a Valuation {
    type Output = Valuation;
    fn add(self, rhs: &Valuation) -> Valuation {
        self.clone() + rhs.clone()
    }
}

impl std::iter::Sum for Valuation {
    fn sum<I: Iterator<Item = Valuation>>(iter: I) -> Valuation {
        iter.fold(Valuation::zero(), |acc, v| acc + v)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

/// p-adic valuation of a scalar. `p` must be prime; the prime 2 is accepted
/// here, odd primality is enforced where modules are built.
pub fn vp(s: &Scalar, p: u64) -> Valuation {
    debug_assert!(is_prime(p));
    if s.is_zero() {
        return Valuation::Infinity;
    }
    let pb = BigInt::from(p);
    let v = int_valuation(s.numer(), &pb) - int_valuation(s.denom(), &pb);
    Valuation::from_int(v)
}

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow_int(p: u64, e: u32) -> Scalar {
    BigRational::from_integer(num_traits::pow(BigInt::from(p), e as usize))
}

/// Parses "n" or "n/d" with decimal digits and an optional leading minus on
/// the numerator. The result is reduced.
pub fn parse_scalar(text: &str) -> Result<Scalar, ScalarParseError> {
    let malformed = || ScalarParseError::Malformed(text.to_string());
    let digits = |s: &str, signed: bool| -> Result<BigInt, ScalarParseError> {
        let body = if signed { s.strip_prefix('-').unwrap_or(s) } else { s };
        if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        s.parse::<BigInt>().map_err(|_| malformed())
    };
    match text.split_once('/') {
        None => Ok(BigRational::from_integer(digits(text, true)?)),
        Some((n, d)) => {
            let n = digits(n, true)?;
            let d = digits(d, false)?;
            if d.is_zero() {
                return Err(ScalarParseError::ZeroDenominator(text.to_string()));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// Reduced textual form, "n" when the denominator is one.
pub fn format_scalar(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(vp(&int(12), 2), Valuation::from_int(2));
        assert_eq!(vp(&frac(1, 9), 3), Valuation::from_int(-2));
        assert_eq!(vp(&int(0), 5), Valuation::Infinity);
        assert_eq!(vp(&frac(-50, 3), 5), Valuation::from_int(2));
    }

    #[test]
    fn infinity_is_largest() {
        assert!(Valuation::from_int(1_000_000) < Valuation::Infinity);
        assert_eq!(Valuation::Infinity + Valuation::from_int(3), Valuation::Infinity);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_scalar("6/4").unwrap(), frac(3, 2));
        assert_eq!(parse_scalar("-7").unwrap(), int(-7));
        assert_eq!(format_scalar(&parse_scalar("-10/4").unwrap()), "-5/2");
        assert_eq!(format_scalar(&parse_scalar("8/4").unwrap()), "2");
        for bad in ["", "1/", "/2", "1/-2", "a", "1.5", "+3", " 1", "1/0"] {
            assert!(parse_scalar(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    fn nonzero_scalar() -> impl Strategy<Value = Scalar> {
        (-500i64..500, 1i64..500)
            .prop_filter("nonzero", |(n, _)| *n != 0)
            .prop_map(|(n, d)| frac(n, d))
    }

    fn any_scalar() -> impl Strategy<Value = Scalar> {
        (-500i64..500, 1i64..500).prop_map(|(n, d)| frac(n, d))
    }

    proptest! {
        #[test]
        fn valuation_is_multiplicative(x in nonzero_scalar(), y in nonzero_scalar(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            prop_assert_eq!(vp(&(&x * &y), p), vp(&x, p) + vp(&y, p));
            let inv = x.recip();
            let (Valuation::Finite(a), Valuation::Finite(b)) = (vp(&inv, p), vp(&x, p)) else { unreachable!() };
            prop_assert_eq!(a, -b);
        }

        #[test]
        fn ultrametric(x in any_scalar(), y in any_scalar(), p in prop::sample::select(vec![3u64, 5, 7])) {
            let vx = vp(&x, p);
            let vy = vp(&y, p);
            let vs = vp(&(&x + &y), p);
            let lo = vx.clone().min(vy.clone());
            prop_assert!(vs >= lo);
            if vx != vy {
                prop_assert_eq!(vs, lo);
            }
        }

        #[test]
        fn text_round_trip(x in any_scalar()) {
            prop_assert_eq!(parse_scalar(&format_scalar(&x)).unwrap(), x);
        }
    }
}
