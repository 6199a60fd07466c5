//! Exact arbitrary-precision rationals, plus the extended variant with +∞.
//!
//! Every distance, threshold and tolerance in this crate is a [`Rat`]. There is
//! no floating-point fallback anywhere: all comparisons and arithmetic are
//! exact, so triangle-inequality checks can never suffer rounding artifacts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    /// Builds `numer/denom`. Panics if `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Rat {
        assert!(denom != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn min(self, other: Rat) -> Rat {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rat) -> Rat {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Denominator as u64 when it fits; useful for grid bounds.
    pub fn denom_u64(&self) -> Option<u64> {
        u64::try_from(self.0.denom().clone()).ok()
    }

    /// Smallest integer `>= self`.
    pub fn ceil_int(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Largest integer `<= self`.
    pub fn floor_int(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn from_bigint_ratio(numer: BigInt, denom: BigInt) -> Rat {
        assert!(!denom.is_zero(), "zero denominator");
        Rat(BigRational::new(numer, denom))
    }

    /// Canonical machine form `p/q`, always with the explicit denominator.
    pub fn frac(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{input}`: {reason}")]
pub struct ParseRatError {
    pub input: String,
    pub reason: String,
}

impl FromStr for Rat {
    type Err = ParseRatError;

    /// Accepts `int` or `int/posint` (optionally signed numerator).
    fn from_str(s: &str) -> Result<Rat, ParseRatError> {
        let bad = |reason: &str| ParseRatError {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let s = s.trim();
        if s.is_empty() {
            return Err(bad("empty string"));
        }
        match s.split_once('/') {
            None => {
                let n = BigInt::from_str(s).map_err(|_| bad("not an integer"))?;
                Ok(Rat(BigRational::from_integer(n)))
            }
            Some((p, q)) => {
                let p = BigInt::from_str(p.trim()).map_err(|_| bad("bad numerator"))?;
                let q = BigInt::from_str(q.trim()).map_err(|_| bad("bad denominator"))?;
                if q <= BigInt::zero() {
                    return Err(bad("denominator must be positive"));
                }
                Ok(Rat(BigRational::new(p, q)))
            }
        }
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat((self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

/// Shorthand for `Rat::new(p, q)`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(p, q)
}

/// The rational with the smallest denominator (ties broken by smallest
/// numerator) within the bounds, or `None` when the range is empty.
/// `hi = None` means unbounded above. Runs in continued-fraction time, so
/// arbitrarily narrow windows are cheap. Requires `lo >= 0`.
pub fn simplest_in(lo: &Rat, lo_strict: bool, hi: Option<(&Rat, bool)>) -> Option<Rat> {
    assert!(!lo.is_negative());
    if let Some((h, h_strict)) = hi {
        if h < lo || (h == lo && (lo_strict || h_strict)) {
            return None;
        }
    }
    Some(simplest_rec(lo, lo_strict, hi))
}

fn simplest_rec(lo: &Rat, lo_strict: bool, hi: Option<(&Rat, bool)>) -> Rat {
    // Smallest admissible integer, if any.
    let mut a = lo.ceil_int();
    if lo_strict && lo.is_integer() {
        a += 1;
    }
    let cand = Rat(BigRational::from_integer(a));
    let integer_ok = match hi {
        None => true,
        Some((h, h_strict)) => cand < *h || (cand == *h && !h_strict),
    };
    if integer_ok {
        return cand;
    }
    // No integer fits: the range lies strictly inside (fl, fl+1) except
    // possibly touching fl from above. Invert the fractional part and
    // recurse; x in range iff 1/(x - fl) lies between the inverted bounds
    // with the strictness flags carried over.
    let fl = Rat(BigRational::from_integer(lo.floor_int()));
    let (h, h_strict) = hi.expect("unbounded ranges always contain an integer");
    let y_lo = Rat::one() / (h - &fl);
    let frac = lo - &fl;
    let y_hi = if frac.is_positive() {
        Some((Rat::one() / frac, lo_strict))
    } else {
        // lo is the integer fl itself (strict, since no integer fit).
        None
    };
    let y = simplest_rec(&y_lo, h_strict, y_hi.as_ref().map(|(b, s)| (b, *s)));
    let x = &fl + &(Rat::one() / y);
    // Minimal numerator at the found denominator.
    let d = x.denom().clone();
    let mut p = (lo * &Rat(BigRational::from_integer(d.clone()))).ceil_int();
    if lo_strict && Rat::from_bigint_ratio(p.clone(), d.clone()) == *lo {
        p += 1;
    }
    let least = Rat::from_bigint_ratio(p, d);
    debug_assert!(least <= x);
    least
}

/// Shorthand for an integer rational.
pub fn int(n: i64) -> Rat {
    Rat::from_int(n)
}

/// A rational extended with +∞, used for ray endpoints, unbounded caps and
/// empty-minimum sentinels.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum XRat {
    Finite(Rat),
    Infinity,
}

impl XRat {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            XRat::Finite(r) => Some(r),
            XRat::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, XRat::Infinity)
    }

    pub fn frac(&self) -> String {
        match self {
            XRat::Finite(r) => r.frac(),
            XRat::Infinity => "inf".to_string(),
        }
    }
}

impl PartialOrd for XRat {
    fn partial_cmp(&self, other: &XRat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for XRat {
    fn cmp(&self, other: &XRat) -> Ordering {
        match (self, other) {
            (XRat::Infinity, XRat::Infinity) => Ordering::Equal,
            (XRat::Infinity, XRat::Finite(_)) => Ordering::Greater,
            (XRat::Finite(_), XRat::Infinity) => Ordering::Less,
            (XRat::Finite(a), XRat::Finite(b)) => a.cmp(b),
        }
    }
}

impl From<Rat> for XRat {
    fn from(r: Rat) -> XRat {
        XRat::Finite(r)
    }
}

impl fmt::Display for XRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XRat::Finite(r) => write!(f, "{r}"),
            XRat::Infinity => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let a = rat(1, 3);
        let b = rat(1, 6);
        assert_eq!(&a + &b, rat(1, 2));
        assert_eq!(&a - &b, rat(1, 6));
        assert_eq!(&a * &b, rat(1, 18));
        assert_eq!(&a / &b, int(2));
    }

    #[test]
    fn lowest_terms_and_order() {
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(-2, 4).frac(), "-1/2");
        assert!(rat(1, 3) < rat(1, 2));
        assert!(int(2) > rat(3, 2));
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["0/1", "7/3", "-5/2", "12/1"] {
            let r: Rat = s.parse().unwrap();
            assert_eq!(r.frac(), s);
        }
        assert_eq!("4".parse::<Rat>().unwrap(), int(4));
        assert_eq!("6/4".parse::<Rat>().unwrap().frac(), "3/2");
        assert!("1/0".parse::<Rat>().is_err());
        assert!("1/-2".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    #[test]
    fn xrat_order() {
        assert!(XRat::Finite(int(1_000_000)) < XRat::Infinity);
        assert_eq!(XRat::Infinity, XRat::Infinity);
        assert!(XRat::Finite(rat(1, 2)) < XRat::Finite(int(1)));
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(rat(7, 2).floor_int(), BigInt::from(3));
        assert_eq!(rat(7, 2).ceil_int(), BigInt::from(4));
        assert_eq!(rat(-7, 2).floor_int(), BigInt::from(-4));
        assert_eq!(rat(-7, 2).ceil_int(), BigInt::from(-3));
        assert_eq!(int(3).ceil_int(), BigInt::from(3));
    }
}
