//! Exact scalars.
//!
//! [`Rational`] wraps `num_rational::BigRational`, which already keeps the
//! canonical form (reduced, positive denominator) after every operation. The
//! wrapper fixes the text format (`num/den`) and adds the handful of helpers
//! the rest of the crate needs.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    pub fn from_biguint(n: BigUint) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`, reduced.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num.into(), den.into())))
    }

    pub fn from_parts(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    /// `bits / 2^64`, a point of the dyadic grid in `[0, 1)`.
    pub fn dyadic_unit(bits: u64) -> Self {
        Rational(BigRational::new(BigInt::from(bits), BigInt::one() << 64))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn floor(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    pub fn floor_rational(&self) -> Rational {
        Rational::from_big(self.floor())
    }

    /// The value as a `u64` when it is a non-negative integer that fits.
    pub fn to_u64_exact(&self) -> Option<u64> {
        if self.is_integer() {
            self.0.numer().to_u64()
        } else {
            None
        }
    }

    /// Lossy conversion, statistics output only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn checked_div(&self, other: &Rational) -> Result<Rational> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &other.0))
    }

    pub fn min(self, other: Rational) -> Rational {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Rational) -> Rational {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Accepts `n`, `n/d` and finite decimals such as `2.5` or `-0.125`.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseRational(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let num = parse_int(n.trim()).ok_or_else(bad)?;
            let d = d.trim();
            if d.starts_with(['-', '+']) {
                return Err(bad());
            }
            let den = parse_int(d).ok_or_else(bad)?;
            if den.is_zero() {
                return Err(bad());
            }
            return Ok(Rational(BigRational::new(num, den)));
        }
        if let Some((whole, frac)) = t.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = whole.starts_with('-');
            let whole_digits = whole.strip_prefix(['-', '+']).unwrap_or(whole);
            if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let joined = format!("{whole_digits}{frac}");
            let mut num: BigInt = joined.parse().map_err(|_| bad())?;
            if negative {
                num = -num;
            }
            let den = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(Rational(BigRational::new(num, den)));
        }
        parse_int(t)
            .map(|n| Rational(BigRational::from_integer(n)))
            .ok_or_else(bad)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$m(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
// Panics on a zero divisor like the integer types do; use `checked_div` on
// untrusted input.
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// A rational extended with both infinities. Variant order gives the total
/// order `-inf < finite < +inf`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtendedRational {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

impl ExtendedRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedRational::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedRational::Finite(_))
    }

    /// Sum, with `+inf + -inf` resolved to `None`.
    pub fn checked_add(&self, other: &ExtendedRational) -> Option<ExtendedRational> {
        use ExtendedRational::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
            (PosInfinity, NegInfinity) | (NegInfinity, PosInfinity) => None,
            (PosInfinity, _) | (_, PosInfinity) => Some(PosInfinity),
            (NegInfinity, _) | (_, NegInfinity) => Some(NegInfinity),
        }
    }

    pub fn negate(&self) -> ExtendedRational {
        use ExtendedRational::*;
        match self {
            Finite(a) => Finite(-a),
            PosInfinity => NegInfinity,
            NegInfinity => PosInfinity,
        }
    }
}

impl From<Rational> for ExtendedRational {
    fn from(r: Rational) -> Self {
        ExtendedRational::Finite(r)
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::NegInfinity => f.write_str("-inf"),
            ExtendedRational::Finite(r) => write!(f, "{r}"),
            ExtendedRational::PosInfinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" => Ok(ExtendedRational::PosInfinity),
            "-inf" => Ok(ExtendedRational::NegInfinity),
            t => t.parse().map(ExtendedRational::Finite),
        }
    }
}

/// `⌈log₂ n⌉` for `n ≥ 1`; `0` for `n ≤ 1`.
pub fn ceil_log2(n: u128) -> u32 {
    if n <= 1 {
        0
    } else {
        128 - (n - 1).leading_zeros()
    }
}

/// `⌈log₂ n⌉` for arbitrary-size counts.
pub fn ceil_log2_big(n: &BigUint) -> u64 {
    if n <= &BigUint::one() {
        return 0;
    }
    let m: BigUint = n - 1u32;
    m.bits()
}

/// Binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_and_prints() {
        assert_eq!(q("6/4").to_string(), "3/2");
        assert_eq!(q("2.5"), q("5/2"));
        assert_eq!(q("-0.125"), q("-1/8"));
        assert_eq!(q(" 7 ").to_string(), "7/1");
        assert_eq!(q("-3/6"), q("-1/2"));
        for bad in ["", "/", "1/0", "1/-2", "a", "1.", ".5x", "1/2/3", "--1", "1.2.3"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn round_trips_display() {
        for s in ["0", "-17/5", "13040", "1/340282366920938463463374607431768211456"] {
            let r = q(s);
            assert_eq!(q(&r.to_string()), r);
        }
    }

    #[test]
    fn floor_rounds_down() {
        assert_eq!(q("5/2").floor(), BigInt::from(2));
        assert_eq!(q("-5/2").floor(), BigInt::from(-3));
        assert_eq!(q("3").floor(), BigInt::from(3));
    }

    #[test]
    fn extended_order() {
        use ExtendedRational::*;
        let mut v = vec![PosInfinity, Finite(q("3")), NegInfinity, Finite(q("-2"))];
        v.sort();
        assert_eq!(v, vec![NegInfinity, Finite(q("-2")), Finite(q("3")), PosInfinity]);
        assert_eq!("inf".parse::<ExtendedRational>().unwrap(), PosInfinity);
        assert_eq!(PosInfinity.checked_add(&NegInfinity), None);
    }

    #[test]
    fn logs_and_binomials() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(35), 6);
        assert_eq!(ceil_log2_big(&BigUint::from(35u32)), 6);
        assert_eq!(ceil_log2_big(&BigUint::from(64u32)), 6);
        assert_eq!(ceil_log2_big(&BigUint::from(1u32)), 0);
        assert_eq!(binomial(7, 4), BigUint::from(35u32));
        assert_eq!(binomial(3, 2), BigUint::from(3u32));
        assert_eq!(binomial(2, 5), BigUint::zero());
    }

    #[test]
    fn dyadic_unit_in_range() {
        assert_eq!(Rational::dyadic_unit(0), Rational::zero());
        assert!(Rational::dyadic_unit(u64::MAX) < Rational::one());
        assert_eq!(Rational::dyadic_unit(1 << 63), q("1/2"));
    }
}
