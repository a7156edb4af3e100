//! Arbitrary-precision rationals in canonical form.
//!
//! Invariants held by every `Rational`: the denominator is strictly positive,
//! the sign lives on the numerator, gcd(|num|, den) = 1, and zero is `0/1`.
//! Arithmetic keeps results canonical using the classical cross-gcd forms, so
//! a long accumulation of terms with small denominators costs O(limbs) per
//! step instead of a full-size gcd.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rational {
    num: BigInt,
    den: BigInt,
}

/// gcd of magnitudes with a fast path when one operand fits a machine word:
/// one big-by-small division replaces the full binary gcd.
fn gcd_magnitude(x: &BigInt, y: &BigInt) -> BigInt {
    if x.is_zero() {
        return y.abs();
    }
    if y.is_zero() {
        return x.abs();
    }
    let (big, small) = if x.magnitude() >= y.magnitude() {
        (x, y)
    } else {
        (y, x)
    };
    if let Some(s) = small.magnitude().to_u64() {
        let r = (big.magnitude() % s).to_u64().expect("remainder below a u64 modulus");
        BigInt::from(gcd_u64(r, s))
    } else {
        big.gcd(small)
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    /// Builds `num/den` in canonical form. Errors when `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let num = num.into();
        let mut den = den.into();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let mut num = if den.is_negative() {
            den = -den;
            -num
        } else {
            num
        };
        if num.is_zero() {
            return Ok(Rational {
                num,
                den: BigInt::one(),
            });
        }
        let g = gcd_magnitude(&num, &den);
        if !g.is_one() {
            num /= &g;
            den /= &g;
        }
        Ok(Rational { num, den })
    }

    /// Wraps parts already known to be canonical (debug-checked).
    fn from_canonical(num: BigInt, den: BigInt) -> Self {
        debug_assert!(den.is_positive());
        // The canonicality re-check is a full gcd, quadratic in operand size;
        // restrict it to operands small enough not to distort test runtimes.
        debug_assert!(
            num.is_zero() && den.is_one()
                || num.bits().max(den.bits()) > 4096
                || gcd_magnitude(&num, &den).is_one()
        );
        Rational { num, den }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational::from_canonical(n.into(), BigInt::one())
    }

    pub fn zero() -> Self {
        Rational::from_integer(0)
    }

    pub fn one() -> Self {
        Rational::from_integer(1)
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn abs(&self) -> Self {
        Rational::from_canonical(self.num.abs(), self.den.clone())
    }

    /// Largest integer at or below `self`.
    pub fn floor(&self) -> BigInt {
        self.num.div_floor(&self.den)
    }

    /// Largest multiple of `2^-bits` at or below `self`. Keeps denominators
    /// of long accumulations bounded by `2^bits` instead of their lcm.
    pub fn dyadic_floor(&self, bits: u32) -> Rational {
        let scaled = (&self.num << bits).div_floor(&self.den);
        Rational::new(scaled, BigInt::one() << bits).expect("power of two is positive")
    }

    /// Smallest multiple of `2^-bits` at or above `self`.
    pub fn dyadic_ceil(&self, bits: u32) -> Rational {
        let scaled = (&self.num << bits).div_ceil(&self.den);
        Rational::new(scaled, BigInt::one() << bits).expect("power of two is positive")
    }

    /// `1/self`. Errors on zero.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (num, den) = if self.num.is_negative() {
            (-self.den.clone(), -self.num.clone())
        } else {
            (self.den.clone(), self.num.clone())
        };
        Ok(Rational::from_canonical(num, den))
    }

    /// `self^exp` by exponentiating the canonical parts. Errors on `0^0`.
    pub fn pow(&self, exp: u64) -> Result<Self> {
        if exp == 0 {
            if self.is_zero() {
                return Err(Error::ZeroPowZero);
            }
            return Ok(Rational::one());
        }
        Ok(Rational::from_canonical(
            pow_bigint(&self.num, exp),
            pow_bigint(&self.den, exp),
        ))
    }

    fn add_signed(&self, other: &Self, negate_other: bool) -> Self {
        let c = if negate_other {
            -other.num.clone()
        } else {
            other.num.clone()
        };
        let g = gcd_magnitude(&self.den, &other.den);
        if g.is_one() {
            let num = &self.num * &other.den + &c * &self.den;
            if num.is_zero() {
                return Rational::zero();
            }
            let den = &self.den * &other.den;
            return Rational::from_canonical(num, den);
        }
        let db = &other.den / &g;
        let bg = &self.den / &g;
        let t = &self.num * &db + &c * &bg;
        if t.is_zero() {
            return Rational::zero();
        }
        let den = &self.den * &db;
        let g2 = gcd_magnitude(&t, &g);
        if g2.is_one() {
            Rational::from_canonical(t, den)
        } else {
            Rational::from_canonical(&t / &g2, &den / &g2)
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Rational::zero();
        }
        let g1 = gcd_magnitude(&self.num, &other.den);
        let g2 = gcd_magnitude(&other.num, &self.den);
        let num = (&self.num / &g1) * (&other.num / &g2);
        let den = (&self.den / &g2) * (&other.den / &g1);
        Rational::from_canonical(num, den)
    }

    /// Truncated decimal expansion with `digits` fractional places, for
    /// human-facing display only; certified comparisons never go through this.
    pub fn to_decimal(&self, digits: usize) -> String {
        let mag = self.num.magnitude();
        let den = self.den.magnitude();
        let (int_part, rem) = mag.div_rem(den);
        let scale = BigUint::from(10u32).pow(digits as u32);
        let frac = (rem * &scale) / den;
        let mut frac_str = frac.to_string();
        while frac_str.len() < digits {
            frac_str.insert(0, '0');
        }
        let sign = if self.num.is_negative() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_str}")
        }
    }
}

fn pow_bigint(base: &BigInt, mut exp: u64) -> BigInt {
    let mut result = BigInt::one();
    let mut sq = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            result *= &sq;
        }
        exp >>= 1;
        if exp > 0 {
            sq = &sq * &sq;
        }
    }
    result
}

impl Add for &Rational {
    type Output = Rational;

    fn add(self, rhs: &Rational) -> Rational {
        self.add_signed(rhs, false)
    }
}

impl Sub for &Rational {
    type Output = Rational;

    fn sub(self, rhs: &Rational) -> Rational {
        self.add_signed(rhs, true)
    }
}

impl Mul for &Rational {
    type Output = Rational;

    fn mul(self, rhs: &Rational) -> Rational {
        self.mul_impl(rhs)
    }
}

impl Div for &Rational {
    type Output = Rational;

    /// Panics on a zero divisor, like integer division; use `recip` for a
    /// checked path.
    fn div(self, rhs: &Rational) -> Rational {
        self.mul_impl(&rhs.recip().expect("division by zero"))
    }
}

impl Neg for &Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        Rational::from_canonical(-self.num.clone(), self.den.clone())
    }
}

macro_rules! forward_owned_binop {
    ($($trait:ident, $method:ident;)*) => {$(
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $trait::$method(&self, &rhs)
            }
        }
    )*};
}

forward_owned_binop! {
    Add, add;
    Sub, sub;
    Mul, mul;
    Div, div;
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        let ls = self.num.sign();
        let rs = other.num.sign();
        if ls != rs {
            return match (ls, rs) {
                (Sign::Minus, _) | (Sign::NoSign, Sign::Plus) => Ordering::Less,
                (Sign::Plus, _) | (Sign::NoSign, Sign::Minus) => Ordering::Greater,
                _ => unreachable!("signs compared equal and unequal"),
            };
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseRational(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => {
                let num = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let den = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                Rational::new(num, den)
            }
            None => {
                let num = BigInt::from_str(s.trim()).map_err(|_| bad())?;
                Ok(Rational::from_integer(num))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(num: i64, den: i64) -> Rational {
        Rational::new(num, den).unwrap()
    }

    #[test]
    fn construction_reduces_and_normalizes_sign() {
        let x = r(72, 100);
        assert_eq!(x.numer(), &BigInt::from(18));
        assert_eq!(x.denom(), &BigInt::from(25));

        let y = r(3, -4);
        assert_eq!(y.numer(), &BigInt::from(-3));
        assert_eq!(y.denom(), &BigInt::from(4));

        let z = r(0, 7);
        assert_eq!(z.numer(), &BigInt::from(0));
        assert_eq!(z.denom(), &BigInt::from(1));

        let w = r(-6, -8);
        assert_eq!(w.numer(), &BigInt::from(3));
        assert_eq!(w.denom(), &BigInt::from(4));
    }

    #[test]
    fn zero_denominator_is_rejected() {
        assert!(matches!(
            Rational::new(1, 0),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn multiplication_cancels_cross_factors() {
        assert_eq!(r(3, 4) * r(8, 9), r(2, 3));
        assert_eq!(r(-3, 4) * r(8, 9), r(-2, 3));
        assert_eq!(r(5, 7) * r(0, 3), Rational::zero());
    }

    #[test]
    fn subtraction_matches_worked_example() {
        assert_eq!(r(3, 4) - r(12, 19), r(9, 76));
        assert_eq!(r(1, 3) - r(1, 3), Rational::zero());
        assert_eq!(r(1, 6) + r(1, 10), r(4, 15));
    }

    #[test]
    fn ordering_is_by_value() {
        assert!(r(2, 3) < r(3, 4));
        assert!(r(-1, 2) < r(1, 1000));
        assert_eq!(r(4, 6).cmp(&r(2, 3)), Ordering::Equal);
        assert!(r(-3, 4) < r(-2, 3));
    }

    #[test]
    fn powers() {
        assert_eq!(r(3, 4).pow(2).unwrap(), r(9, 16));
        assert_eq!(Rational::from(2u64).pow(10).unwrap(), Rational::from(1024u64));
        assert_eq!(r(-2, 3).pow(3).unwrap(), r(-8, 27));
        assert_eq!(r(5, 9).pow(0).unwrap(), Rational::one());
        assert!(matches!(
            Rational::zero().pow(0),
            Err(Error::ZeroPowZero)
        ));
        assert_eq!(Rational::zero().pow(5).unwrap(), Rational::zero());
    }

    #[test]
    fn reciprocal() {
        assert_eq!(r(3, 4).recip().unwrap(), r(4, 3));
        assert_eq!(r(-3, 4).recip().unwrap(), r(-4, 3));
        assert!(Rational::zero().recip().is_err());
    }

    #[test]
    fn division() {
        assert_eq!(r(3, 4) / r(9, 2), r(1, 6));
    }

    #[test]
    fn display_and_parse_round_trip() {
        for x in [r(2, 21), r(-9, 76), Rational::zero(), r(1234567, 1)] {
            assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
        }
        assert_eq!("3".parse::<Rational>().unwrap(), r(3, 1));
        assert_eq!("-4/6".parse::<Rational>().unwrap(), r(-2, 3));
        assert!("".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("a/b".parse::<Rational>().is_err());
        assert!("1.5".parse::<Rational>().is_err());
    }

    #[test]
    fn serde_uses_num_den_strings() {
        let x = r(2, 21);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "\"2/21\"");
        let back: Rational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn decimal_rendering_truncates() {
        assert_eq!(r(1, 3).to_decimal(4), "0.3333");
        assert_eq!(r(-7, 4).to_decimal(2), "-1.75");
        assert_eq!(r(5, 1).to_decimal(0), "5");
        assert_eq!(r(1, 1000).to_decimal(4), "0.0010");
    }

    #[test]
    fn gcd_fast_path_agrees_with_generic() {
        let big: BigInt = BigInt::from(3u64).pow(200u32) * BigInt::from(1024u32);
        let small = BigInt::from(720u32);
        assert_eq!(gcd_magnitude(&big, &small), big.gcd(&small));
        assert_eq!(gcd_magnitude(&small, &big), big.gcd(&small));
        assert_eq!(gcd_magnitude(&BigInt::from(0), &small), small);
    }
}
