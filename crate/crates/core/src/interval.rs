//! Closed rational intervals with conservative endpoint arithmetic.
//!
//! Endpoints are exact rationals, so the usual outward-rounding concerns of
//! floating-point interval arithmetic do not arise; every operation here is
//! exact, and enclosures only widen where a truncation bound is deliberately
//! added by the caller.

use crate::error::{Error, Result};
use crate::rational::Rational;
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalInterval {
    lo: Rational,
    hi: Rational,
}

impl RationalInterval {
    /// Builds `[lo, hi]`. Errors when the endpoints are out of order.
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::ReversedInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(RationalInterval { lo, hi })
    }

    pub fn point(value: Rational) -> Self {
        RationalInterval {
            lo: value.clone(),
            hi: value,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, value: &Rational) -> bool {
        &self.lo <= value && value <= &self.hi
    }

    pub fn contains_interval(&self, other: &RationalInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Closed intervals intersect iff neither lies strictly beyond the other.
    pub fn intersects(&self, other: &RationalInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// `[1/hi, 1/lo]`. Requires the interval to be strictly positive so the
    /// map is monotone on it.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_strictly_positive() {
            return Err(Error::NonPositiveInterval {
                lo: self.lo.to_string(),
                hi: self.hi.to_string(),
            });
        }
        Ok(RationalInterval {
            lo: self.hi.recip()?,
            hi: self.lo.recip()?,
        })
    }

    /// `[1 - hi, 1 - lo]`.
    pub fn one_minus(&self) -> Self {
        let one = Rational::one();
        RationalInterval {
            lo: &one - &self.hi,
            hi: &one - &self.lo,
        }
    }

    /// `[point - hi, point - lo]`.
    pub fn sub_from(&self, point: &Rational) -> Self {
        RationalInterval {
            lo: point - &self.hi,
            hi: point - &self.lo,
        }
    }

    /// Scales by a positive rational factor.
    pub fn scale(&self, factor: &Rational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::NonPositiveInterval {
                lo: factor.to_string(),
                hi: factor.to_string(),
            });
        }
        Ok(RationalInterval {
            lo: &self.lo * factor,
            hi: &self.hi * factor,
        })
    }

    pub fn add(&self, other: &RationalInterval) -> Self {
        RationalInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn neg(&self) -> Self {
        RationalInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    /// `[self.lo/other.hi, self.hi/other.lo]` for nonnegative `self` over
    /// strictly positive `other`.
    pub fn div(&self, other: &RationalInterval) -> Result<Self> {
        if self.lo.is_negative() {
            return Err(Error::NonPositiveInterval {
                lo: self.lo.to_string(),
                hi: self.hi.to_string(),
            });
        }
        if !other.is_strictly_positive() {
            return Err(Error::NonPositiveInterval {
                lo: other.lo.to_string(),
                hi: other.hi.to_string(),
            });
        }
        Ok(RationalInterval {
            lo: &self.lo / &other.hi,
            hi: &self.hi / &other.lo,
        })
    }

    pub fn midpoint(&self) -> Rational {
        let two = Rational::from(2u64);
        &(&self.lo + &self.hi) / &two
    }

    /// Widens both endpoints outward by `pad` (which must be nonnegative).
    pub fn pad(&self, pad: &Rational) -> Result<Self> {
        if pad.is_negative() {
            return Err(Error::NonPositiveWidth);
        }
        Ok(RationalInterval {
            lo: &self.lo - pad,
            hi: &self.hi + pad,
        })
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(num: i64, den: i64) -> Rational {
        Rational::new(num, den).unwrap()
    }

    fn iv(lo: (i64, i64), hi: (i64, i64)) -> RationalInterval {
        RationalInterval::new(r(lo.0, lo.1), r(hi.0, hi.1)).unwrap()
    }

    #[test]
    fn rejects_reversed_endpoints() {
        assert!(RationalInterval::new(r(2, 1), r(1, 1)).is_err());
        assert!(RationalInterval::new(r(1, 2), r(1, 2)).is_ok());
    }

    #[test]
    fn inversion_swaps_and_reciprocates() {
        let z = iv((3, 2), (2, 1));
        let inv = z.invert().unwrap();
        assert_eq!(inv, iv((1, 2), (2, 3)));

        let z2 = iv((19, 12), (7, 4));
        assert_eq!(z2.invert().unwrap(), iv((4, 7), (12, 19)));
    }

    #[test]
    fn inversion_requires_strict_positivity() {
        assert!(iv((0, 1), (1, 1)).invert().is_err());
        assert!(iv((-1, 1), (1, 1)).invert().is_err());
    }

    #[test]
    fn width_and_midpoint() {
        let z = iv((19, 12), (7, 4));
        assert_eq!(z.width(), r(1, 6));
        assert_eq!(z.midpoint(), r(5, 3));
        assert_eq!(RationalInterval::point(r(1, 2)).width(), Rational::zero());
    }

    #[test]
    fn containment_is_closed() {
        let z = iv((1, 2), (2, 3));
        assert!(z.contains(&r(1, 2)));
        assert!(z.contains(&r(2, 3)));
        assert!(z.contains(&r(3, 5)));
        assert!(!z.contains(&r(7, 10)));
    }

    #[test]
    fn intersection_includes_shared_endpoint() {
        assert!(iv((0, 1), (1, 2)).intersects(&iv((1, 2), (1, 1))));
        assert!(!iv((0, 1), (1, 3)).intersects(&iv((1, 2), (1, 1))));
        assert!(iv((0, 1), (1, 1)).intersects(&iv((1, 4), (1, 2))));
    }

    #[test]
    fn affine_pieces() {
        let z = iv((1, 4), (1, 2));
        assert_eq!(z.one_minus(), iv((1, 2), (3, 4)));
        assert_eq!(z.sub_from(&r(3, 4)), iv((1, 4), (1, 2)));
        assert_eq!(z.scale(&r(2, 1)).unwrap(), iv((1, 2), (1, 1)));
        assert!(z.scale(&r(-1, 1)).is_err());
        assert_eq!(z.neg(), iv((-1, 2), (-1, 4)));
        assert_eq!(z.add(&iv((1, 4), (1, 4))), iv((1, 2), (3, 4)));
    }

    #[test]
    fn division_takes_opposite_endpoints() {
        let num = iv((1, 1), (2, 1));
        let den = iv((1, 2), (1, 1));
        assert_eq!(num.div(&den).unwrap(), iv((1, 1), (4, 1)));
        assert!(num.div(&iv((0, 1), (1, 1))).is_err());
        assert!(iv((-1, 1), (1, 1)).div(&den).is_err());
    }

    #[test]
    fn padding_widens_symmetrically() {
        let z = iv((1, 2), (2, 3));
        let padded = z.pad(&r(1, 12)).unwrap();
        assert_eq!(padded, iv((5, 12), (3, 4)));
        assert!(padded.contains_interval(&z));
        assert!(z.pad(&r(-1, 12)).is_err());
    }
}
