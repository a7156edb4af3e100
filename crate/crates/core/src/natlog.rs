//! Certified rational enclosures of natural logarithms.
//!
//! A positive rational `x` is bracketed by dyadics `m_lo * 2^e <= x <= m_hi * 2^e`
//! with mantissas of a controlled bit length, so the series work never touches
//! the full-size numerator and denominator of `x`. Each mantissa is reduced to
//! `[1, 2)` by its bit length and evaluated through
//! `ln y = 2 atanh(t)` with `t = (y - 1)/(y + 1) in [0, 1/3]`, using the exact
//! partial sum plus the geometric remainder bound
//! `R <= t^(2J+1) / ((2J+1)(1 - t^2))`. ln 2 itself is `2 atanh(1/3)`.

use crate::error::{Error, Result};
use crate::interval::RationalInterval;
use crate::rational::Rational;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

/// Enclosure of `2 atanh(t)` for `0 <= t < 1` from `terms` series terms.
fn atanh2_enclosure(t: &Rational, terms: u32) -> Result<RationalInterval> {
    if t.is_zero() {
        return RationalInterval::new(Rational::zero(), Rational::zero());
    }
    let t2 = t * t;
    let mut power = t.clone();
    let mut sum = t.clone();
    for j in 1..terms as u64 {
        power = &power * &t2;
        sum = &sum + &(&power / &Rational::from(2 * j + 1));
    }
    let next_power = &power * &t2;
    let one_minus_t2 = &Rational::one() - &t2;
    let remainder = &next_power / &(&Rational::from(2 * terms as u64 + 1) * &one_minus_t2);
    let two = Rational::from(2u64);
    RationalInterval::new(&two * &sum, &two * &(&sum + &remainder))
}

/// Enclosure of `ln 2` from `terms` series terms.
pub fn ln2_enclosure(terms: u32) -> Result<RationalInterval> {
    atanh2_enclosure(&Rational::new(1, 3)?, terms)
}

/// Enclosure of `ln(m * 2^e)` for an integer mantissa `m >= 1`.
fn ln_dyadic(m: &BigUint, e: i64, terms: u32) -> Result<RationalInterval> {
    let bits = m.bits();
    let level = bits as i64 - 1;
    let pow = BigUint::one() << (bits - 1);
    let num = BigInt::from(m - &pow);
    let den = BigInt::from(m + &pow);
    let t = Rational::new(num, den)?;
    let series = atanh2_enclosure(&t, terms)?;
    let c = e + level;
    if c == 0 {
        return Ok(series);
    }
    let ln2 = ln2_enclosure(terms)?;
    let scaled = if c > 0 {
        ln2.scale(&Rational::from(c as u64))?
    } else {
        ln2.scale(&Rational::from((-c) as u64))?.neg()
    };
    Ok(series.add(&scaled))
}

/// Dyadic bracket `[m_lo * 2^e, m_hi * 2^e]` of `x` with `mantissa_bits`-sized
/// mantissas; `m_hi = m_lo` when the bracket is exact.
fn dyadic_bracket(x: &Rational, mantissa_bits: u32) -> (BigUint, BigUint, i64) {
    let p = x.numer().magnitude();
    let q = x.denom().magnitude();
    let shift = mantissa_bits as i64 - (p.bits() as i64 - q.bits() as i64);
    let (m_lo, rem) = if shift >= 0 {
        (p << shift as u64).div_rem(q)
    } else {
        p.div_rem(&(q << (-shift) as u64))
    };
    let m_hi = if rem.is_zero() {
        m_lo.clone()
    } else {
        &m_lo + 1u32
    };
    (m_lo, m_hi, -shift)
}

/// Certified enclosure of `ln x` for a strictly positive rational `x`, with
/// width at most `target` when attainable within the retry schedule. The
/// result is always a sound enclosure; only its width is best-effort.
pub fn ln_enclosure(x: &Rational, target: &Rational) -> Result<RationalInterval> {
    if !x.is_positive() {
        return Err(Error::LogNonPositive);
    }
    if !target.is_positive() {
        return Err(Error::NonPositiveWidth);
    }
    if x == &Rational::one() {
        return RationalInterval::new(Rational::zero(), Rational::zero());
    }
    let series_target = target / &Rational::from(2u64);
    let mut mantissa_bits = 64u32;
    let mut terms = 16u32;
    let mut best: Option<RationalInterval> = None;
    for _ in 0..20 {
        let (m_lo, m_hi, e) = dyadic_bracket(x, mantissa_bits);
        let lower = ln_dyadic(&m_lo, e, terms)?;
        let enclosure = if m_hi == m_lo {
            lower
        } else {
            let upper = ln_dyadic(&m_hi, e, terms)?;
            RationalInterval::new(lower.lo().clone(), upper.hi().clone())?
        };
        if enclosure.width() <= series_target {
            return coarsen_outward(&enclosure, target);
        }
        best = Some(enclosure);
        mantissa_bits *= 2;
        terms *= 2;
    }
    coarsen_outward(&best.expect("at least one attempt"), target)
}

/// Rounds an enclosure outward onto a dyadic grid with step at most
/// `target/8`. The series above leaves big exact rationals; snapping them to
/// a power-of-two denominator keeps long sums of logs from accreting huge
/// lcm denominators, at a width cost of at most `target/4`.
fn coarsen_outward(enclosure: &RationalInterval, target: &Rational) -> Result<RationalInterval> {
    let unit = target / &Rational::from(8u64);
    let q = unit.denom().div_ceil(unit.numer());
    let bits = q.bits().min(1 << 22) as u32;
    RationalInterval::new(
        enclosure.lo().dyadic_floor(bits),
        enclosure.hi().dyadic_ceil(bits),
    )
}

/// Certified enclosure of `ln k` for an integer `k >= 1`.
pub fn ln_integer(k: &BigUint, target: &Rational) -> Result<RationalInterval> {
    ln_enclosure(
        &Rational::new(BigInt::from(k.clone()), BigInt::one())?,
        target,
    )
}

/// Certified enclosure of `ln k` for a machine-word integer.
pub fn ln_u64(k: u64, target: &Rational) -> Result<RationalInterval> {
    ln_integer(&BigUint::from(k), target)
}
