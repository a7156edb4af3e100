//! Empirical irrationality exponents `mu_n = ln(1/gap_n) / ln(b_n)`.
//!
//! `mu_n` is the exponent at which link 1 flips for index `n`: candidates
//! above it certify, candidates below it falsify. Everything here is a
//! certified enclosure: the gap is enclosed with exact rationals, both logs
//! carry explicit remainder bounds, and the quotient interval is rounded
//! outward. A record is only marked `width_ok` when the enclosure meets the
//! requested precision.

use crate::chain::ChainContext;
use crate::error::{Error, Result};
use crate::interval::RationalInterval;
use crate::natlog;
use crate::rational::Rational;
use num_bigint::{BigInt, BigUint};

/// Zeta term-count ceiling while searching for a strictly positive gap.
const GAP_TERMS_CEILING: u64 = 1 << 20;
/// Tightening rounds before giving up and reporting the width honestly.
const MAX_ROUNDS: u32 = 40;

#[derive(Debug, Clone)]
pub struct ExponentRecord {
    pub n: u64,
    pub b_n: BigUint,
    pub gap: RationalInterval,
    pub mu: RationalInterval,
    /// True when `mu` met the requested precision; false means the adaptive
    /// ladder hit its ceilings and `mu` is wider than asked.
    pub width_ok: bool,
    pub precision: Rational,
}

impl ExponentRecord {
    /// Non-certified convenience midpoint of the enclosure.
    pub fn midpoint(&self) -> Rational {
        self.mu.midpoint()
    }
}

/// Certified enclosure of `mu_n`, adaptively tightened until its width is at
/// most `precision` (with outward padding so the final width is just below,
/// leaving interior slack on both sides).
pub fn empirical_exponent(
    ctx: &ChainContext,
    n: u64,
    precision: &Rational,
) -> Result<ExponentRecord> {
    if n == 0 {
        return Err(Error::IndexFromOne);
    }
    if !precision.is_positive() {
        return Err(Error::NonPositivePrecision);
    }
    let pp = ctx.trajectory().partial_product(n)?;
    let b_n = pp.value.denom().magnitude().clone();

    let mut n_terms = 16u64;
    let mut gap = loop {
        let six = ctx.zeta(n_terms)?.six_over_pi2;
        let g = six.sub_from(&pp.value);
        if g.lo().is_positive() {
            break g;
        }
        if n_terms >= GAP_TERMS_CEILING {
            return Err(Error::SoundnessViolation(format!(
                "gap enclosure at n = {n} never separated from zero"
            )));
        }
        n_terms *= 2;
    };

    let eighth = Rational::new(1u64, 8u64)?;
    let mut delta = precision / &Rational::from(8u64);
    if delta > eighth {
        delta = eighth;
    }
    let half_precision = precision / &Rational::from(2u64);

    let mut mu = quotient(&gap, &b_n, &delta)?;
    let mut rounds = 0;
    while mu.width() > half_precision && rounds < MAX_ROUNDS {
        rounds += 1;
        delta = &delta / &Rational::from(8u64);
        while n_terms < GAP_TERMS_CEILING && !gap_width_fine_enough(n_terms, &delta, gap.lo()) {
            n_terms *= 2;
            let six = ctx.zeta(n_terms)?.six_over_pi2;
            gap = six.sub_from(&pp.value);
        }
        mu = quotient(&gap, &b_n, &delta)?;
    }

    let width_ok = mu.width() <= *precision;
    if mu.width() <= half_precision {
        let target = &(precision * &Rational::new(19u64, 20u64)?) - &mu.width();
        let pad = &target / &Rational::from(2u64);
        mu = mu.pad(&pad)?;
    }
    let mu = clamp_nonnegative(mu)?;

    Ok(ExponentRecord {
        n,
        b_n,
        gap,
        mu,
        width_ok,
        precision: precision.clone(),
    })
}

/// `[ln(1/gap) / ln(b)]` rounded outward, with the numerator clamped at zero
/// (the gap is below one, so the true numerator is positive).
fn quotient(gap: &RationalInterval, b: &BigUint, delta: &Rational) -> Result<RationalInterval> {
    let ln_hi = natlog::ln_enclosure(gap.hi(), delta)?;
    let ln_lo = natlog::ln_enclosure(gap.lo(), delta)?;
    let mut a_lo = -ln_hi.hi();
    if a_lo.is_negative() {
        a_lo = Rational::zero();
    }
    let a = RationalInterval::new(a_lo, -ln_lo.lo())?;
    let b = natlog::ln_integer(b, delta)?;
    a.div(&b)
}

/// Whether the gap enclosure's relative width is at most `delta`, decided
/// from the analytic width law instead of the enclosure itself: the zeta
/// enclosure at `N` terms has width exactly `1/(N(N+1))`, and inverting it
/// through `zeta(2) >= 3/2` multiplies that by at most `4/9`. Comparing the
/// huge exact endpoints directly would cost a full-size gcd per check.
fn gap_width_fine_enough(n_terms: u64, delta: &Rational, gap_lo: &Rational) -> bool {
    let bound = Rational::new(4u64, 9 * n_terms * (n_terms + 1)).expect("n_terms > 0");
    bound <= delta * gap_lo
}

fn clamp_nonnegative(interval: RationalInterval) -> Result<RationalInterval> {
    if interval.lo().is_negative() {
        RationalInterval::new(Rational::zero(), interval.hi().clone())
    } else {
        Ok(interval)
    }
}

/// Enclosures for every `n` in `lo..=hi` at a common precision.
pub fn scan(
    ctx: &ChainContext,
    lo: u64,
    hi: u64,
    precision: &Rational,
) -> Result<Vec<ExponentRecord>> {
    if lo == 0 {
        return Err(Error::IndexFromOne);
    }
    let mut records = Vec::with_capacity((hi.saturating_sub(lo) + 1) as usize);
    for n in lo..=hi {
        records.push(empirical_exponent(ctx, n, precision)?);
    }
    Ok(records)
}

/// Running maximum of the enclosure upper bounds, in record order. Any
/// candidate measure for the full sequence must stay above every entry.
pub fn running_max_hi(records: &[ExponentRecord]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(records.len());
    let mut best: Option<Rational> = None;
    for record in records {
        let hi = record.mu.hi().clone();
        best = Some(match best.take() {
            None => hi,
            Some(b) if hi > b => hi,
            Some(b) => b,
        });
        out.push(best.clone().expect("just set"));
    }
    out
}

/// Dyadic rationals straddling the enclosure: the first is strictly below
/// `mu.lo`, the second strictly above `mu.hi`, both on a grid coarse enough
/// that link 1 can separate them from the true threshold. Returns `None` only
/// when even a step of `2^-32` cannot fit two steps under `mu.lo`.
pub fn straddling_candidates(mu: &RationalInterval) -> Option<(Rational, Rational)> {
    for shift in [7u32, 10, 13, 16, 20, 24, 28, 32] {
        let scale = BigInt::from(1u64) << shift;
        let scale_rational = Rational::from_integer(scale.clone());
        let lo_steps = (mu.lo() * &scale_rational).floor();
        if lo_steps >= BigInt::from(2) {
            let below = Rational::new(lo_steps - 1, scale.clone()).expect("scale > 0");
            let hi_steps = (mu.hi() * &scale_rational).floor() + 2;
            let above = Rational::new(hi_steps, scale).expect("scale > 0");
            return Some((below, above));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::PrimeTable;
    use std::sync::Arc;

    fn ctx() -> ChainContext {
        ChainContext::new(Arc::new(PrimeTable::new()))
    }

    fn precision(num: u64, den: u64) -> Rational {
        Rational::new(num, den).unwrap()
    }

    fn contains_decimal(record: &ExponentRecord, literal: &str) -> bool {
        let value: Rational = {
            let (int_part, frac_part) = literal.split_once('.').unwrap();
            let den = Rational::from(10u64).pow(frac_part.len() as u64).unwrap();
            let digits: Rational = format!("{int_part}{frac_part}").parse().unwrap();
            &digits / &den
        };
        record.mu.contains(&value)
    }

    #[test]
    fn first_exponents_match_reference_values() {
        let c = ctx();
        let p = precision(1, 1000);
        let cases = [
            (1u64, "1.407648361425326"),
            (2, "2.580202125156578"),
            (3, "1.068616525498410"),
            (4, "0.557287502797566"),
        ];
        for (n, literal) in cases {
            let record = empirical_exponent(&c, n, &p).unwrap();
            assert!(record.width_ok, "n = {n}");
            assert!(record.mu.width() <= p, "n = {n}");
            assert!(contains_decimal(&record, literal), "n = {n}: {:?}", record.mu);
        }
    }

    #[test]
    fn rounded_reference_value_stays_inside_at_n1() {
        let c = ctx();
        let record = empirical_exponent(&c, 1, &precision(1, 1000)).unwrap();
        assert!(contains_decimal(&record, "1.4077"));
        assert!(contains_decimal(&record, "1.4076"));
    }

    #[test]
    fn tighter_precision_nests(){
        let c = ctx();
        let coarse = empirical_exponent(&c, 5, &precision(1, 100)).unwrap();
        let fine = empirical_exponent(&c, 5, &precision(1, 100_000)).unwrap();
        assert!(coarse.mu.contains_interval(&fine.mu));
        assert!(fine.mu.width() < coarse.mu.width());
    }

    #[test]
    fn b_n_tracks_reduced_denominator() {
        let c = ctx();
        assert_eq!(
            empirical_exponent(&c, 2, &precision(1, 10)).unwrap().b_n,
            BigUint::from(3u64)
        );
        assert_eq!(
            empirical_exponent(&c, 5, &precision(1, 10)).unwrap().b_n,
            BigUint::from(29645u64)
        );
    }

    #[test]
    fn scan_emits_one_record_per_index() {
        let c = ctx();
        let records = scan(&c, 1, 8, &precision(1, 100)).unwrap();
        assert_eq!(records.len(), 8);
        for (i, r) in records.iter().enumerate() {
            assert_eq!(r.n, i as u64 + 1);
            assert!(r.width_ok);
        }
    }

    #[test]
    fn running_max_is_monotone_and_dominated_by_mu2() {
        let c = ctx();
        let records = scan(&c, 1, 10, &precision(1, 1000)).unwrap();
        let maxima = running_max_hi(&records);
        for pair in maxima.windows(2) {
            assert!(pair[0] <= pair[1]);
        }
        assert_eq!(maxima.last(), Some(&records[1].mu.hi().clone()));
    }

    #[test]
    fn straddling_candidates_bracket_strictly() {
        let c = ctx();
        for n in [1u64, 2, 3, 10, 30] {
            let record = empirical_exponent(&c, n, &precision(1, 1000)).unwrap();
            let (below, above) = straddling_candidates(&record.mu).unwrap();
            assert!(below.is_positive(), "n = {n}");
            assert!(&below < record.mu.lo(), "n = {n}");
            assert!(&above > record.mu.hi(), "n = {n}");
        }
    }

    #[test]
    fn rejects_invalid_inputs() {
        let c = ctx();
        assert!(empirical_exponent(&c, 0, &precision(1, 10)).is_err());
        assert!(empirical_exponent(&c, 1, &Rational::zero()).is_err());
        assert!(scan(&c, 0, 3, &precision(1, 10)).is_err());
    }
}
