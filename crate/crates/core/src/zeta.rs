//! Rational enclosures of `zeta(2)` and `6/pi^2` from partial sums.
//!
//! With `S_N = sum_{m=1}^N 1/m^2`, the tail obeys the integral bounds
//! `1/(N+1) < sum_{m>N} 1/m^2 < 1/N`, so `[S_N + 1/(N+1), S_N + 1/N]`
//! encloses `zeta(2)` with exact width `1/(N(N+1))`, and inverting it encloses
//! `6/pi^2`. The constant pi itself never appears.

use crate::error::{Error, Result};
use crate::interval::RationalInterval;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaEnclosure {
    pub terms: u64,
    pub zeta2: RationalInterval,
    pub six_over_pi2: RationalInterval,
}

/// Running partial sum `S_N`, extendable in place so that a sweep over many
/// `N` costs one term per step rather than one sum per enclosure.
#[derive(Debug, Clone)]
pub struct PartialSum {
    terms: u64,
    sum: Rational,
}

impl Default for PartialSum {
    fn default() -> Self {
        Self::new()
    }
}

impl PartialSum {
    pub fn new() -> Self {
        PartialSum {
            terms: 0,
            sum: Rational::zero(),
        }
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }

    /// Extends the sum through `1/n_terms^2`. No-op when already past it.
    pub fn extend_to(&mut self, n_terms: u64) {
        while self.terms < n_terms {
            let m = self.terms + 1;
            let term = Rational::new(1u64, m * m).expect("m^2 > 0");
            self.sum = &self.sum + &term;
            self.terms = m;
        }
    }

    /// Enclosure at the current number of terms. Requires at least one term.
    pub fn enclosure(&self) -> Result<ZetaEnclosure> {
        if self.terms == 0 {
            return Err(Error::TermsFromOne);
        }
        let n = self.terms;
        let lo = &self.sum + &Rational::new(1u64, n + 1)?;
        let hi = &self.sum + &Rational::new(1u64, n)?;
        let zeta2 = RationalInterval::new(lo, hi)?;
        let six_over_pi2 = zeta2.invert()?;
        Ok(ZetaEnclosure {
            terms: n,
            zeta2,
            six_over_pi2,
        })
    }
}

/// Enclosure of `zeta(2)` and `6/pi^2` from the first `n_terms` terms.
pub fn zeta2_enclosure(n_terms: u64) -> Result<ZetaEnclosure> {
    if n_terms == 0 {
        return Err(Error::TermsFromOne);
    }
    let mut sum = PartialSum::new();
    sum.extend_to(n_terms);
    sum.enclosure()
}

/// Smallest enclosure along the doubling ladder `N = 1, 2, 4, ...` whose
/// `six_over_pi2` width is below `target`.
pub fn adaptive_enclosure(target: &Rational) -> Result<ZetaEnclosure> {
    if !target.is_positive() {
        return Err(Error::NonPositiveWidth);
    }
    let mut sum = PartialSum::new();
    let mut n = 1u64;
    loop {
        sum.extend_to(n);
        let enclosure = sum.enclosure()?;
        if &enclosure.six_over_pi2.width() < target {
            return Ok(enclosure);
        }
        n *= 2;
    }
}
