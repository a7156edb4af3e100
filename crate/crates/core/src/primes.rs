//! Append-only prime table backed by a segmented sieve.
//!
//! Primes are materialized on demand and never discarded, so `p_n` for a given
//! index is immutable once observed. All growth happens under a write lock;
//! readers share the table freely. A hard cap bounds how far the sieve may run
//! so a runaway request fails fast instead of thrashing.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::One;
use std::sync::RwLock;

/// Largest value the sieve will enumerate to unless overridden.
pub const DEFAULT_SIEVE_CAP: u64 = 10_000_000;

const SEGMENT_SPAN: u64 = 1 << 16;

pub struct PrimeTable {
    cap: u64,
    inner: RwLock<TableInner>,
}

struct TableInner {
    primes: Vec<u64>,
    sieved_to: u64,
    primorials: Vec<BigUint>,
}

/// One row of a Bertrand sweep: `p_{n+1} < 2 p_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BertrandRow {
    pub n: u64,
    pub p_n: u64,
    pub p_next: u64,
    pub holds: bool,
}

impl Default for PrimeTable {
    fn default() -> Self {
        Self::new()
    }
}

impl PrimeTable {
    pub fn new() -> Self {
        Self::with_cap(DEFAULT_SIEVE_CAP)
    }

    pub fn with_cap(cap: u64) -> Self {
        PrimeTable {
            cap,
            inner: RwLock::new(TableInner {
                primes: Vec::new(),
                sieved_to: 1,
                primorials: Vec::new(),
            }),
        }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// The n-th prime, 1-based: `nth_prime(1) = 2`.
    pub fn nth_prime(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::IndexFromOne);
        }
        self.ensure_count(n)?;
        let inner = self.inner.read().expect("prime table lock poisoned");
        Ok(inner.primes[(n - 1) as usize])
    }

    /// Primes `p_a ..= p_b` by index, 1-based, as a owned slice.
    pub fn primes_in_index_range(&self, a: u64, b: u64) -> Result<Vec<u64>> {
        if a == 0 {
            return Err(Error::IndexFromOne);
        }
        if b < a {
            return Ok(Vec::new());
        }
        self.ensure_count(b)?;
        let inner = self.inner.read().expect("prime table lock poisoned");
        Ok(inner.primes[(a - 1) as usize..b as usize].to_vec())
    }

    /// `p_1 p_2 ... p_n`, memoized. 1-based; errors on `n = 0`.
    pub fn primorial(&self, n: u64) -> Result<BigUint> {
        if n == 0 {
            return Err(Error::IndexFromOne);
        }
        self.ensure_count(n)?;
        {
            let inner = self.inner.read().expect("prime table lock poisoned");
            if inner.primorials.len() >= n as usize {
                return Ok(inner.primorials[(n - 1) as usize].clone());
            }
        }
        let mut inner = self.inner.write().expect("prime table lock poisoned");
        while inner.primorials.len() < n as usize {
            let idx = inner.primorials.len();
            let next = match idx {
                0 => BigUint::from(inner.primes[0]),
                _ => &inner.primorials[idx - 1] * inner.primes[idx],
            };
            inner.primorials.push(next);
        }
        Ok(inner.primorials[(n - 1) as usize].clone())
    }

    /// Checks `p_{n+1} < 2 p_n` for every `n` in `1..=n_max`.
    pub fn bertrand_check(&self, n_max: u64) -> Result<Vec<BertrandRow>> {
        if n_max == 0 {
            return Err(Error::IndexFromOne);
        }
        let window = self.primes_in_index_range(1, n_max + 1)?;
        Ok((1..=n_max)
            .map(|n| {
                let p_n = window[(n - 1) as usize];
                let p_next = window[n as usize];
                BertrandRow {
                    n,
                    p_n,
                    p_next,
                    holds: p_next < 2 * p_n,
                }
            })
            .collect())
    }

    /// Number of primes materialized so far (for diagnostics and tests).
    pub fn materialized(&self) -> usize {
        self.inner.read().expect("prime table lock poisoned").primes.len()
    }

    fn ensure_count(&self, count: u64) -> Result<()> {
        {
            let inner = self.inner.read().expect("prime table lock poisoned");
            if inner.primes.len() as u64 >= count {
                return Ok(());
            }
        }
        let mut inner = self.inner.write().expect("prime table lock poisoned");
        while (inner.primes.len() as u64) < count {
            if inner.sieved_to >= self.cap {
                return Err(Error::SieveCapExceeded {
                    cap: self.cap,
                    needed: inner.sieved_to.saturating_mul(2),
                });
            }
            let target = inner.sieved_to.saturating_mul(2).max(1024).min(self.cap);
            extend_sieve(&mut inner, target);
        }
        Ok(())
    }
}

/// Sieves `(inner.sieved_to, target]` in fixed-width segments, appending the
/// primes found. Doubling growth keeps `sqrt(target) <= sieved_to`, so the
/// base primes needed by each segment are always already present.
fn extend_sieve(inner: &mut TableInner, target: u64) {
    if inner.primes.is_empty() {
        let base = simple_sieve(1024.min(target).max(4));
        inner.primes = base;
        inner.sieved_to = 1024.min(target).max(4);
    }
    while inner.sieved_to < target {
        let lo = inner.sieved_to + 1;
        let hi = (lo + SEGMENT_SPAN - 1).min(target);
        let mut composite = vec![false; (hi - lo + 1) as usize];
        for &p in &inner.primes {
            if p * p > hi {
                break;
            }
            let first = lo.div_ceil(p).max(p) * p;
            let mut m = first;
            while m <= hi {
                composite[(m - lo) as usize] = true;
                m += p;
            }
        }
        for (off, &c) in composite.iter().enumerate() {
            if !c {
                inner.primes.push(lo + off as u64);
            }
        }
        inner.sieved_to = hi;
    }
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let mut composite = vec![false; (limit + 1) as usize];
    let mut primes = Vec::new();
    for p in 2..=limit {
        if !composite[p as usize] {
            primes.push(p);
            let mut m = p * p;
            while m <= limit {
                composite[m as usize] = true;
                m += p;
            }
        }
    }
    primes
}

/// Primality by trial division; the independent oracle the sieve is tested
/// against.
pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[allow(dead_code)]
fn primorial_naive(primes: &[u64]) -> BigUint {
    primes.iter().fold(BigUint::one(), |acc, &p| acc * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn first_primes_match_trial_division() {
        let table = PrimeTable::new();
        let mut expected = Vec::new();
        let mut candidate = 2u64;
        while expected.len() < 2000 {
            if is_prime_trial(candidate) {
                expected.push(candidate);
            }
            candidate += 1;
        }
        for (i, &p) in expected.iter().enumerate() {
            assert_eq!(table.nth_prime(i as u64 + 1).unwrap(), p);
        }
    }

    #[test]
    fn no_prime_skipped_below_ten_thousand() {
        let table = PrimeTable::new();
        let upper = 10_000;
        let count = (2..=upper).filter(|&m| is_prime_trial(m)).count() as u64;
        let listed = table.primes_in_index_range(1, count).unwrap();
        assert_eq!(listed.len() as u64, count);
        assert!(listed.iter().all(|&p| p <= upper));
        assert!(table.nth_prime(count + 1).unwrap() > upper);
    }

    #[test]
    fn known_indices() {
        let table = PrimeTable::new();
        assert_eq!(table.nth_prime(1).unwrap(), 2);
        assert_eq!(table.nth_prime(5).unwrap(), 11);
        assert_eq!(table.nth_prime(25).unwrap(), 97);
        assert_eq!(table.nth_prime(1000).unwrap(), 7919);
        assert!(matches!(table.nth_prime(0), Err(Error::IndexFromOne)));
    }

    #[test]
    fn primorials_follow_recurrence() {
        let table = PrimeTable::new();
        assert_eq!(table.primorial(1).unwrap(), BigUint::from(2u32));
        assert_eq!(table.primorial(2).unwrap(), BigUint::from(6u32));
        assert_eq!(table.primorial(3).unwrap(), BigUint::from(30u32));
        assert_eq!(table.primorial(4).unwrap(), BigUint::from(210u32));
        for n in 1..200u64 {
            let here = table.primorial(n).unwrap();
            let next = table.primorial(n + 1).unwrap();
            assert_eq!(next, here * table.nth_prime(n + 1).unwrap());
        }
        assert!(table.primorial(0).is_err());
    }

    #[test]
    fn index_windows() {
        let table = PrimeTable::new();
        assert_eq!(table.primes_in_index_range(2, 5).unwrap(), vec![3, 5, 7, 11]);
        assert_eq!(table.primes_in_index_range(3, 2).unwrap(), Vec::<u64>::new());
        assert!(table.primes_in_index_range(0, 2).is_err());
    }

    #[test]
    fn bertrand_rows() {
        let table = PrimeTable::new();
        let rows = table.bertrand_check(4).unwrap();
        assert_eq!(
            rows[2],
            BertrandRow { n: 3, p_n: 5, p_next: 7, holds: true }
        );
        assert_eq!(
            rows[3],
            BertrandRow { n: 4, p_n: 7, p_next: 11, holds: true }
        );
        assert!(rows.iter().all(|r| r.holds));
    }

    #[test]
    fn cap_is_enforced() {
        let table = PrimeTable::with_cap(100);
        assert!(table.nth_prime(25).is_ok());
        let err = table.nth_prime(26);
        assert!(matches!(err, Err(Error::SieveCapExceeded { cap: 100, .. })));
        assert_eq!(table.nth_prime(25).unwrap(), 97);
    }

    #[test]
    fn concurrent_readers_see_consistent_indices() {
        let table = Arc::new(PrimeTable::new());
        let mut handles = Vec::new();
        for t in 0..4u64 {
            let table = Arc::clone(&table);
            handles.push(std::thread::spawn(move || {
                for n in (1 + t * 97..2000).step_by(7) {
                    let p = table.nth_prime(n).unwrap();
                    assert!(is_prime_trial(p));
                    assert_eq!(table.nth_prime(n).unwrap(), p);
                }
            }));
        }
        for h in handles {
            h.join().unwrap();
        }
    }
}
