//! Reduced partial Euler products `a_n/b_n = prod_{k<=n} (1 - 1/p_k^2)` and
//! the cancellation structure of their denominators.
//!
//! Each factor `(p^2 - 1)/p^2` is folded in with immediate reduction, so the
//! stored numerators and denominators are always the lowest-terms `a_n, b_n`.
//! The unreduced denominator would be exactly `primorial^2`; the reduced `b_n`
//! divides it, and the quotient measures how much the numerators cancel.

use crate::error::{Error, Result};
use crate::interval::RationalInterval;
use crate::primes::PrimeTable;
use crate::rational::Rational;
use crate::verdict::Verdict;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use std::io::Write;
use std::sync::{Arc, RwLock};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialProduct {
    pub n: u64,
    pub value: Rational,
    pub primorial: BigUint,
}

/// `b_n` against the square of the primorial: `b_n * cofactor = primorial^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenominatorStructure {
    pub n: u64,
    pub b_n: BigUint,
    pub primorial_squared: BigUint,
    pub cofactor: BigUint,
}

impl PartialProduct {
    /// The one-factor base case `(3/4, primorial 2)`.
    pub fn base(table: &PrimeTable) -> Result<Self> {
        let p = table.nth_prime(1)?;
        Ok(PartialProduct {
            n: 1,
            value: Rational::new(p * p - 1, p * p)?,
            primorial: BigUint::from(p),
        })
    }

    /// Folds in the next prime's factor, reducing immediately.
    pub fn extend(&self, table: &PrimeTable) -> Result<Self> {
        let p = table.nth_prime(self.n + 1)?;
        let factor = Rational::new(p * p - 1, p * p)?;
        Ok(PartialProduct {
            n: self.n + 1,
            value: &self.value * &factor,
            primorial: &self.primorial * p,
        })
    }
}

/// Memoized trajectory of partial products, extendable on demand and shareable
/// across readers once a prefix is built.
pub struct Trajectory {
    table: Arc<PrimeTable>,
    states: RwLock<Vec<PartialProduct>>,
}

impl Trajectory {
    pub fn new(table: Arc<PrimeTable>) -> Self {
        Trajectory {
            table,
            states: RwLock::new(Vec::new()),
        }
    }

    pub fn table(&self) -> &PrimeTable {
        &self.table
    }

    /// State after `n` primes, 1-based.
    pub fn partial_product(&self, n: u64) -> Result<PartialProduct> {
        if n == 0 {
            return Err(Error::IndexFromOne);
        }
        {
            let states = self.states.read().expect("trajectory lock poisoned");
            if states.len() as u64 >= n {
                return Ok(states[(n - 1) as usize].clone());
            }
        }
        let mut states = self.states.write().expect("trajectory lock poisoned");
        if states.is_empty() {
            states.push(PartialProduct::base(&self.table)?);
        }
        while (states.len() as u64) < n {
            let next = states.last().expect("nonempty after base").extend(&self.table)?;
            states.push(next);
        }
        Ok(states[(n - 1) as usize].clone())
    }

    /// `b_n` and the exact cofactor `primorial^2 / b_n`. The division must be
    /// exact; a remainder would falsify the stored divisibility invariant.
    pub fn denominator_structure(&self, n: u64) -> Result<DenominatorStructure> {
        let pp = self.partial_product(n)?;
        let b_n = pp.value.denom().magnitude().clone();
        let primorial_squared = &pp.primorial * &pp.primorial;
        let (cofactor, rem) = primorial_squared.div_rem(&b_n);
        if !rem.is_zero() {
            return Err(Error::DenominatorInvariant { n });
        }
        Ok(DenominatorStructure {
            n,
            b_n,
            primorial_squared,
            cofactor,
        })
    }

    /// Certifies `6/pi^2 < a_n/b_n < 1` against a `6/pi^2` enclosure.
    ///
    /// `Certified` needs `enclosure.hi < a_n/b_n`; when the enclosure is too
    /// coarse for that but does not disprove the bracketing either, the result
    /// is `Inconclusive`, never `Falsified`.
    pub fn bracketing_check(&self, n: u64, enclosure: &RationalInterval) -> Result<Verdict> {
        let pp = self.partial_product(n)?;
        let one = Rational::one();
        if pp.value >= one || &pp.value <= enclosure.lo() {
            return Ok(Verdict::Falsified);
        }
        if enclosure.hi() < &pp.value {
            Ok(Verdict::Certified)
        } else {
            Ok(Verdict::Inconclusive)
        }
    }

    /// CSV rows `n, a_n, b_n, primorial, cofactor` for `n` in `1..=n_max`.
    pub fn write_csv(&self, n_max: u64, out: &mut dyn Write) -> Result<Vec<String>> {
        let mut lines = vec!["n,a_n,b_n,primorial,cofactor".to_string()];
        for n in 1..=n_max {
            let pp = self.partial_product(n)?;
            let ds = self.denominator_structure(n)?;
            lines.push(format!(
                "{},{},{},{},{}",
                n,
                pp.value.numer(),
                pp.value.denom(),
                pp.primorial,
                ds.cofactor
            ));
        }
        for line in &lines {
            writeln!(out, "{line}").map_err(|e| Error::MalformedReport(e.to_string()))?;
        }
        Ok(lines)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::zeta2_enclosure;

    fn trajectory() -> Trajectory {
        Trajectory::new(Arc::new(PrimeTable::new()))
    }

    fn r(num: i64, den: i64) -> Rational {
        Rational::new(num, den).unwrap()
    }

    #[test]
    fn extend_walks_the_known_prefix() {
        let table = PrimeTable::new();
        let s1 = PartialProduct::base(&table).unwrap();
        assert_eq!(s1.value, r(3, 4));
        assert_eq!(s1.primorial, BigUint::from(2u32));

        let s2 = s1.extend(&table).unwrap();
        assert_eq!(s2.value, r(2, 3));
        assert_eq!(s2.primorial, BigUint::from(6u32));

        let s3 = s2.extend(&table).unwrap();
        assert_eq!(s3.value, r(16, 25));
        assert_eq!(s3.primorial, BigUint::from(30u32));

        let s4 = s3.extend(&table).unwrap();
        assert_eq!(s4.value, r(768, 1225));
        assert_eq!(s4.primorial, BigUint::from(210u32));
    }

    #[test]
    fn partial_product_by_index() {
        let traj = trajectory();
        assert_eq!(traj.partial_product(1).unwrap().value, r(3, 4));
        assert_eq!(traj.partial_product(2).unwrap().value, r(2, 3));
        assert_eq!(traj.partial_product(4).unwrap().value, r(768, 1225));
        assert_eq!(traj.partial_product(5).unwrap().value, r(18432, 29645));
        assert!(traj.partial_product(0).is_err());
    }

    #[test]
    fn values_strictly_decrease() {
        let traj = trajectory();
        let mut prev = traj.partial_product(1).unwrap().value;
        for n in 2..=500 {
            let here = traj.partial_product(n).unwrap().value;
            assert!(here < prev, "value did not decrease at n = {n}");
            assert!(here.is_positive());
            assert!(here < Rational::one());
            prev = here;
        }
    }

    #[test]
    fn matches_single_reduction_oracle() {
        let traj = trajectory();
        let table = traj.table();
        for n in [1u64, 2, 7, 40, 100] {
            let mut num = BigUint::from(1u32);
            let mut den = BigUint::from(1u32);
            for k in 1..=n {
                let p = table.nth_prime(k).unwrap();
                num *= p * p - 1;
                den *= p * p;
            }
            let oracle = Rational::new(
                num_bigint::BigInt::from(num),
                num_bigint::BigInt::from(den),
            )
            .unwrap();
            assert_eq!(traj.partial_product(n).unwrap().value, oracle, "n = {n}");
        }
    }

    #[test]
    fn denominator_structure_examples() {
        let traj = trajectory();
        let d1 = traj.denominator_structure(1).unwrap();
        assert_eq!(
            (d1.b_n, d1.primorial_squared, d1.cofactor),
            (4u32.into(), 4u32.into(), 1u32.into())
        );
        let d2 = traj.denominator_structure(2).unwrap();
        assert_eq!(
            (d2.b_n, d2.primorial_squared, d2.cofactor),
            (3u32.into(), 36u32.into(), 12u32.into())
        );
        let d3 = traj.denominator_structure(3).unwrap();
        assert_eq!(
            (d3.b_n, d3.primorial_squared, d3.cofactor),
            (25u32.into(), 900u32.into(), 36u32.into())
        );
    }

    #[test]
    fn denominator_divides_primorial_squared() {
        let traj = trajectory();
        for n in 1..=500 {
            let ds = traj.denominator_structure(n).unwrap();
            assert_eq!(&ds.b_n * &ds.cofactor, ds.primorial_squared, "n = {n}");
        }
    }

    #[test]
    fn bracketing_against_enclosures() {
        let traj = trajectory();
        let coarse = zeta2_enclosure(1).unwrap().six_over_pi2;
        let finer = zeta2_enclosure(2).unwrap().six_over_pi2;

        assert_eq!(traj.bracketing_check(1, &finer).unwrap(), Verdict::Certified);
        assert_eq!(traj.bracketing_check(1, &coarse).unwrap(), Verdict::Certified);
        assert_eq!(
            traj.bracketing_check(3, &coarse).unwrap(),
            Verdict::Inconclusive
        );
    }

    #[test]
    fn enclosure_lower_bound_never_contradicts_bracketing() {
        let traj = trajectory();
        let e = zeta2_enclosure(64).unwrap().six_over_pi2;
        for n in 1..=200 {
            let value = traj.partial_product(n).unwrap().value;
            assert!(e.lo() < &value, "n = {n}");
        }
    }

    #[test]
    fn csv_rows() {
        let traj = trajectory();
        let mut buf = Vec::new();
        let lines = traj.write_csv(3, &mut buf).unwrap();
        assert_eq!(
            lines,
            vec![
                "n,a_n,b_n,primorial,cofactor",
                "1,3,4,2,1",
                "2,2,3,6,12",
                "3,16,25,30,36",
            ]
        );
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 4);
    }
}
