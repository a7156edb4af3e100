//! Per-n certification of the proof chain and the primorial bound.
//!
//! The five links, in the order the chain composes:
//!
//! * L1: `1/b_n^mu < a_n/b_n - 6/pi^2`, reduced to the exact integer
//!   comparison `gap_lo_num^Q * b_n^P > gap_lo_den^Q` against the
//!   conservative endpoint of a `6/pi^2` enclosure.
//! * L2: `a_n < b_n`, exactly.
//! * identity: `a_n/b_n - 6/pi^2 = (a_n/b_n)(1 - prod_{k>n}(1 - 1/p_k^2))`;
//!   both sides are enclosed independently and must overlap.
//! * L3: `1 - prod_{k>n}(1 - 1/p_k^2) < sum_{k>n} 1/p_k^2`. The certified
//!   test compares `1 - prod_hi` (finite product, exact) against `sum_lo`
//!   (finite sum, exact): for any split of the infinite tail at K,
//!   `sum_inf + prod_inf >= sum_fin + prod_fin`, because the remaining factors
//!   satisfy `prod_tail >= 1 - sum_tail` and so
//!   `sum_inf + prod_inf >= sum_fin + prod_fin + sum_tail (1 - prod_fin)`.
//!   Hence `sum_fin + prod_fin > 1` certifies the infinite statement. The
//!   margin of this test is second-order (about half the squared tail sum),
//!   which stays above zero at the default window even for n in the hundreds,
//!   where any test paying a first-order `1/p_K` slack could never certify.
//! * L4: `sum_{k>n} 1/p_k^2 < 1/p_{n+1}` via `sum_hi < 1/p_{n+1}`.
//!
//! Each link reports named rational witness bounds plus the exact integer
//! comparisons actually evaluated, so any third party can replay a verdict
//! from the serialized values alone.

use crate::error::{Error, Result};
use crate::interval::RationalInterval;
use crate::natlog;
use crate::primes::PrimeTable;
use crate::product::{PartialProduct, Trajectory};
use crate::rational::Rational;
use crate::verdict::Verdict;
use crate::zeta::{zeta2_enclosure, PartialSum, ZetaEnclosure};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

/// Candidate exponent `mu = P/Q`, kept as an exact rational with machine-word
/// numerator and denominator so power comparisons stay exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuCandidate {
    value: Rational,
    p: u64,
    q: u64,
}

impl MuCandidate {
    pub fn new(value: Rational) -> Result<Self> {
        if !value.is_positive() {
            return Err(Error::NonPositiveMu);
        }
        let p = value.numer().to_u64().ok_or(Error::MuTooLarge)?;
        let q = value.denom().to_u64().ok_or(Error::MuTooLarge)?;
        Ok(MuCandidate { value, p, q })
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    /// Numerator of `mu` in lowest terms.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Denominator of `mu` in lowest terms.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Genuine irrationality measures exceed 2; smaller candidates are legal
    /// exploration inputs but deserve a warning.
    pub fn below_definition_threshold(&self) -> bool {
        self.value <= Rational::from(2u64)
    }
}

impl FromStr for MuCandidate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MuCandidate::new(s.parse()?)
    }
}

impl std::fmt::Display for MuCandidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.value.fmt(f)
    }
}

/// Exact bounds on the tail sum and tail product past index `n`, truncated at
/// prime index `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailBounds {
    pub n: u64,
    pub k: u64,
    /// `p_{n+1}`, the first prime of the window.
    pub p_next: u64,
    /// `p_K`, the last prime of the window.
    pub p_last: u64,
    pub sum_lo: Rational,
    pub sum_hi: Rational,
    pub prod_lo: Rational,
    pub prod_hi: Rational,
}

/// `sum_lo = sum_{k=n+1}^K 1/p_k^2` and `prod_hi = prod_{k=n+1}^K (1 - 1/p_k^2)`
/// exactly; `sum_hi` adds the integer-tail bound `1/p_K`, and `prod_lo`
/// applies one Weierstrass step `prod_hi * (1 - 1/p_K)`.
pub fn tail_bounds(table: &PrimeTable, n: u64, k: u64) -> Result<TailBounds> {
    if n == 0 {
        return Err(Error::IndexFromOne);
    }
    if k <= n {
        return Err(Error::TruncationTooSmall { k, n });
    }
    let window = table.primes_in_index_range(n + 1, k)?;
    let p_next = window[0];
    let p_last = *window.last().expect("window is nonempty");
    let sum_lo = sum_reciprocal_squares(&window);
    let prod_hi = product_of_complements(&window);
    let sum_hi = &sum_lo + &Rational::new(1u64, p_last)?;
    let prod_lo = &prod_hi * &Rational::new(p_last - 1, p_last)?;
    Ok(TailBounds {
        n,
        k,
        p_next,
        p_last,
        sum_lo,
        sum_hi,
        prod_lo,
        prod_hi,
    })
}

fn sum_reciprocal_squares(primes: &[u64]) -> Rational {
    match primes {
        [] => Rational::zero(),
        [p] => Rational::new(1u64, p * p).expect("p^2 > 0"),
        _ => {
            let (a, b) = primes.split_at(primes.len() / 2);
            &sum_reciprocal_squares(a) + &sum_reciprocal_squares(b)
        }
    }
}

fn product_of_complements(primes: &[u64]) -> Rational {
    match primes {
        [] => Rational::one(),
        [p] => Rational::new(p * p - 1, p * p).expect("p^2 > 0"),
        _ => {
            let (a, b) = primes.split_at(primes.len() / 2);
            &product_of_complements(a) * &product_of_complements(b)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    pub fn eval(self, lhs: &BigInt, rhs: &BigInt) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "<" => Ok(Relation::Lt),
            "<=" => Ok(Relation::Le),
            ">" => Ok(Relation::Gt),
            ">=" => Ok(Relation::Ge),
            other => Err(Error::MalformedReport(format!("unknown relation '{other}'"))),
        }
    }
}

/// One exact integer comparison, with the operands that were compared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub name: String,
    pub lhs: BigInt,
    pub relation: Relation,
    pub rhs: BigInt,
    pub holds: bool,
}

impl Comparison {
    fn evaluate(name: &str, lhs: BigInt, relation: Relation, rhs: BigInt) -> Self {
        let holds = relation.eval(&lhs, &rhs);
        Comparison {
            name: name.to_string(),
            lhs,
            relation,
            rhs,
            holds,
        }
    }

    /// Cross-multiplies `lhs rel rhs` on rationals into an integer comparison
    /// (both denominators are positive, so the direction is preserved).
    fn rationals(name: &str, lhs: &Rational, relation: Relation, rhs: &Rational) -> Self {
        Comparison::evaluate(
            name,
            lhs.numer() * rhs.denom(),
            relation,
            rhs.numer() * lhs.denom(),
        )
    }
}

/// Verdict plus replayable witnesses for one link.
#[derive(Debug, Clone)]
pub struct LinkReport {
    pub verdict: Verdict,
    pub bounds: Vec<(String, Rational)>,
    pub comparisons: Vec<Comparison>,
}

pub(crate) fn big_pow(base: &BigInt, exp: u64) -> BigInt {
    let mut result = BigInt::one();
    let mut sq = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    result
}

/// L1: `1/b_n^mu < gap`, against the gap enclosure's conservative endpoints.
pub fn link1_check(pp: &PartialProduct, mu: &MuCandidate, gap: &RationalInterval) -> LinkReport {
    let b_n = pp.value.denom();
    let b_pow = big_pow(b_n, mu.p());
    let mut comparisons = Vec::new();

    let lo_positive = Comparison::evaluate(
        "gap_lo_positive",
        gap.lo().numer().clone(),
        Relation::Gt,
        BigInt::zero(),
    );
    let lo_beats = lo_positive.holds.then(|| {
        Comparison::evaluate(
            "measure_beaten_at_gap_lo",
            big_pow(gap.lo().numer(), mu.q()) * &b_pow,
            Relation::Gt,
            big_pow(gap.lo().denom(), mu.q()),
        )
    });
    let hi_positive = Comparison::evaluate(
        "gap_hi_positive",
        gap.hi().numer().clone(),
        Relation::Gt,
        BigInt::zero(),
    );
    let hi_beats = hi_positive.holds.then(|| {
        Comparison::evaluate(
            "measure_beaten_at_gap_hi",
            big_pow(gap.hi().numer(), mu.q()) * &b_pow,
            Relation::Gt,
            big_pow(gap.hi().denom(), mu.q()),
        )
    });

    let certified = lo_positive.holds && lo_beats.as_ref().is_some_and(|c| c.holds);
    let falsified = !hi_positive.holds || hi_beats.as_ref().is_some_and(|c| !c.holds);
    let verdict = if certified {
        Verdict::Certified
    } else if falsified {
        Verdict::Falsified
    } else {
        Verdict::Inconclusive
    };

    comparisons.push(lo_positive);
    comparisons.extend(lo_beats);
    comparisons.push(hi_positive);
    comparisons.extend(hi_beats);

    LinkReport {
        verdict,
        bounds: vec![
            ("gap_lo".to_string(), gap.lo().clone()),
            ("gap_hi".to_string(), gap.hi().clone()),
        ],
        comparisons,
    }
}

/// L2: `a_n < b_n`, exact.
pub fn link2_check(pp: &PartialProduct) -> LinkReport {
    let cmp = Comparison::evaluate(
        "numerator_below_denominator",
        pp.value.numer().clone(),
        Relation::Lt,
        pp.value.denom().clone(),
    );
    LinkReport {
        verdict: if cmp.holds {
            Verdict::Certified
        } else {
            Verdict::Falsified
        },
        bounds: vec![("a_n_over_b_n".to_string(), pp.value.clone())],
        comparisons: vec![cmp],
    }
}

/// Identity: the gap enclosure and `(a_n/b_n) * [1 - prod_hi, 1 - prod_lo]`
/// enclose the same real number, so they must overlap; disjointness is an
/// arithmetic soundness bug, not an inconclusive outcome.
pub fn link_identity_check(
    pp: &PartialProduct,
    tb: &TailBounds,
    gap: &RationalInterval,
) -> Result<LinkReport> {
    let tail = RationalInterval::new(tb.prod_lo.clone(), tb.prod_hi.clone())?;
    let lhs = tail.one_minus().scale(&pp.value)?;
    let left = Comparison::rationals("identity_lo_le_gap_hi", lhs.lo(), Relation::Le, gap.hi());
    let right = Comparison::rationals("gap_lo_le_identity_hi", gap.lo(), Relation::Le, lhs.hi());
    if !(left.holds && right.holds) {
        return Err(Error::SoundnessViolation(format!(
            "gap enclosure {} and identity enclosure {} are disjoint at n = {}",
            gap, lhs, tb.n
        )));
    }
    Ok(LinkReport {
        verdict: Verdict::Certified,
        bounds: vec![
            ("identity_lo".to_string(), lhs.lo().clone()),
            ("identity_hi".to_string(), lhs.hi().clone()),
            ("gap_lo".to_string(), gap.lo().clone()),
            ("gap_hi".to_string(), gap.hi().clone()),
        ],
        comparisons: vec![left, right],
    })
}

/// L3: `1 - prod_inf < sum_inf`, certified through the finite split
/// `sum_lo + prod_hi > 1` (see the module docs for why this is sound).
pub fn link3_check(tb: &TailBounds) -> LinkReport {
    let one = Rational::one();
    let one_minus_prod_hi = &one - &tb.prod_hi;
    let certify = Comparison::rationals(
        "one_minus_prod_hi_below_sum_lo",
        &one_minus_prod_hi,
        Relation::Lt,
        &tb.sum_lo,
    );
    let falsify = Comparison::rationals(
        "one_minus_prod_hi_at_least_sum_hi",
        &one_minus_prod_hi,
        Relation::Ge,
        &tb.sum_hi,
    );
    let verdict = if certify.holds {
        Verdict::Certified
    } else if falsify.holds {
        Verdict::Falsified
    } else {
        Verdict::Inconclusive
    };
    LinkReport {
        verdict,
        bounds: tail_bound_witnesses(tb),
        comparisons: vec![certify, falsify],
    }
}

/// L4: `sum_inf < 1/p_{n+1}`, certified through `sum_hi < 1/p_{n+1}`.
pub fn link4_check(tb: &TailBounds) -> LinkReport {
    let reciprocal = Rational::new(1u64, tb.p_next).expect("p_next > 0");
    let certify = Comparison::rationals(
        "sum_hi_below_reciprocal_p_next",
        &tb.sum_hi,
        Relation::Lt,
        &reciprocal,
    );
    let falsify = Comparison::rationals(
        "sum_lo_at_least_reciprocal_p_next",
        &tb.sum_lo,
        Relation::Ge,
        &reciprocal,
    );
    let verdict = if certify.holds {
        Verdict::Certified
    } else if falsify.holds {
        Verdict::Falsified
    } else {
        Verdict::Inconclusive
    };
    LinkReport {
        verdict,
        bounds: tail_bound_witnesses(tb),
        comparisons: vec![certify, falsify],
    }
}

fn tail_bound_witnesses(tb: &TailBounds) -> Vec<(String, Rational)> {
    vec![
        ("sum_lo".to_string(), tb.sum_lo.clone()),
        ("sum_hi".to_string(), tb.sum_hi.clone()),
        ("prod_lo".to_string(), tb.prod_lo.clone()),
        ("prod_hi".to_string(), tb.prod_hi.clone()),
        (
            "p_next".to_string(),
            Rational::from(tb.p_next),
        ),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremMode {
    Exact,
    Log,
}

impl TheoremMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremMode::Exact => "exact",
            TheoremMode::Log => "log",
        }
    }
}

/// How theorem_check picks between exact powers and certified logs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremModeChoice {
    /// Exact for `n <= exact_threshold`, log beyond.
    Auto { exact_threshold: u64 },
    Exact,
    Log,
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub verdict: Verdict,
    pub mode: TheoremMode,
    pub p_next: u64,
    pub bounds: Vec<(String, Rational)>,
    pub comparisons: Vec<Comparison>,
}

/// Theorem bound `p_{n+1} < primorial_n^{2 mu}`, as the exact integer
/// comparison `p_{n+1}^Q < primorial^{2P}` or its certified-log counterpart.
pub fn theorem_check(
    ctx: &ChainContext,
    n: u64,
    mu: &MuCandidate,
    choice: TheoremModeChoice,
) -> Result<TheoremReport> {
    if n == 0 {
        return Err(Error::IndexFromOne);
    }
    let mode = match choice {
        TheoremModeChoice::Exact => TheoremMode::Exact,
        TheoremModeChoice::Log => TheoremMode::Log,
        TheoremModeChoice::Auto { exact_threshold } => {
            if n <= exact_threshold {
                TheoremMode::Exact
            } else {
                TheoremMode::Log
            }
        }
    };
    let p_next = ctx.table().nth_prime(n + 1)?;
    match mode {
        TheoremMode::Exact => {
            let primorial = BigInt::from(ctx.table().primorial(n)?);
            let cmp = Comparison::evaluate(
                "next_prime_pow_q_below_primorial_pow_2p",
                big_pow(&BigInt::from(p_next), mu.q()),
                Relation::Lt,
                big_pow(&primorial, 2 * mu.p()),
            );
            Ok(TheoremReport {
                verdict: if cmp.holds {
                    Verdict::Certified
                } else {
                    Verdict::Falsified
                },
                mode,
                p_next,
                bounds: vec![("p_next".to_string(), Rational::from(p_next))],
                comparisons: vec![cmp],
            })
        }
        TheoremMode::Log => theorem_check_log(ctx, n, mu, p_next),
    }
}

fn theorem_check_log(
    ctx: &ChainContext,
    n: u64,
    mu: &MuCandidate,
    p_next: u64,
) -> Result<TheoremReport> {
    let q = Rational::from(mu.q());
    let two_p = Rational::from(2 * mu.p());
    let mut lhs = natlog::ln_u64(p_next, ctx.ln_unit_width())?.scale(&q)?;
    let mut rhs = ctx.ln_primorial(n)?.scale(&two_p)?;
    let mut width = ctx.ln_unit_width().clone();
    for _ in 0..24 {
        let certify =
            Comparison::rationals("log_lhs_hi_below_rhs_lo", lhs.hi(), Relation::Lt, rhs.lo());
        let falsify =
            Comparison::rationals("log_lhs_lo_at_least_rhs_hi", lhs.lo(), Relation::Ge, rhs.hi());
        let verdict = if certify.holds {
            Verdict::Certified
        } else if falsify.holds {
            Verdict::Falsified
        } else {
            Verdict::Inconclusive
        };
        if verdict != Verdict::Inconclusive {
            return Ok(TheoremReport {
                verdict,
                mode: TheoremMode::Log,
                p_next,
                bounds: vec![
                    ("log_lhs_lo".to_string(), lhs.lo().clone()),
                    ("log_lhs_hi".to_string(), lhs.hi().clone()),
                    ("log_rhs_lo".to_string(), rhs.lo().clone()),
                    ("log_rhs_hi".to_string(), rhs.hi().clone()),
                ],
                comparisons: vec![certify, falsify],
            });
        }
        width = &width / &Rational::from(16u64);
        let per_term = &width / &Rational::from(n + 1);
        lhs = natlog::ln_u64(p_next, &per_term)?.scale(&q)?;
        let mut sum = RationalInterval::point(Rational::zero());
        for p in ctx.table().primes_in_index_range(1, n)? {
            sum = sum.add(&natlog::ln_u64(p, &per_term)?);
        }
        rhs = sum.scale(&two_p)?;
    }
    let certify = Comparison::rationals("log_lhs_hi_below_rhs_lo", lhs.hi(), Relation::Lt, rhs.lo());
    let falsify = Comparison::rationals("log_lhs_lo_at_least_rhs_hi", lhs.lo(), Relation::Ge, rhs.hi());
    Ok(TheoremReport {
        verdict: Verdict::Inconclusive,
        mode: TheoremMode::Log,
        p_next,
        bounds: vec![
            ("log_lhs_lo".to_string(), lhs.lo().clone()),
            ("log_lhs_hi".to_string(), lhs.hi().clone()),
            ("log_rhs_lo".to_string(), rhs.lo().clone()),
            ("log_rhs_hi".to_string(), rhs.hi().clone()),
        ],
        comparisons: vec![certify, falsify],
    })
}

/// Decimal digit count of `primorial_n^(2 mu)`. Exact integer arithmetic for
/// `n <= exact_threshold`; beyond that a certified-log bracket of the base-10
/// logarithm, retried at tighter widths, with a `~` prefix when the count
/// still straddles a power of ten after the retries.
pub fn bound_digit_count(
    ctx: &ChainContext,
    n: u64,
    mu: &MuCandidate,
    exact_threshold: u64,
) -> Result<String> {
    if n == 0 {
        return Err(Error::IndexFromOne);
    }
    if n <= exact_threshold {
        let primorial = BigInt::from(ctx.table().primorial(n)?);
        let t = big_pow(&primorial, 2 * mu.p());
        let ten = BigInt::from(10u64);
        let mut m = (t.to_string().len() as u64 - 1) / mu.q();
        while big_pow(&ten, (m + 1) * mu.q()) <= t {
            m += 1;
        }
        while m > 0 && big_pow(&ten, m * mu.q()) > t {
            m -= 1;
        }
        return Ok((m + 1).to_string());
    }
    let scale = Rational::new(2 * mu.p(), mu.q())?;
    let mut estimate = ctx
        .ln_primorial(n)?
        .scale(&scale)?
        .div(&natlog::ln_u64(10, ctx.ln_unit_width())?)?;
    for round in 0u32..4 {
        let lo_digit = estimate.lo().floor();
        let hi_digit = estimate.hi().floor();
        if lo_digit == hi_digit {
            return Ok((lo_digit + 1u32).to_string());
        }
        if round == 3 {
            break;
        }
        let target = Rational::new(BigInt::one(), BigInt::from(10u64).pow(12 + 8 * round))?;
        let ln_prim = natlog::ln_integer(&ctx.table().primorial(n)?, &target)?;
        estimate = ln_prim.scale(&scale)?.div(&natlog::ln_u64(10, &target)?)?;
    }
    Ok(format!("~{}", estimate.midpoint().floor() + 1u32))
}

/// Shared state for a batch of verifications: the prime table, the product
/// trajectory, a zeta partial-sum ladder with snapshots at every requested
/// term count, and a prefix cache of certified `ln primorial` bounds.
pub struct ChainContext {
    table: Arc<PrimeTable>,
    trajectory: Trajectory,
    zeta: Mutex<ZetaLadder>,
    ln_prefix: Mutex<Vec<RationalInterval>>,
    ln_unit_width: Rational,
}

struct ZetaLadder {
    sum: PartialSum,
    snapshots: HashMap<u64, ZetaEnclosure>,
}

impl ChainContext {
    pub fn new(table: Arc<PrimeTable>) -> Self {
        ChainContext {
            trajectory: Trajectory::new(Arc::clone(&table)),
            table,
            zeta: Mutex::new(ZetaLadder {
                sum: PartialSum::new(),
                snapshots: HashMap::new(),
            }),
            ln_prefix: Mutex::new(vec![RationalInterval::point(Rational::zero())]),
            ln_unit_width: Rational::new(1u64, 1_000_000_000u64).expect("constant"),
        }
    }

    pub fn table(&self) -> &PrimeTable {
        &self.table
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    /// Zeta enclosure at `n_terms`, memoized across the batch.
    pub fn zeta(&self, n_terms: u64) -> Result<ZetaEnclosure> {
        if n_terms == 0 {
            return Err(Error::TermsFromOne);
        }
        let mut ladder = self.zeta.lock().expect("zeta ladder lock poisoned");
        if let Some(e) = ladder.snapshots.get(&n_terms) {
            return Ok(e.clone());
        }
        let enclosure = if ladder.sum.terms() <= n_terms {
            ladder.sum.extend_to(n_terms);
            ladder.sum.enclosure()?
        } else {
            zeta2_enclosure(n_terms)?
        };
        ladder.snapshots.insert(n_terms, enclosure.clone());
        Ok(enclosure)
    }

    fn ln_unit_width(&self) -> &Rational {
        &self.ln_unit_width
    }

    /// Certified `ln(p_1 ... p_n)` from a cached prefix of per-prime log
    /// enclosures; width grows linearly in `n` at the fixed unit width.
    pub fn ln_primorial(&self, n: u64) -> Result<RationalInterval> {
        if n == 0 {
            return Err(Error::IndexFromOne);
        }
        let mut prefix = self.ln_prefix.lock().expect("ln prefix lock poisoned");
        while (prefix.len() as u64) <= n {
            let idx = prefix.len() as u64;
            let p = self.table.nth_prime(idx)?;
            let next = prefix
                .last()
                .expect("prefix starts nonempty")
                .add(&natlog::ln_u64(p, &self.ln_unit_width)?);
            prefix.push(next);
        }
        Ok(prefix[n as usize].clone())
    }
}

/// Gap enclosure `[a_n/b_n - six.hi, a_n/b_n - six.lo]` at a given term count.
pub fn gap_enclosure(ctx: &ChainContext, n: u64, n_terms: u64) -> Result<RationalInterval> {
    let pp = ctx.trajectory().partial_product(n)?;
    let six = ctx.zeta(n_terms)?.six_over_pi2;
    Ok(six.sub_from(&pp.value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    Auto,
    Fixed(u64),
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub truncation: Policy,
    pub enclosure_terms: Policy,
    pub exact_theorem_threshold: u64,
    /// Ceiling on `K - n` under auto deepening.
    pub k_ceiling_offset: u64,
    /// Ceiling on the zeta term count under auto tightening.
    pub n_terms_ceiling: u64,
}

pub const INITIAL_K_OFFSET: u64 = 64;
pub const INITIAL_N_TERMS: u64 = 16;
pub const DEFAULT_EXACT_THEOREM_THRESHOLD: u64 = 40;
pub const DEFAULT_K_CEILING_OFFSET: u64 = 1_000_000;
pub const DEFAULT_N_TERMS_CEILING: u64 = 1 << 20;

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            truncation: Policy::Auto,
            enclosure_terms: Policy::Auto,
            exact_theorem_threshold: DEFAULT_EXACT_THEOREM_THRESHOLD,
            k_ceiling_offset: DEFAULT_K_CEILING_OFFSET,
            n_terms_ceiling: DEFAULT_N_TERMS_CEILING,
        }
    }
}

/// Everything certified (or honestly not) about one `n`.
#[derive(Debug, Clone)]
pub struct ChainReport {
    pub n: u64,
    pub mu: MuCandidate,
    pub k: u64,
    pub n_terms: u64,
    pub value: Rational,
    pub primorial: num_bigint::BigUint,
    pub gap: RationalInterval,
    pub link1: LinkReport,
    pub link2: LinkReport,
    pub identity: LinkReport,
    pub link3: LinkReport,
    pub link4: LinkReport,
    pub theorem: TheoremReport,
    pub elapsed: Duration,
}

impl ChainReport {
    pub fn links(&self) -> [(&'static str, &LinkReport); 5] {
        [
            ("L1", &self.link1),
            ("L2", &self.link2),
            ("identity", &self.identity),
            ("L3", &self.link3),
            ("L4", &self.link4),
        ]
    }

    pub fn any_falsified(&self) -> bool {
        self.links().iter().any(|(_, l)| l.verdict.is_falsified())
            || self.theorem.verdict.is_falsified()
    }

    pub fn any_inconclusive(&self) -> bool {
        self.links()
            .iter()
            .any(|(_, l)| l.verdict == Verdict::Inconclusive)
            || self.theorem.verdict == Verdict::Inconclusive
    }

    pub fn all_certified(&self) -> bool {
        !self.any_falsified() && !self.any_inconclusive()
    }
}

/// Runs every link check for one `n`, deepening `K` (links 3 and 4) and the
/// enclosure term count (link 1) under the auto policies until nothing
/// inconclusive can still improve. All verdicts in the final report were
/// computed at the single `(K, N)` pair the report carries.
pub fn verify_chain(
    ctx: &ChainContext,
    n: u64,
    mu: &MuCandidate,
    options: &VerifyOptions,
) -> Result<ChainReport> {
    if n == 0 {
        return Err(Error::IndexFromOne);
    }
    let started = Instant::now();
    let pp = ctx.trajectory().partial_product(n)?;

    let (mut k, k_auto) = match options.truncation {
        Policy::Auto => (n + INITIAL_K_OFFSET, true),
        Policy::Fixed(k) => {
            if k <= n {
                return Err(Error::TruncationTooSmall { k, n });
            }
            (k, false)
        }
    };
    let (mut n_terms, n_auto) = match options.enclosure_terms {
        Policy::Auto => (INITIAL_N_TERMS, true),
        Policy::Fixed(t) => {
            if t == 0 {
                return Err(Error::TermsFromOne);
            }
            (t, false)
        }
    };
    let k_ceiling = n + options.k_ceiling_offset;

    let mut previous = None;
    let (k, n_terms, gap, link1, link2, identity, link3, link4) = loop {
        let tb = match tail_bounds(ctx.table(), n, k) {
            Ok(tb) => tb,
            Err(Error::SieveCapExceeded { .. }) if previous.is_some() => {
                break previous.take().expect("checked is_some");
            }
            Err(e) => return Err(e),
        };
        let six = ctx.zeta(n_terms)?.six_over_pi2;
        let gap = six.sub_from(&pp.value);
        let link1 = link1_check(&pp, mu, &gap);
        let link2 = link2_check(&pp);
        let identity = link_identity_check(&pp, &tb, &gap)?;
        let link3 = link3_check(&tb);
        let link4 = link4_check(&tb);

        let deepen_k = k_auto
            && k < k_ceiling
            && (link3.verdict == Verdict::Inconclusive || link4.verdict == Verdict::Inconclusive);
        let raise_terms = n_auto
            && n_terms < options.n_terms_ceiling
            && link1.verdict == Verdict::Inconclusive;
        let state = (k, n_terms, gap, link1, link2, identity, link3, link4);
        if !deepen_k && !raise_terms {
            break state;
        }
        previous = Some(state);
        if deepen_k {
            k = (n + (k - n) * 2).min(k_ceiling);
        }
        if raise_terms {
            n_terms = (n_terms * 2).min(options.n_terms_ceiling);
        }
    };

    let theorem = theorem_check(
        ctx,
        n,
        mu,
        TheoremModeChoice::Auto {
            exact_threshold: options.exact_theorem_threshold,
        },
    )?;

    Ok(ChainReport {
        n,
        mu: mu.clone(),
        k,
        n_terms,
        value: pp.value.clone(),
        primorial: pp.primorial.clone(),
        gap,
        link1,
        link2,
        identity,
        link3,
        link4,
        theorem,
        elapsed: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ChainContext {
        ChainContext::new(Arc::new(PrimeTable::new()))
    }

    fn r(num: i64, den: i64) -> Rational {
        Rational::new(num, den).unwrap()
    }

    fn mu(s: &str) -> MuCandidate {
        s.parse().unwrap()
    }

    #[test]
    fn mu_candidate_validation() {
        assert!(mu("11/2").value() == &r(11, 2));
        assert_eq!(mu("11/2").p(), 11);
        assert_eq!(mu("11/2").q(), 2);
        assert!(!mu("11/2").below_definition_threshold());
        assert!(mu("2/1").below_definition_threshold());
        assert!(mu("1/2").below_definition_threshold());
        assert!(matches!(
            MuCandidate::new(Rational::zero()),
            Err(Error::NonPositiveMu)
        ));
        assert!(matches!(
            MuCandidate::new(r(-3, 2)),
            Err(Error::NonPositiveMu)
        ));
    }

    #[test]
    fn tail_bounds_worked_example() {
        let c = ctx();
        let tb = tail_bounds(c.table(), 1, 5).unwrap();
        assert_eq!(tb.p_next, 3);
        assert_eq!(tb.p_last, 11);
        assert_eq!(tb.sum_lo, r(239836, 1334025));
        assert_eq!(tb.sum_hi, r(3972221, 14674275));
        assert!(tb.sum_hi < r(1, 3));
        let expected_prod: Rational = [3u64, 5, 7, 11]
            .iter()
            .map(|&p| Rational::new(p * p - 1, p * p).unwrap())
            .fold(Rational::one(), |acc, f| &acc * &f);
        assert_eq!(tb.prod_hi, expected_prod);
        assert_eq!(tb.prod_lo, &tb.prod_hi * &r(10, 11));
    }

    #[test]
    fn tail_bounds_single_term_window() {
        let c = ctx();
        for n in [1u64, 2, 10] {
            let tb = tail_bounds(c.table(), n, n + 1).unwrap();
            let p = c.table().nth_prime(n + 1).unwrap();
            assert_eq!(tb.sum_lo, Rational::new(1u64, p * p).unwrap());
            assert_eq!(
                tb.prod_hi,
                &Rational::one() - &Rational::new(1u64, p * p).unwrap()
            );
        }
    }

    #[test]
    fn tail_bounds_rejects_bad_truncation() {
        let c = ctx();
        assert!(matches!(
            tail_bounds(c.table(), 5, 5),
            Err(Error::TruncationTooSmall { k: 5, n: 5 })
        ));
        assert!(matches!(
            tail_bounds(c.table(), 5, 3),
            Err(Error::TruncationTooSmall { .. })
        ));
        assert!(tail_bounds(c.table(), 0, 5).is_err());
    }

    #[test]
    fn gap_enclosure_worked_examples() {
        let c = ctx();
        let gap = gap_enclosure(&c, 1, 2).unwrap();
        assert_eq!(gap.lo(), &r(9, 76));
        assert_eq!(gap.hi(), &r(5, 28));

        let gap2 = gap_enclosure(&c, 2, 2).unwrap();
        assert_eq!(gap2.lo(), &r(2, 57));
        assert_eq!(gap2.hi(), &r(2, 21));
    }

    #[test]
    fn link1_certifies_the_n1_mu3_instance() {
        let c = ctx();
        let pp = c.trajectory().partial_product(1).unwrap();
        let gap = gap_enclosure(&c, 1, 2).unwrap();
        let report = link1_check(&pp, &mu("3/1"), &gap);
        assert_eq!(report.verdict, Verdict::Certified);
        let beat = report
            .comparisons
            .iter()
            .find(|c| c.name == "measure_beaten_at_gap_lo")
            .unwrap();
        assert_eq!(beat.lhs, BigInt::from(576));
        assert_eq!(beat.rhs, BigInt::from(76));
    }

    #[test]
    fn link1_inconclusive_on_nonpositive_gap_lo() {
        let c = ctx();
        let pp = c.trajectory().partial_product(1).unwrap();
        let coarse = RationalInterval::new(r(0, 1), r(5, 28)).unwrap();
        let report = link1_check(&pp, &mu("3/1"), &coarse);
        assert_eq!(report.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn link1_falsifies_mu_one_at_n2() {
        let c = ctx();
        let pp = c.trajectory().partial_product(2).unwrap();
        let gap = gap_enclosure(&c, 2, 2).unwrap();
        let report = link1_check(&pp, &mu("1/1"), &gap);
        assert_eq!(report.verdict, Verdict::Falsified);
        let hi = report
            .comparisons
            .iter()
            .find(|c| c.name == "measure_beaten_at_gap_hi")
            .unwrap();
        assert_eq!(hi.lhs, BigInt::from(6));
        assert_eq!(hi.rhs, BigInt::from(21));
        assert!(!hi.holds);
    }

    #[test]
    fn link2_small_cases() {
        let c = ctx();
        for n in [1u64, 2, 4, 50] {
            let pp = c.trajectory().partial_product(n).unwrap();
            assert_eq!(link2_check(&pp).verdict, Verdict::Certified);
        }
    }

    #[test]
    fn identity_overlaps_on_consistent_inputs() {
        let c = ctx();
        for (n, k, n_terms) in [(1u64, 5u64, 2u64), (2, 6, 4), (1, 2, 1)] {
            let pp = c.trajectory().partial_product(n).unwrap();
            let tb = tail_bounds(c.table(), n, k).unwrap();
            let gap = gap_enclosure(&c, n, n_terms).unwrap();
            let report = link_identity_check(&pp, &tb, &gap).unwrap();
            assert_eq!(report.verdict, Verdict::Certified, "n={n} K={k} N={n_terms}");
        }
    }

    #[test]
    fn identity_never_errors_up_to_200() {
        let c = ctx();
        for n in 1..=200u64 {
            let pp = c.trajectory().partial_product(n).unwrap();
            let tb = tail_bounds(c.table(), n, n + 64).unwrap();
            let gap = gap_enclosure(&c, n, 64).unwrap();
            assert!(link_identity_check(&pp, &tb, &gap).is_ok(), "n = {n}");
        }
    }

    #[test]
    fn digit_count_matches_hand_expansion() {
        let c = ctx();
        let mu = MuCandidate::new(r(3, 1)).unwrap();
        // primorial_3 = 30, 30^6 = 729_000_000: nine digits.
        assert_eq!(bound_digit_count(&c, 3, &mu, 40).unwrap(), "9");
        let half = MuCandidate::new(r(5, 2)).unwrap();
        // 30^5 = 24_300_000: eight digits.
        assert_eq!(bound_digit_count(&c, 3, &half, 40).unwrap(), "8");
        let one = MuCandidate::new(r(1, 1)).unwrap();
        // 2^2 = 4: one digit.
        assert_eq!(bound_digit_count(&c, 1, &one, 40).unwrap(), "1");
    }

    #[test]
    fn digit_count_log_path_agrees_with_exact() {
        let c = ctx();
        let mu = MuCandidate::new(r(11, 2)).unwrap();
        for n in [41u64, 60, 80] {
            let exact = bound_digit_count(&c, n, &mu, 100).unwrap();
            let logged = bound_digit_count(&c, n, &mu, 40).unwrap();
            assert_eq!(logged, exact, "n = {n}");
        }
    }

    #[test]
    fn link3_certifies_adaptively_and_stalls_when_coarse() {
        let c = ctx();
        let fine = tail_bounds(c.table(), 1, 65).unwrap();
        assert_eq!(link3_check(&fine).verdict, Verdict::Certified);

        let coarse = tail_bounds(c.table(), 1, 2).unwrap();
        assert_eq!(link3_check(&coarse).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn link3_never_falsifies_structurally() {
        let c = ctx();
        for n in 1..=60u64 {
            for offset in [1u64, 2, 8, 64] {
                let tb = tail_bounds(c.table(), n, n + offset).unwrap();
                let one_minus_prod_hi = &Rational::one() - &tb.prod_hi;
                assert!(one_minus_prod_hi < tb.sum_hi, "n={n} K=n+{offset}");
                assert_ne!(link3_check(&tb).verdict, Verdict::Falsified);
            }
        }
    }

    #[test]
    fn link4_worked_examples() {
        let c = ctx();
        let tb = tail_bounds(c.table(), 1, 5).unwrap();
        assert_eq!(link4_check(&tb).verdict, Verdict::Certified);

        let tb2 = tail_bounds(c.table(), 2, 6).unwrap();
        assert_eq!(link4_check(&tb2).verdict, Verdict::Certified);
        let expected = &(&(&r(1, 25) + &r(1, 49)) + &(&r(1, 121) + &r(1, 169))) + &r(1, 13);
        assert_eq!(tb2.sum_hi, expected);

        let coarse = tail_bounds(c.table(), 1, 2).unwrap();
        assert_eq!(coarse.sum_hi, r(4, 9));
        assert_eq!(link4_check(&coarse).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn theorem_exact_small_instances() {
        let c = ctx();
        let exact = |n: u64, m: &str| {
            theorem_check(&c, n, &mu(m), TheoremModeChoice::Exact)
                .unwrap()
                .verdict
        };
        assert_eq!(exact(1, "3/1"), Verdict::Certified);
        assert_eq!(exact(2, "5/2"), Verdict::Certified);
        assert_eq!(exact(1, "1/1"), Verdict::Certified);
        assert_eq!(exact(1, "1/2"), Verdict::Falsified);
    }

    #[test]
    fn theorem_log_agrees_with_exact_up_to_30() {
        let c = ctx();
        for m in ["5/2", "3/1", "11/2"] {
            for n in 1..=30u64 {
                let exact = theorem_check(&c, n, &mu(m), TheoremModeChoice::Exact).unwrap();
                let log = theorem_check(&c, n, &mu(m), TheoremModeChoice::Log).unwrap();
                assert_eq!(exact.verdict, log.verdict, "n={n} mu={m}");
                assert_eq!(log.mode, TheoremMode::Log);
                assert_eq!(exact.mode, TheoremMode::Exact);
            }
        }
    }

    #[test]
    fn verify_chain_certifies_n1_mu3() {
        let c = ctx();
        let report = verify_chain(&c, 1, &mu("3/1"), &VerifyOptions::default()).unwrap();
        assert!(report.all_certified());
        assert_eq!(report.theorem.mode, TheoremMode::Exact);
    }

    #[test]
    fn verify_chain_falsifies_mu1_at_n2() {
        let c = ctx();
        let report = verify_chain(&c, 2, &mu("1/1"), &VerifyOptions::default()).unwrap();
        assert_eq!(report.link1.verdict, Verdict::Falsified);
        assert_eq!(report.link2.verdict, Verdict::Certified);
        assert_eq!(report.link3.verdict, Verdict::Certified);
        assert_eq!(report.link4.verdict, Verdict::Certified);
        assert_eq!(report.theorem.verdict, Verdict::Certified);
        assert!(report.any_falsified());
    }

    #[test]
    fn verify_chain_fixed_coarse_params_stay_inconclusive() {
        let c = ctx();
        let options = VerifyOptions {
            truncation: Policy::Fixed(2),
            enclosure_terms: Policy::Fixed(1),
            ..VerifyOptions::default()
        };
        let report = verify_chain(&c, 1, &mu("3/1"), &options).unwrap();
        assert_eq!(report.k, 2);
        assert_eq!(report.n_terms, 1);
        assert_eq!(report.link3.verdict, Verdict::Inconclusive);
        assert_eq!(report.link4.verdict, Verdict::Inconclusive);
        assert!(report.any_inconclusive());
    }

    #[test]
    fn verify_chain_rejects_fixed_k_at_or_below_n() {
        let c = ctx();
        let options = VerifyOptions {
            truncation: Policy::Fixed(3),
            ..VerifyOptions::default()
        };
        assert!(matches!(
            verify_chain(&c, 3, &mu("3/1"), &options),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn monotone_certification_in_mu() {
        let c = ctx();
        let ladder = ["5/2", "3/1", "7/2", "11/2"];
        for n in [1u64, 3, 10, 25, 60] {
            let mut certified_below = false;
            for m in ladder {
                let report = verify_chain(&c, n, &mu(m), &VerifyOptions::default()).unwrap();
                if certified_below {
                    assert_eq!(
                        report.link1.verdict,
                        Verdict::Certified,
                        "monotonicity broken at n={n} mu={m}"
                    );
                }
                if report.link1.verdict == Verdict::Certified {
                    certified_below = true;
                }
            }
        }
    }

    #[test]
    fn deeper_truncation_never_degrades(){
        let c = ctx();
        let m = mu("11/2");
        for n in [1u64, 5, 20, 50] {
            let shallow = verify_chain(
                &c,
                n,
                &m,
                &VerifyOptions {
                    truncation: Policy::Fixed(n + 16),
                    ..VerifyOptions::default()
                },
            )
            .unwrap();
            let deep = verify_chain(
                &c,
                n,
                &m,
                &VerifyOptions {
                    truncation: Policy::Fixed(n + 32),
                    ..VerifyOptions::default()
                },
            )
            .unwrap();
            for ((name, s), (_, d)) in shallow.links().iter().zip(deep.links().iter()) {
                assert!(
                    d.verdict.refines(s.verdict),
                    "verdict degraded for {name} at n={n}"
                );
            }
        }
    }
}
