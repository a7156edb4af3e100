//! Serialized run reports and the independent replay checker.
//!
//! A verification run serializes to one JSON document (schema `euler-gap/1`)
//! whose rows carry, per link, the named rational bounds and the exact
//! integer comparisons behind each verdict. The CSV export flattens the same
//! values field for field. `replay_verify` audits a document from its
//! serialized operands alone: every comparison is re-evaluated, every operand
//! that is derivable from the witness bounds is re-derived bit for bit, and
//! every verdict is re-checked against its link's decision rule.

use crate::chain::{big_pow, ChainReport, Comparison, LinkReport, MuCandidate, Relation};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::verdict::Verdict;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SCHEMA: &str = "euler-gap/1";

/// Configuration echo: the exact inputs that produced a document.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct ConfigEcho {
    pub subcommand: String,
    pub n: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<String>,
    pub truncation: String,
    pub enclosure_terms: String,
    pub format: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    pub verbosity: u8,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub certified: usize,
    pub falsified: usize,
    pub inconclusive: usize,
    /// Smallest index from which link 1 was certified for every larger index
    /// in the run, if any.
    pub link1_certified_from: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComparisonOut {
    pub name: String,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct WitnessesOut {
    pub bounds: BTreeMap<String, String>,
    pub comparisons: Vec<ComparisonOut>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LinkOut {
    pub status: Verdict,
    pub witnesses: WitnessesOut,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LinksOut {
    #[serde(rename = "L1")]
    pub l1: LinkOut,
    #[serde(rename = "L2")]
    pub l2: LinkOut,
    pub identity: LinkOut,
    #[serde(rename = "L3")]
    pub l3: LinkOut,
    #[serde(rename = "L4")]
    pub l4: LinkOut,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TheoremOut {
    pub status: Verdict,
    pub mode: String,
    pub witnesses: WitnessesOut,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReportRow {
    pub n: u64,
    pub mu: String,
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "N")]
    pub n_terms: u64,
    pub links: LinksOut,
    pub theorem: TheoremOut,
    pub a_n: String,
    pub b_n: String,
    pub primorial: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RunReport {
    pub schema: String,
    pub config: ConfigEcho,
    pub summary: Summary,
    pub reports: Vec<ReportRow>,
}

fn witnesses_out(bounds: &[(String, Rational)], comparisons: &[Comparison]) -> WitnessesOut {
    WitnessesOut {
        bounds: bounds
            .iter()
            .map(|(name, value)| (name.clone(), value.to_string()))
            .collect(),
        comparisons: comparisons
            .iter()
            .map(|c| ComparisonOut {
                name: c.name.clone(),
                lhs: c.lhs.to_string(),
                relation: c.relation.symbol().to_string(),
                rhs: c.rhs.to_string(),
                holds: c.holds,
            })
            .collect(),
    }
}

fn link_out(link: &LinkReport) -> LinkOut {
    LinkOut {
        status: link.verdict,
        witnesses: witnesses_out(&link.bounds, &link.comparisons),
    }
}

impl ReportRow {
    pub fn from_chain(report: &ChainReport) -> Self {
        ReportRow {
            n: report.n,
            mu: report.mu.value().to_string(),
            k: report.k,
            n_terms: report.n_terms,
            links: LinksOut {
                l1: link_out(&report.link1),
                l2: link_out(&report.link2),
                identity: link_out(&report.identity),
                l3: link_out(&report.link3),
                l4: link_out(&report.link4),
            },
            theorem: TheoremOut {
                status: report.theorem.verdict,
                mode: report.theorem.mode.as_str().to_string(),
                witnesses: witnesses_out(&report.theorem.bounds, &report.theorem.comparisons),
            },
            a_n: report.value.numer().to_string(),
            b_n: report.value.denom().to_string(),
            primorial: report.primorial.to_string(),
        }
    }
}

/// Builds the verification document for a batch of per-n reports.
pub fn run_report(config: ConfigEcho, reports: &[ChainReport]) -> RunReport {
    let rows: Vec<ReportRow> = reports.iter().map(ReportRow::from_chain).collect();
    let certified = reports.iter().filter(|r| r.all_certified()).count();
    let falsified = reports.iter().filter(|r| r.any_falsified()).count();
    let inconclusive = reports
        .iter()
        .filter(|r| !r.any_falsified() && r.any_inconclusive())
        .count();
    let link1_certified_from = reports
        .iter()
        .rev()
        .take_while(|r| r.link1.verdict.is_certified())
        .last()
        .map(|r| r.n);
    RunReport {
        schema: SCHEMA.to_string(),
        config,
        summary: Summary {
            total: reports.len(),
            certified,
            falsified,
            inconclusive,
            link1_certified_from,
        },
        reports: rows,
    }
}

/// Column order shared by the CSV writer and the CSV/JSON equality test.
pub fn csv_header() -> Vec<&'static str> {
    vec![
        "n",
        "mu",
        "K",
        "N",
        "L1_status",
        "L2_status",
        "identity_status",
        "L3_status",
        "L4_status",
        "theorem_status",
        "theorem_mode",
        "gap_lo",
        "gap_hi",
        "sum_lo",
        "sum_hi",
        "prod_lo",
        "prod_hi",
        "a_n",
        "b_n",
        "primorial",
    ]
}

fn bound<'a>(witnesses: &'a WitnessesOut, name: &str) -> Result<&'a String> {
    witnesses
        .bounds
        .get(name)
        .ok_or_else(|| Error::MalformedReport(format!("missing bound '{name}'")))
}

/// Flattens one row into the csv_header column order; every value is the
/// exact string from the JSON document.
pub fn csv_record(row: &ReportRow) -> Result<Vec<String>> {
    Ok(vec![
        row.n.to_string(),
        row.mu.clone(),
        row.k.to_string(),
        row.n_terms.to_string(),
        row.links.l1.status.to_string(),
        row.links.l2.status.to_string(),
        row.links.identity.status.to_string(),
        row.links.l3.status.to_string(),
        row.links.l4.status.to_string(),
        row.theorem.status.to_string(),
        row.theorem.mode.clone(),
        bound(&row.links.l1.witnesses, "gap_lo")?.clone(),
        bound(&row.links.l1.witnesses, "gap_hi")?.clone(),
        bound(&row.links.l3.witnesses, "sum_lo")?.clone(),
        bound(&row.links.l3.witnesses, "sum_hi")?.clone(),
        bound(&row.links.l3.witnesses, "prod_lo")?.clone(),
        bound(&row.links.l3.witnesses, "prod_hi")?.clone(),
        row.a_n.clone(),
        row.b_n.clone(),
        row.primorial.clone(),
    ])
}

/// Envelope for the non-verification subcommand outputs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Document<T> {
    pub schema: String,
    pub config: ConfigEcho,
    pub rows: Vec<T>,
}

impl<T> Document<T> {
    pub fn new(config: ConfigEcho, rows: Vec<T>) -> Self {
        Document {
            schema: SCHEMA.to_string(),
            config,
            rows,
        }
    }
}

/// One exponent-scan row; enclosure endpoints stay exact, the midpoint is a
/// convenience only.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScanRow {
    pub n: u64,
    pub b_n: String,
    pub gap_lo: String,
    pub gap_hi: String,
    pub mu_lo: String,
    pub mu_hi: String,
    pub midpoint: String,
    pub width_ok: bool,
    pub running_max_mu_hi: String,
}

pub fn scan_csv_header() -> Vec<&'static str> {
    vec![
        "n",
        "b_n",
        "gap_lo",
        "gap_hi",
        "mu_lo",
        "mu_hi",
        "midpoint",
        "width_ok",
        "running_max_mu_hi",
    ]
}

pub fn scan_csv_record(row: &ScanRow) -> Vec<String> {
    vec![
        row.n.to_string(),
        row.b_n.clone(),
        row.gap_lo.clone(),
        row.gap_hi.clone(),
        row.mu_lo.clone(),
        row.mu_hi.clone(),
        row.midpoint.clone(),
        row.width_ok.to_string(),
        row.running_max_mu_hi.clone(),
    ]
}

/// One row of the primes table: Bertrand's check and the theorem bound
/// side by side, with the digit count of `primorial^(2 mu)` (a leading `~`
/// marks a certified-log estimate whose last digit could not be pinned).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TableRow {
    pub n: u64,
    pub p_n: u64,
    pub p_next: u64,
    pub twice_p_n: u64,
    pub bertrand_holds: bool,
    pub bound_digits: String,
    pub theorem_status: Verdict,
    pub theorem_mode: String,
}

pub fn table_csv_header() -> Vec<&'static str> {
    vec![
        "n",
        "p_n",
        "p_next",
        "twice_p_n",
        "bertrand_holds",
        "bound_digits",
        "theorem_status",
        "theorem_mode",
    ]
}

pub fn table_csv_record(row: &TableRow) -> Vec<String> {
    vec![
        row.n.to_string(),
        row.p_n.to_string(),
        row.p_next.to_string(),
        row.twice_p_n.to_string(),
        row.bertrand_holds.to_string(),
        row.bound_digits.clone(),
        row.theorem_status.to_string(),
        row.theorem_mode.clone(),
    ]
}

/// One zeta-enclosure row, exact endpoints and widths.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct EnclosureRow {
    pub terms: u64,
    pub zeta2_lo: String,
    pub zeta2_hi: String,
    pub zeta2_width: String,
    pub six_lo: String,
    pub six_hi: String,
    pub six_width: String,
}

pub fn enclosure_csv_header() -> Vec<&'static str> {
    vec![
        "terms",
        "zeta2_lo",
        "zeta2_hi",
        "zeta2_width",
        "six_lo",
        "six_hi",
        "six_width",
    ]
}

pub fn enclosure_csv_record(row: &EnclosureRow) -> Vec<String> {
    vec![
        row.terms.to_string(),
        row.zeta2_lo.clone(),
        row.zeta2_hi.clone(),
        row.zeta2_width.clone(),
        row.six_lo.clone(),
        row.six_hi.clone(),
        row.six_width.clone(),
    ]
}

/// One partial-product trajectory row with the denominator factorization.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TrajectoryRow {
    pub n: u64,
    pub a_n: String,
    pub b_n: String,
    pub primorial: String,
    pub cofactor: String,
}

pub fn trajectory_csv_header() -> Vec<&'static str> {
    vec!["n", "a_n", "b_n", "primorial", "cofactor"]
}

pub fn trajectory_csv_record(row: &TrajectoryRow) -> Vec<String> {
    vec![
        row.n.to_string(),
        row.a_n.clone(),
        row.b_n.clone(),
        row.primorial.clone(),
        row.cofactor.clone(),
    ]
}

/// Outcome of replaying a serialized verification document.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub schema: String,
    pub input: String,
    pub rows_checked: usize,
    pub clean: bool,
    pub disagreements: Vec<String>,
}

struct RowAudit<'a> {
    label: String,
    disagreements: &'a mut Vec<String>,
}

impl RowAudit<'_> {
    fn flag(&mut self, message: impl AsRef<str>) {
        self.disagreements
            .push(format!("{}: {}", self.label, message.as_ref()));
    }

    fn parse_int(&mut self, what: &str, s: &str) -> Option<BigInt> {
        match s.parse::<BigInt>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.flag(format!("{what} is not an integer: '{s}'"));
                None
            }
        }
    }

    fn parse_rational(&mut self, what: &str, s: &str) -> Option<Rational> {
        match s.parse::<Rational>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.flag(format!("{what} is not a rational: '{s}'"));
                None
            }
        }
    }

    fn bound(&mut self, witnesses: &WitnessesOut, name: &str) -> Option<Rational> {
        match witnesses.bounds.get(name) {
            Some(s) => self.parse_rational(&format!("bound '{name}'"), s),
            None => {
                self.flag(format!("missing bound '{name}'"));
                None
            }
        }
    }

    /// Re-evaluates the named comparison from its serialized operands and,
    /// when expectations are supplied, re-derives the operands bit for bit.
    fn comparison(
        &mut self,
        witnesses: &WitnessesOut,
        name: &str,
        expected: Option<(&BigInt, Relation, &BigInt)>,
    ) -> Option<bool> {
        let found = witnesses.comparisons.iter().find(|c| c.name == name);
        let c = match found {
            Some(c) => c,
            None => {
                self.flag(format!("missing comparison '{name}'"));
                return None;
            }
        };
        let lhs = self.parse_int(&format!("comparison '{name}' lhs"), &c.lhs)?;
        let rhs = self.parse_int(&format!("comparison '{name}' rhs"), &c.rhs)?;
        let relation = match c.relation.parse::<Relation>() {
            Ok(r) => r,
            Err(_) => {
                self.flag(format!(
                    "comparison '{name}' has unknown relation '{}'",
                    c.relation
                ));
                return None;
            }
        };
        if relation.eval(&lhs, &rhs) != c.holds {
            self.flag(format!(
                "comparison '{name}' recorded holds={} but {} {} {} evaluates otherwise",
                c.holds,
                lhs,
                relation.symbol(),
                rhs
            ));
            return None;
        }
        if let Some((want_lhs, want_relation, want_rhs)) = expected {
            if relation != want_relation {
                self.flag(format!(
                    "comparison '{name}' relation is '{}', re-derivation gives '{}'",
                    relation.symbol(),
                    want_relation.symbol()
                ));
                return None;
            }
            if &lhs != want_lhs || &rhs != want_rhs {
                self.flag(format!("comparison '{name}' operands do not re-derive"));
                return None;
            }
        }
        Some(c.holds)
    }

    fn expect_status(&mut self, what: &str, recorded: Verdict, derived: Option<Verdict>) {
        match derived {
            Some(v) if v != recorded => {
                self.flag(format!("{what} status is {recorded}, replay derives {v}"));
            }
            _ => {}
        }
    }

    /// Flags witness entries outside the schema for this link; an injected
    /// bound or comparison cannot be validated, so its presence is itself a
    /// disagreement.
    fn expect_names(
        &mut self,
        witnesses: &WitnessesOut,
        what: &str,
        bounds: &[&str],
        comparisons: &[&str],
    ) {
        for name in witnesses.bounds.keys() {
            if !bounds.contains(&name.as_str()) {
                self.flag(format!("{what} carries unknown bound '{name}'"));
            }
        }
        for c in &witnesses.comparisons {
            if !comparisons.contains(&c.name.as_str()) {
                self.flag(format!("{what} carries unknown comparison '{}'", c.name));
            }
        }
    }
}

fn cross(lhs: &Rational, rhs: &Rational) -> (BigInt, BigInt) {
    (lhs.numer() * rhs.denom(), rhs.numer() * lhs.denom())
}

fn three_way(certify: Option<bool>, falsify: Option<bool>) -> Option<Verdict> {
    match (certify, falsify) {
        (Some(true), _) => Some(Verdict::Certified),
        (Some(false), Some(true)) => Some(Verdict::Falsified),
        (Some(false), Some(false)) => Some(Verdict::Inconclusive),
        _ => None,
    }
}

fn audit_link1(
    audit: &mut RowAudit<'_>,
    link: &LinkOut,
    mu: &MuCandidate,
    b_n: &BigInt,
) -> Option<(Rational, Rational)> {
    let w = &link.witnesses;
    audit.expect_names(
        w,
        "L1",
        &["gap_lo", "gap_hi"],
        &[
            "gap_lo_positive",
            "gap_hi_positive",
            "measure_beaten_at_gap_lo",
            "measure_beaten_at_gap_hi",
        ],
    );
    let (Some(gap_lo), Some(gap_hi)) = (audit.bound(w, "gap_lo"), audit.bound(w, "gap_hi")) else {
        return None;
    };
    let b_pow = big_pow(b_n, mu.p());
    let zero = BigInt::zero();

    let lo_positive = audit.comparison(
        w,
        "gap_lo_positive",
        Some((gap_lo.numer(), Relation::Gt, &zero)),
    );
    let lo_beats = if gap_lo.is_positive() {
        let lhs = big_pow(gap_lo.numer(), mu.q()) * &b_pow;
        let rhs = big_pow(gap_lo.denom(), mu.q());
        audit.comparison(w, "measure_beaten_at_gap_lo", Some((&lhs, Relation::Gt, &rhs)))
    } else {
        None
    };
    let hi_positive = audit.comparison(
        w,
        "gap_hi_positive",
        Some((gap_hi.numer(), Relation::Gt, &zero)),
    );
    let hi_beats = if gap_hi.is_positive() {
        let lhs = big_pow(gap_hi.numer(), mu.q()) * &b_pow;
        let rhs = big_pow(gap_hi.denom(), mu.q());
        audit.comparison(w, "measure_beaten_at_gap_hi", Some((&lhs, Relation::Gt, &rhs)))
    } else {
        None
    };

    let derived = match (lo_positive, hi_positive) {
        (Some(lp), Some(hp)) => {
            let certified = lp && lo_beats == Some(true);
            let falsified = !hp || hi_beats == Some(false);
            Some(if certified {
                Verdict::Certified
            } else if falsified {
                Verdict::Falsified
            } else {
                Verdict::Inconclusive
            })
        }
        _ => None,
    };
    audit.expect_status("L1", link.status, derived);
    Some((gap_lo, gap_hi))
}

fn audit_link2(audit: &mut RowAudit<'_>, link: &LinkOut, value: Option<&Rational>) {
    let w = &link.witnesses;
    audit.expect_names(w, "L2", &["a_n_over_b_n"], &["numerator_below_denominator"]);
    let recorded = audit.bound(w, "a_n_over_b_n");
    if let (Some(recorded), Some(value)) = (&recorded, value) {
        if *recorded != *value {
            audit.flag(format!(
                "bound 'a_n_over_b_n' is {recorded}, row carries {value}"
            ));
        }
    }
    let Some(value) = value else {
        return;
    };
    let holds = audit.comparison(
        w,
        "numerator_below_denominator",
        Some((value.numer(), Relation::Lt, value.denom())),
    );
    let derived = holds.map(|h| {
        if h {
            Verdict::Certified
        } else {
            Verdict::Falsified
        }
    });
    audit.expect_status("L2", link.status, derived);
}

/// Tail witnesses shared by links 3 and 4.
struct TailWitness {
    sum_lo: Rational,
    sum_hi: Rational,
    prod_lo: Rational,
    prod_hi: Rational,
}

fn audit_identity(
    audit: &mut RowAudit<'_>,
    link: &LinkOut,
    gap: Option<&(Rational, Rational)>,
    value: Option<&Rational>,
    tail: Option<&TailWitness>,
) {
    let w = &link.witnesses;
    audit.expect_names(
        w,
        "identity",
        &["identity_lo", "identity_hi", "gap_lo", "gap_hi"],
        &["identity_lo_le_gap_hi", "gap_lo_le_identity_hi"],
    );
    let lo = audit.bound(w, "identity_lo");
    let hi = audit.bound(w, "identity_hi");
    let gap_lo = audit.bound(w, "gap_lo");
    let gap_hi = audit.bound(w, "gap_hi");
    let (Some(lo), Some(hi), Some(gap_lo), Some(gap_hi)) = (lo, hi, gap_lo, gap_hi) else {
        return;
    };
    if let Some((l1_lo, l1_hi)) = gap {
        if *l1_lo != gap_lo || *l1_hi != gap_hi {
            audit.flag("identity gap bounds disagree with the L1 gap bounds");
        }
    }
    if let (Some(value), Some(tail)) = (value, tail) {
        let want_lo = value * &(&Rational::one() - &tail.prod_hi);
        let want_hi = value * &(&Rational::one() - &tail.prod_lo);
        if lo != want_lo || hi != want_hi {
            audit.flag(
                "identity bounds do not re-derive from a_n/b_n and the L3 product tail bounds",
            );
        }
    }
    let (l1, r1) = cross(&lo, &gap_hi);
    let left = audit.comparison(w, "identity_lo_le_gap_hi", Some((&l1, Relation::Le, &r1)));
    let (l2, r2) = cross(&gap_lo, &hi);
    let right = audit.comparison(w, "gap_lo_le_identity_hi", Some((&l2, Relation::Le, &r2)));
    if left == Some(false) || right == Some(false) {
        audit.flag("identity enclosures are disjoint in the serialized witnesses");
    }
    audit.expect_status(
        "identity",
        link.status,
        (left == Some(true) && right == Some(true)).then_some(Verdict::Certified),
    );
}

fn audit_link3(audit: &mut RowAudit<'_>, link: &LinkOut) -> Option<TailWitness> {
    let w = &link.witnesses;
    audit.expect_names(
        w,
        "L3",
        &["sum_lo", "sum_hi", "prod_lo", "prod_hi", "p_next"],
        &[
            "one_minus_prod_hi_below_sum_lo",
            "one_minus_prod_hi_at_least_sum_hi",
        ],
    );
    let sum_lo = audit.bound(w, "sum_lo");
    let sum_hi = audit.bound(w, "sum_hi");
    let prod_lo = audit.bound(w, "prod_lo");
    let prod_hi = audit.bound(w, "prod_hi");
    let (Some(sum_lo), Some(sum_hi), Some(prod_lo), Some(prod_hi)) =
        (sum_lo, sum_hi, prod_lo, prod_hi)
    else {
        return None;
    };
    if sum_hi < sum_lo || prod_hi < prod_lo {
        audit.flag("L3 tail bounds are reversed");
    }
    let u = &Rational::one() - &prod_hi;
    let (cl, cr) = cross(&u, &sum_lo);
    let certify = audit.comparison(
        w,
        "one_minus_prod_hi_below_sum_lo",
        Some((&cl, Relation::Lt, &cr)),
    );
    let (fl, fr) = cross(&u, &sum_hi);
    let falsify = audit.comparison(
        w,
        "one_minus_prod_hi_at_least_sum_hi",
        Some((&fl, Relation::Ge, &fr)),
    );
    audit.expect_status("L3", link.status, three_way(certify, falsify));
    Some(TailWitness {
        sum_lo,
        sum_hi,
        prod_lo,
        prod_hi,
    })
}

fn audit_link4(audit: &mut RowAudit<'_>, link: &LinkOut, tail: Option<&TailWitness>) {
    let w = &link.witnesses;
    audit.expect_names(
        w,
        "L4",
        &["sum_lo", "sum_hi", "prod_lo", "prod_hi", "p_next"],
        &[
            "sum_hi_below_reciprocal_p_next",
            "sum_lo_at_least_reciprocal_p_next",
        ],
    );
    let sum_lo = audit.bound(w, "sum_lo");
    let sum_hi = audit.bound(w, "sum_hi");
    let p_next = audit.bound(w, "p_next");
    let (Some(sum_lo), Some(sum_hi), Some(p_next)) = (sum_lo, sum_hi, p_next) else {
        return;
    };
    if let Some(tail) = tail {
        let prod_lo = audit.bound(w, "prod_lo");
        let prod_hi = audit.bound(w, "prod_hi");
        if sum_lo != tail.sum_lo
            || sum_hi != tail.sum_hi
            || prod_lo.as_ref() != Some(&tail.prod_lo)
            || prod_hi.as_ref() != Some(&tail.prod_hi)
        {
            audit.flag("L4 tail bounds disagree with the L3 tail bounds");
        }
    }
    if !p_next.is_integer() || !p_next.is_positive() {
        audit.flag(format!("bound 'p_next' is not a positive integer: {p_next}"));
    }
    let Some(reciprocal) = p_next.recip().ok() else {
        audit.flag("bound 'p_next' is zero");
        return;
    };
    let (cl, cr) = cross(&sum_hi, &reciprocal);
    let certify = audit.comparison(
        w,
        "sum_hi_below_reciprocal_p_next",
        Some((&cl, Relation::Lt, &cr)),
    );
    let (fl, fr) = cross(&sum_lo, &reciprocal);
    let falsify = audit.comparison(
        w,
        "sum_lo_at_least_reciprocal_p_next",
        Some((&fl, Relation::Ge, &fr)),
    );
    audit.expect_status("L4", link.status, three_way(certify, falsify));
}

fn audit_theorem(
    audit: &mut RowAudit<'_>,
    theorem: &TheoremOut,
    mu: &MuCandidate,
    primorial: &BigInt,
) {
    let w = &theorem.witnesses;
    match theorem.mode.as_str() {
        "exact" => {
            audit.expect_names(
                w,
                "theorem",
                &["p_next"],
                &["next_prime_pow_q_below_primorial_pow_2p"],
            );
            let Some(p_next) = audit.bound(w, "p_next") else {
                return;
            };
            let lhs = big_pow(p_next.numer(), mu.q());
            let rhs = big_pow(primorial, 2 * mu.p());
            let holds = audit.comparison(
                w,
                "next_prime_pow_q_below_primorial_pow_2p",
                Some((&lhs, Relation::Lt, &rhs)),
            );
            let derived = holds.map(|h| {
                if h {
                    Verdict::Certified
                } else {
                    Verdict::Falsified
                }
            });
            audit.expect_status("theorem", theorem.status, derived);
        }
        "log" => {
            audit.expect_names(
                w,
                "theorem",
                &["log_lhs_lo", "log_lhs_hi", "log_rhs_lo", "log_rhs_hi"],
                &["log_lhs_hi_below_rhs_lo", "log_lhs_lo_at_least_rhs_hi"],
            );
            let lhs_lo = audit.bound(w, "log_lhs_lo");
            let lhs_hi = audit.bound(w, "log_lhs_hi");
            let rhs_lo = audit.bound(w, "log_rhs_lo");
            let rhs_hi = audit.bound(w, "log_rhs_hi");
            let (Some(lhs_lo), Some(lhs_hi), Some(rhs_lo), Some(rhs_hi)) =
                (lhs_lo, lhs_hi, rhs_lo, rhs_hi)
            else {
                return;
            };
            let (cl, cr) = cross(&lhs_hi, &rhs_lo);
            let certify =
                audit.comparison(w, "log_lhs_hi_below_rhs_lo", Some((&cl, Relation::Lt, &cr)));
            let (fl, fr) = cross(&lhs_lo, &rhs_hi);
            let falsify = audit.comparison(
                w,
                "log_lhs_lo_at_least_rhs_hi",
                Some((&fl, Relation::Ge, &fr)),
            );
            audit.expect_status("theorem", theorem.status, three_way(certify, falsify));
        }
        other => audit.flag(format!("unknown theorem mode '{other}'")),
    }
}

/// Audits a serialized document without recomputing any enclosure: operands
/// are re-derived from the witness bounds, relations are re-evaluated, and
/// verdicts are re-checked. Returns one human-readable line per
/// disagreement; an empty list means the document replays cleanly.
pub fn replay_verify(run: &RunReport) -> Result<Vec<String>> {
    if run.schema != SCHEMA {
        return Err(Error::MalformedReport(format!(
            "unknown schema '{}'",
            run.schema
        )));
    }
    let mut disagreements = Vec::new();
    for row in &run.reports {
        let mut audit = RowAudit {
            label: format!("n={}", row.n),
            disagreements: &mut disagreements,
        };
        let mu = match row.mu.parse::<MuCandidate>() {
            Ok(mu) => mu,
            Err(_) => {
                audit.flag(format!("mu is not a positive rational: '{}'", row.mu));
                continue;
            }
        };
        let a_n = audit.parse_int("a_n", &row.a_n);
        let b_n = audit.parse_int("b_n", &row.b_n);
        let primorial = audit.parse_int("primorial", &row.primorial);
        let (Some(a_n), Some(b_n), Some(primorial)) = (a_n, b_n, primorial) else {
            continue;
        };
        if !a_n.gcd(&b_n).is_one() {
            audit.flag("a_n/b_n is not in lowest terms");
        }
        if !(&primorial * &primorial).is_multiple_of(&b_n) {
            audit.flag("b_n does not divide the primorial squared");
        }
        let value = match Rational::new(a_n.clone(), b_n.clone()) {
            Ok(v) => Some(v),
            Err(_) => {
                audit.flag("b_n is zero");
                None
            }
        };
        let gap = audit_link1(&mut audit, &row.links.l1, &mu, &b_n);
        audit_link2(&mut audit, &row.links.l2, value.as_ref());
        let tail = audit_link3(&mut audit, &row.links.l3);
        audit_link4(&mut audit, &row.links.l4, tail.as_ref());
        audit_identity(
            &mut audit,
            &row.links.identity,
            gap.as_ref(),
            value.as_ref(),
            tail.as_ref(),
        );
        audit_theorem(&mut audit, &row.theorem, &mu, &primorial);
    }
    Ok(disagreements)
}
