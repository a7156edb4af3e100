//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator is zero")]
    ZeroDenominator,

    #[error("cannot parse '{0}' as a rational (expected 'num/den' or an integer)")]
    ParseRational(String),

    #[error("0^0 is undefined")]
    ZeroPowZero,

    #[error("division by zero")]
    DivisionByZero,

    #[error("interval endpoints out of order: lo = {lo} > hi = {hi}")]
    ReversedInterval { lo: String, hi: String },

    #[error("interval [{lo}, {hi}] must be strictly positive")]
    NonPositiveInterval { lo: String, hi: String },

    #[error("index must be at least 1")]
    IndexFromOne,

    #[error("term count must be at least 1")]
    TermsFromOne,

    #[error("target width must be positive")]
    NonPositiveWidth,

    #[error("precision target must be positive")]
    NonPositivePrecision,

    #[error("mu must be a positive rational")]
    NonPositiveMu,

    #[error("logarithm requires a strictly positive argument")]
    LogNonPositive,

    #[error("mu numerator and denominator must fit in 64 bits for exact exponentiation")]
    MuTooLarge,

    #[error("truncation index K = {k} must exceed n = {n}")]
    TruncationTooSmall { k: u64, n: u64 },

    #[error("sieve cap {cap} exceeded: needed primes up to at least {needed}")]
    SieveCapExceeded { cap: u64, needed: u64 },

    #[error("denominator of the partial product at n = {n} does not divide the primorial squared")]
    DenominatorInvariant { n: u64 },

    #[error("soundness violation: {0}")]
    SoundnessViolation(String),

    #[error("replay disagreement: {0}")]
    ReplayDisagreement(String),

    #[error("malformed report: {0}")]
    MalformedReport(String),
}

pub type Result<T> = std::result::Result<T, Error>;
