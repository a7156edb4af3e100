//! Exact-arithmetic certification that the next prime is bounded by a power of
//! the primorial.
//!
//! The central objects are the partial products `a_n/b_n = prod_{k<=n} (1 - 1/p_k^2)`,
//! which decrease strictly toward `6/pi^2 = 1/zeta(2)`. Given a candidate
//! irrationality exponent `mu = P/Q` for `6/pi^2`, a chain of five checks
//! certifies `p_{n+1} < (p_1 p_2 ... p_n)^{2 mu}`:
//!
//! 1. `1/b_n^mu < a_n/b_n - 6/pi^2` (the gap beats the measure bound),
//! 2. `a_n < b_n` (so the measure applies with exponent on `b_n`),
//! 3. `1 - prod_{k>n} (1 - 1/p_k^2) < sum_{k>n} 1/p_k^2` (Weierstrass),
//! 4. `sum_{k>n} 1/p_k^2 < 1/p_{n+1}` (tail comparison),
//! plus the exact product identity tying the gap to the tail product.
//!
//! Every comparison is performed on exact rationals or on rational enclosures
//! with outward-directed endpoints, so a `Certified` verdict is a proof and a
//! `Falsified` verdict is a counterexample; `Inconclusive` only ever means the
//! working precision did not separate the two sides.

pub mod chain;
pub mod error;
pub mod exponent;
pub mod interval;
pub mod natlog;
pub mod primes;
pub mod product;
pub mod rational;
pub mod report;
pub mod verdict;
pub mod zeta;

pub use error::{Error, Result};
pub use interval::RationalInterval;
pub use rational::Rational;
pub use verdict::Verdict;
