//! Three-valued outcome of a certified check.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Outcome of comparing against conservative endpoints.
///
/// `Certified` and `Falsified` are proofs (the comparison held, or its negation
/// held, against the endpoint that makes the claim hardest). `Inconclusive`
/// means the enclosure was too wide to separate the sides; tightening the
/// working parameters can upgrade it but can never flip a proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Certified,
    Falsified,
    Inconclusive,
}

impl Verdict {
    pub fn is_certified(self) -> bool {
        self == Verdict::Certified
    }

    pub fn is_falsified(self) -> bool {
        self == Verdict::Falsified
    }

    /// True when `self` is at least as decided as `earlier`: a verdict may move
    /// from `Inconclusive` to either proof under tighter parameters, but a
    /// proof must never change.
    pub fn refines(self, earlier: Verdict) -> bool {
        earlier == Verdict::Inconclusive || self == earlier
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Certified => "certified",
            Verdict::Falsified => "falsified",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "certified" => Ok(Verdict::Certified),
            "falsified" => Ok(Verdict::Falsified),
            "inconclusive" => Ok(Verdict::Inconclusive),
            other => Err(format!("unknown verdict '{other}'")),
        }
    }
}
