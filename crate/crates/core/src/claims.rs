//! Axiom identifiers and the declared-claim vocabulary attached to each family.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomId {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
    A12,
    A13,
    A4s,
    A6s,
}

impl AxiomId {
    pub const ALL: [AxiomId; 15] = [
        AxiomId::A1,
        AxiomId::A2,
        AxiomId::A3,
        AxiomId::A4,
        AxiomId::A5,
        AxiomId::A6,
        AxiomId::A7,
        AxiomId::A8,
        AxiomId::A9,
        AxiomId::A10,
        AxiomId::A11,
        AxiomId::A12,
        AxiomId::A13,
        AxiomId::A4s,
        AxiomId::A6s,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::A1 => "A1",
            AxiomId::A2 => "A2",
            AxiomId::A3 => "A3",
            AxiomId::A4 => "A4",
            AxiomId::A5 => "A5",
            AxiomId::A6 => "A6",
            AxiomId::A7 => "A7",
            AxiomId::A8 => "A8",
            AxiomId::A9 => "A9",
            AxiomId::A10 => "A10",
            AxiomId::A11 => "A11",
            AxiomId::A12 => "A12",
            AxiomId::A13 => "A13",
            AxiomId::A4s => "A4s",
            AxiomId::A6s => "A6s",
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomId {
    type Err = Error;
    fn from_str(s: &str) -> Result<AxiomId, Error> {
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown axiom '{s}'")))
    }
}

impl Serialize for AxiomId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for AxiomId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Hypotheses that claims depend on. Evaluated against the family parameters and cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cond {
    /// `Λ ⊆ K*`
    MultipliersInPolar,
    PhiConvex,
    PhiAndXiConvex,
    /// `φ′(0) ≠ 0`
    PhiSlopeAtZeroNonzero,
    /// `φ′(b) ≠ 0`
    PhiSlopeAtBNonzero,
    /// `φ(t)/t → 0` as `t → −∞` (or `ψ`)
    SublinearAtMinusInfinity,
    /// `ξ(t)/t → +∞` and `φ` (or `ψ`) bounded below
    XiSuperlinearAndBoundedBelow,
    /// `φ` (or `ψ`) bounded below, or the constraint image meets `K` in a bounded set
    BoundedBelowOrBoundedImage,
    /// more than one scalar inequality (or a matrix block of order above one)
    MoreThanOneConstraint,
    /// `ε₀ < +∞`
    FiniteDomainBound,
    PsiOperatorMonotone,
    PsiAndXiOperatorMonotone,
    /// `φ` (or `ψ`) strictly convex and `ξ` strictly convex on `ℝ₊`
    StrictConvexity,
    Not(Box<Cond>),
    Any(Vec<Cond>),
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::MultipliersInPolar => write!(f, "Λ ⊆ K*"),
            Cond::PhiConvex => write!(f, "φ convex"),
            Cond::PhiAndXiConvex => write!(f, "φ and ξ convex"),
            Cond::PhiSlopeAtZeroNonzero => write!(f, "φ′(0) ≠ 0"),
            Cond::PhiSlopeAtBNonzero => write!(f, "φ′(b) ≠ 0"),
            Cond::SublinearAtMinusInfinity => write!(f, "φ(t)/t → 0 as t → −∞"),
            Cond::XiSuperlinearAndBoundedBelow => write!(f, "ξ(t)/t → +∞ and φ bounded below"),
            Cond::BoundedBelowOrBoundedImage => write!(f, "φ bounded below or bounded image"),
            Cond::MoreThanOneConstraint => write!(f, "l > 1"),
            Cond::FiniteDomainBound => write!(f, "ε₀ < +∞"),
            Cond::PsiOperatorMonotone => write!(f, "Ψ operator monotone"),
            Cond::PsiAndXiOperatorMonotone => write!(f, "Ψ and Ξ operator monotone"),
            Cond::StrictConvexity => write!(f, "φ strictly convex, ξ strictly convex on ℝ₊"),
            Cond::Not(c) => write!(f, "not ({c})"),
            Cond::Any(cs) => {
                let parts: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                write!(f, "{}", parts.join(" or "))
            }
        }
    }
}

/// A declared claim about one axiom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    Holds,
    Fails,
    /// Holds when the condition holds; nothing is stated otherwise.
    HoldsIf(Cond),
    /// Holds exactly when the condition holds.
    HoldsIff(Cond),
    /// Fails when the condition holds; nothing is stated otherwise.
    FailsIf(Cond),
    /// The condition is necessary; when it holds the inner claim applies.
    Requires(Cond, Box<Claim>),
    Unstated,
}

impl Claim {
    pub fn requires(c: Cond, inner: Claim) -> Claim {
        Claim::Requires(c, Box::new(inner))
    }

    /// Resolves the claim given an oracle for conditions.
    pub fn resolve(&self, eval: &dyn Fn(&Cond) -> bool) -> Expectation {
        match self {
            Claim::Holds => Expectation::Holds,
            Claim::Fails => Expectation::Fails,
            Claim::HoldsIf(c) => {
                if eval(c) {
                    Expectation::Holds
                } else {
                    Expectation::Unstated
                }
            }
            Claim::HoldsIff(c) => {
                if eval(c) {
                    Expectation::Holds
                } else {
                    Expectation::Fails
                }
            }
            Claim::FailsIf(c) => {
                if eval(c) {
                    Expectation::Fails
                } else {
                    Expectation::Unstated
                }
            }
            Claim::Requires(c, inner) => {
                if eval(c) {
                    inner.resolve(eval)
                } else {
                    Expectation::Fails
                }
            }
            Claim::Unstated => Expectation::Unstated,
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::Holds => write!(f, "holds"),
            Claim::Fails => write!(f, "fails"),
            Claim::HoldsIf(c) => write!(f, "holds if {c}"),
            Claim::HoldsIff(c) => write!(f, "holds iff {c}"),
            Claim::FailsIf(c) => write!(f, "fails if {c}"),
            Claim::Requires(c, inner) => write!(f, "requires {c}; then {inner}"),
            Claim::Unstated => write!(f, "unstated"),
        }
    }
}

/// What a resolved claim predicts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Holds,
    Fails,
    Unstated,
}
