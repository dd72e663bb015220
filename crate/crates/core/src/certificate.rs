//! The certificate document: a versioned JSON audit record.
//!
//! Every number is rendered as an exact string (`"n"`, `"n/d"` or
//! `"a + b*sqrt(d)"`) together with an exactness tag, so certificates
//! round-trip byte for byte.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::orbifold::Multiplicity;
use crate::picard::{BlownPoint, Component};
use crate::quad::QuadExt;
use crate::rational::fmt_rational;

pub const FORMAT: &str = "orbicert-certificate";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    ExactRational,
    ExactQuadratic,
    LowerBound,
    UpperBound,
    Empirical,
}

/// A number with its exactness tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tagged {
    pub value: String,
    pub exactness: Exactness,
}

impl Tagged {
    pub fn rational(r: &BigRational) -> Self {
        Tagged {
            value: fmt_rational(r),
            exactness: Exactness::ExactRational,
        }
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Tagged {
            value: n.into().to_string(),
            exactness: Exactness::ExactRational,
        }
    }

    pub fn quad(q: &QuadExt) -> Self {
        Tagged {
            value: q.to_string(),
            exactness: if q.is_rational() {
                Exactness::ExactRational
            } else {
                Exactness::ExactQuadratic
            },
        }
    }

    pub fn lower(value: impl fmt::Display) -> Self {
        Tagged {
            value: value.to_string(),
            exactness: Exactness::LowerBound,
        }
    }

    pub fn upper(value: impl fmt::Display) -> Self {
        Tagged {
            value: value.to_string(),
            exactness: Exactness::UpperBound,
        }
    }

    pub fn lower_rational(r: &BigRational) -> Self {
        Self::lower(fmt_rational(r))
    }

    pub fn upper_rational(r: &BigRational) -> Self {
        Self::upper(fmt_rational(r))
    }

    pub fn empirical(value: impl fmt::Display) -> Self {
        Tagged {
            value: value.to_string(),
            exactness: Exactness::Empirical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// At least two boundary components.
    ComponentCount,
    /// No three boundary components pass through one point.
    NoThreeMeet,
    /// Weights are positive integers.
    Weights,
    /// `D_p` passes the sufficient ampleness checks.
    Ampleness,
    /// `2·D_p²·ξ_i > (D_p·D_i)·ξ_i² + 3·D_p²·p_i` for every component.
    CzInequality,
    /// The finite-level constant chain exists below the search cap.
    Constants,
    /// Every finite multiplicity reaches the certified threshold.
    MultiplicityThreshold,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    NotEvaluated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisRecord {
    pub name: Hypothesis,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub name: Option<String>,
    pub components: Vec<Component>,
    pub points: Vec<BlownPoint>,
    pub concurrent: Vec<Vec<usize>>,
    pub padded: bool,
    pub allow_single_component: bool,
    pub weights: Vec<Tagged>,
    pub multiplicities: Option<Vec<Multiplicity>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionTable {
    /// `D_p` rendered as `hH - e1E[Q1] - ...`, present for integer weights.
    pub d_p: Option<String>,
    /// Gram matrix of the strict transforms.
    pub gram: Vec<Vec<Tagged>>,
    pub d_p_squared: Tagged,
    pub d_p_dot_components: Vec<Tagged>,
    pub canonical_squared: Tagged,
    pub canonical_dot_d_p: Option<Tagged>,
    pub canonical_dot_components: Vec<Tagged>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmplenessRecord {
    pub verdict: String,
    pub bezout_residue: Tagged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub index: usize,
    pub weight: Tagged,
    pub xi: Tagged,
    /// `2·D_p²·ξ − (D_p·D_i)·ξ² − 3·D_p²·p_i`.
    pub cz_margin: Tagged,
    pub cz_inequality_holds: bool,
    /// Closed-form lower bound for `β(D_p, D_i)`.
    pub beta: Tagged,
    pub beta_exceeds_p: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonRecord {
    /// `min_i (β_i − p_i)/p_i`.
    pub value: Tagged,
    pub rational_lower_bound: Tagged,
    pub argmin: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbifoldSection {
    pub multiplicities: Vec<Multiplicity>,
    /// `−3 + Σ (1 − 1/m_i)·d_i`.
    pub canonical_degree: Tagged,
    pub canonical_big: bool,
    pub twist_alpha: Tagged,
    pub twist_threshold: Option<Tagged>,
    pub constants_threshold: Option<Tagged>,
    pub required_multiplicity: Option<Tagged>,
    pub multiplicities_sufficient: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantsSection {
    pub eps_target: Tagged,
    /// The ε used in the `(N, b)` inequality and in `C`.
    pub rv_epsilon: Tagged,
    pub n: Tagged,
    pub b: Tagged,
    pub m: Tagged,
    pub sum_h0_lower: Vec<Tagged>,
    /// `(1 + 2/b)·β_i·N·M / Σ_m h⁰(...)` per component.
    pub feasibility_lhs: Vec<Tagged>,
    pub c: Tagged,
    pub q: Tagged,
    pub q_exact: Tagged,
    pub truncation_level: Tagged,
    pub min_beta: Tagged,
    pub sum_beta_upper: Tagged,
    pub m0: Tagged,
    /// Leading part `M(M−1)/2` of the Wronskian constant.
    pub wronskian_leading: Tagged,
    pub additive_constant: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub status: Status,
    pub first_failure: Option<Hypothesis>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub format: String,
    pub version: u32,
    pub config: ConfigEcho,
    pub intersections: Option<IntersectionTable>,
    pub ampleness: Option<AmplenessRecord>,
    pub hypotheses: Vec<HypothesisRecord>,
    pub components: Vec<ComponentRecord>,
    pub epsilon: Option<EpsilonRecord>,
    pub orbifold: Option<OrbifoldSection>,
    pub constants: Option<ConstantsSection>,
    pub outcome: Outcome,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn hypothesis(&self, h: Hypothesis) -> Option<&HypothesisRecord> {
        self.hypotheses.iter().find(|r| r.name == h)
    }
}
