//! Sufficient criteria for ampleness of boundary divisors and bigness of
//! orbifold canonical classes.
//!
//! A class `L = h·H − Σ e_Q·E_Q` is certified ample when
//!
//! 1. `L² > 0`,
//! 2. `L·E_Q = e_Q > 0` for every exceptional curve,
//! 3. `L·D̃_i > 0` for every boundary component, and
//! 4. the Bezout residue `h − Σ_i top_{d_i}{e_Q : Q on D_i}` is positive.
//!
//! For an irreducible curve `C = cH − Σ μ_Q E_Q` that is neither exceptional
//! nor a boundary component, Bezout gives `Σ_{Q on D_i} μ_Q ≤ c·d_i` and
//! `μ_Q ≤ c`, so `L·C ≥ c·residue`. Nakai–Moishezon then applies. The test is
//! sufficient only; failures are reported as inconclusive.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orbifold::Multiplicity;
use crate::picard::{ComponentRole, DivisorClass, PointId, SurfaceConfig};
use crate::rational::{fmt_rational, from_big, int};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum AmpleCheck {
    SelfIntersection,
    Exceptional { point: PointId },
    Component { index: usize },
    BezoutResidue,
}

impl fmt::Display for AmpleCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmpleCheck::SelfIntersection => f.write_str("L² > 0"),
            AmpleCheck::Exceptional { point } => write!(f, "L·E[{point}] > 0"),
            AmpleCheck::Component { index } => write!(f, "L·D{index} > 0"),
            AmpleCheck::BezoutResidue => f.write_str("Bezout residue > 0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AmpleVerdict {
    Certified,
    /// The first check that failed, with the offending value.
    Inconclusive { check: AmpleCheck, value: BigRational },
}

impl AmpleVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, AmpleVerdict::Certified)
    }
}

impl fmt::Display for AmpleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmpleVerdict::Certified => f.write_str("certified ample"),
            AmpleVerdict::Inconclusive { check, value } => {
                write!(f, "inconclusive: {check} fails with value {}", fmt_rational(value))
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("expected {expected} weights, got {got}")]
    Length { expected: usize, got: usize },
    #[error("weight {index} is negative")]
    Negative { index: usize },
}

/// Nonnegative weights `p_i`, one per boundary component, defining
/// `D_p = Σ p_i·D̃_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedBoundary {
    weights: Vec<BigRational>,
}

impl WeightedBoundary {
    pub fn new(cfg: &SurfaceConfig, weights: Vec<BigRational>) -> Result<Self, WeightError> {
        if weights.len() != cfg.component_count() {
            return Err(WeightError::Length {
                expected: cfg.component_count(),
                got: weights.len(),
            });
        }
        if let Some(index) = weights.iter().position(|w| w.is_negative()) {
            return Err(WeightError::Negative { index });
        }
        Ok(WeightedBoundary { weights })
    }

    pub fn from_integers(cfg: &SurfaceConfig, weights: &[i64]) -> Result<Self, WeightError> {
        Self::new(cfg, weights.iter().map(|&w| int(w)).collect())
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.weights.iter().all(|w| w.is_integer())
    }

    pub fn all_positive(&self) -> bool {
        self.weights.iter().all(|w| w.is_positive())
    }

    /// Integer weights, if every weight is integral and fits an `i64`.
    pub fn integer_weights(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.weights
            .iter()
            .map(|w| w.is_integer().then(|| w.to_integer().to_i64()).flatten())
            .collect()
    }

    /// `D_p` as an integral class, when the weights are integers.
    pub fn class(&self, cfg: &SurfaceConfig) -> Option<DivisorClass> {
        let w = self.integer_weights()?;
        Some(crate::picard::weighted_sum(&cfg.strict_transforms(), &w))
    }
}

/// A rational class `h·H − Σ e_Q·E_Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalClass {
    pub h: BigRational,
    pub e: BTreeMap<PointId, BigRational>,
}

impl RationalClass {
    pub fn from_class(d: &DivisorClass) -> Self {
        RationalClass {
            h: int(d.h_coeff()),
            e: d
                .e_coeffs()
                .iter()
                .map(|(q, &v)| (q.clone(), int(v)))
                .collect(),
        }
    }

    /// `Σ w_i·D̃_i`.
    pub fn weighted(cfg: &SurfaceConfig, weights: &[BigRational]) -> Self {
        let mut h = BigRational::zero();
        let mut e = BTreeMap::new();
        for (i, w) in weights.iter().enumerate() {
            h += w * int(cfg.degree(i));
            for p in cfg.points_on(i) {
                *e.entry(p.id.clone()).or_insert_with(BigRational::zero) += w;
            }
        }
        RationalClass { h, e }
    }

    pub fn e_coeff(&self, q: &PointId) -> BigRational {
        self.e.get(q).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn self_intersection(&self) -> BigRational {
        self.e
            .values()
            .fold(&self.h * &self.h, |acc, v| acc - v * v)
    }

    /// Intersection with the strict transform of component `i`.
    pub fn dot_component(&self, cfg: &SurfaceConfig, i: usize) -> BigRational {
        cfg.points_on(i)
            .fold(&self.h * int(cfg.degree(i)), |acc, p| acc - self.e_coeff(&p.id))
    }

    /// `h − Σ_i (sum of the d_i largest positive e_Q on D_i)`.
    pub fn bezout_residue(&self, cfg: &SurfaceConfig) -> BigRational {
        let mut residue = self.h.clone();
        for i in 0..cfg.component_count() {
            let mut es: Vec<BigRational> = cfg
                .points_on(i)
                .map(|p| self.e_coeff(&p.id))
                .filter(|v| v.is_positive())
                .collect();
            es.sort_by(|a, b| b.cmp(a));
            for v in es.into_iter().take(cfg.degree(i) as usize) {
                residue -= v;
            }
        }
        residue
    }
}

/// Runs the four checks on an arbitrary rational class.
pub fn ample_rational_class(cfg: &SurfaceConfig, l: &RationalClass) -> AmpleVerdict {
    let fail = |check, value| AmpleVerdict::Inconclusive { check, value };
    let sq = l.self_intersection();
    if !sq.is_positive() {
        return fail(AmpleCheck::SelfIntersection, sq);
    }
    for p in cfg.points() {
        let v = l.e_coeff(&p.id);
        if !v.is_positive() {
            return fail(AmpleCheck::Exceptional { point: p.id.clone() }, v);
        }
    }
    for i in 0..cfg.component_count() {
        let v = l.dot_component(cfg, i);
        if !v.is_positive() {
            return fail(AmpleCheck::Component { index: i }, v);
        }
    }
    let r = l.bezout_residue(cfg);
    if !r.is_positive() {
        return fail(AmpleCheck::BezoutResidue, r);
    }
    AmpleVerdict::Certified
}

pub fn ample_class(cfg: &SurfaceConfig, d: &DivisorClass) -> AmpleVerdict {
    ample_rational_class(cfg, &RationalClass::from_class(d))
}

/// Sufficient ampleness test for `D_p`.
pub fn ample_sufficient(cfg: &SurfaceConfig, wb: &WeightedBoundary) -> AmpleVerdict {
    ample_rational_class(cfg, &RationalClass::weighted(cfg, wb.weights()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BigVerdict {
    /// Positive plane degree of `K + Δ`.
    Certified { degree: BigRational },
    NotCertified { degree: BigRational },
}

impl BigVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, BigVerdict::Certified { .. })
    }

    pub fn degree(&self) -> &BigRational {
        match self {
            BigVerdict::Certified { degree } | BigVerdict::NotCertified { degree } => degree,
        }
    }
}

/// Plane degree `−3 + Σ (1 − 1/m_i)·d_i` of the orbifold canonical class.
/// A positive degree makes `K + Δ` big on the plane, and pulling back to the
/// blow-up only adds effective exceptional divisors.
pub fn orbifold_canonical_big(cfg: &SurfaceConfig, m: &[Multiplicity]) -> BigVerdict {
    let degree = m
        .iter()
        .enumerate()
        .fold(int(-3), |acc, (i, mi)| acc + mi.coefficient() * int(cfg.degree(i)));
    if degree.is_positive() {
        BigVerdict::Certified { degree }
    } else {
        BigVerdict::NotCertified { degree }
    }
}

/// Plane degree of the part of the boundary that carries no blown-up point,
/// weighted by `w`. Equals the Bezout residue of `D_p` for nonnegative weights.
pub fn unpaired_degree(cfg: &SurfaceConfig, w: &[BigRational]) -> BigRational {
    cfg.components()
        .iter()
        .zip(w)
        .filter(|(c, _)| c.role != ComponentRole::Paired)
        .fold(BigRational::zero(), |acc, (c, wi)| acc + wi * from_big(BigInt::from(c.degree)))
}
