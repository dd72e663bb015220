//! Orbifold divisors `Δ = Σ (1 − 1/m_j)·Δ_j` and their pullbacks to curves.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::picard::SurfaceConfig;
use crate::positivity::{ample_rational_class, ample_sufficient, RationalClass, WeightedBoundary};
use crate::rational::{int, rat};

/// An orbifold multiplicity in `ℤ≥1 ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multiplicity {
    Finite(u32),
    Infinite,
}

impl Multiplicity {
    /// `1 − 1/m`, with `1 − 1/∞ = 1`.
    pub fn coefficient(&self) -> BigRational {
        BigRational::one() - self.reciprocal()
    }

    /// `1/m`, with `1/∞ = 0`.
    pub fn reciprocal(&self) -> BigRational {
        match self {
            Multiplicity::Finite(m) => rat(1, *m as i64),
            Multiplicity::Infinite => BigRational::zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Multiplicity::Finite(_))
    }

    /// `⌈m/t⌉` for `t ≥ 1`.
    pub fn ceil_div(&self, t: u32) -> Multiplicity {
        assert!(t > 0, "division by a zero pullback multiplicity");
        match self {
            Multiplicity::Finite(m) => Multiplicity::Finite(m.div_ceil(t)),
            Multiplicity::Infinite => Multiplicity::Infinite,
        }
    }

    /// Whether `n·t ≥ self` for a curve multiplicity `n`.
    pub fn covered_by(&self, n: Multiplicity, t: u32) -> bool {
        match (n, self) {
            (Multiplicity::Infinite, _) => true,
            (_, Multiplicity::Infinite) => false,
            (Multiplicity::Finite(n), Multiplicity::Finite(m)) => n as u64 * t as u64 >= *m as u64,
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(m) => write!(f, "{m}"),
            Multiplicity::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(m) => s.serialize_u32(*m),
            Multiplicity::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(0) => Err(de::Error::custom("multiplicities are at least 1")),
            Raw::Num(m) => Ok(Multiplicity::Finite(m)),
            Raw::Str(s) if s == "inf" || s == "∞" => Ok(Multiplicity::Infinite),
            Raw::Str(s) => Err(de::Error::custom(format!(
                "multiplicity must be a positive integer or \"inf\", got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbifoldError {
    #[error("multiplicity of component {0} must be at least 1")]
    ZeroMultiplicity(usize),
    #[error("profile point `{0}` has a zero pullback multiplicity")]
    ZeroPullback(String),
    #[error("the base divisor is not certified ample: {0}")]
    BaseNotAmple(String),
    #[error("twist parameter must be nonnegative")]
    NegativeAlpha,
    #[error("no threshold below {0}")]
    NoThreshold(u64),
}

/// Components with multiplicity `> 1`; multiplicity 1 carries coefficient 0
/// and is dropped.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OrbifoldDivisor {
    components: BTreeMap<usize, Multiplicity>,
}

impl OrbifoldDivisor {
    pub fn new(entries: impl IntoIterator<Item = (usize, Multiplicity)>) -> Result<Self, OrbifoldError> {
        let mut components = BTreeMap::new();
        for (j, m) in entries {
            match m {
                Multiplicity::Finite(0) => return Err(OrbifoldError::ZeroMultiplicity(j)),
                Multiplicity::Finite(1) => {}
                m => {
                    components.insert(j, m);
                }
            }
        }
        Ok(OrbifoldDivisor { components })
    }

    /// Multiplicity per component index, in order.
    pub fn from_list(m: &[Multiplicity]) -> Result<Self, OrbifoldError> {
        Self::new(m.iter().copied().enumerate())
    }

    pub fn multiplicity(&self, j: usize) -> Multiplicity {
        self.components.get(&j).copied().unwrap_or(Multiplicity::Finite(1))
    }

    pub fn coefficient(&self, j: usize) -> BigRational {
        self.multiplicity(j).coefficient()
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, Multiplicity)> + '_ {
        self.components.iter().map(|(&j, &m)| (j, m))
    }

    pub fn in_support(&self, j: usize) -> bool {
        self.components.contains_key(&j)
    }
}

/// A point `P_i` of the source curve over the boundary, with `t_{i,j}` the
/// multiplicity of `ψ*Δ_j` at `P_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub id: String,
    pub t: BTreeMap<usize, u32>,
}

impl ProfilePoint {
    /// `t_i = Σ_j t_{i,j}`.
    pub fn total(&self) -> u32 {
        self.t.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PullbackProfile {
    pub points: Vec<ProfilePoint>,
}

impl PullbackProfile {
    pub fn new(points: Vec<ProfilePoint>) -> Result<Self, OrbifoldError> {
        for p in &points {
            if p.t.values().any(|&t| t == 0) {
                return Err(OrbifoldError::ZeroPullback(p.id.clone()));
            }
        }
        Ok(PullbackProfile { points })
    }

    /// `deg ψ*Δ_j = Σ_i t_{i,j}`.
    pub fn pullback_degree(&self, j: usize) -> u64 {
        self.points
            .iter()
            .map(|p| p.t.get(&j).copied().unwrap_or(0) as u64)
            .sum()
    }

    /// `t_i`: multiplicity of `ψ*(supp Δ)` at the point.
    fn support_total(p: &ProfilePoint, delta: &OrbifoldDivisor) -> u32 {
        p.t.iter().filter(|(j, _)| delta.in_support(**j)).map(|(_, t)| t).sum()
    }

    /// Points meeting the support of `Δ`, i.e. with nonempty `φ(i)`.
    fn boundary_points<'a>(&'a self, delta: &'a OrbifoldDivisor) -> impl Iterator<Item = &'a ProfilePoint> {
        self.points
            .iter()
            .filter(move |p| p.t.keys().any(|&j| delta.in_support(j)))
    }
}

/// `m̃_i = sup_{j ∈ φ(i)} ⌈m_j / t_i⌉` for every point meeting `supp Δ`.
pub fn induced_multiplicities(profile: &PullbackProfile, delta: &OrbifoldDivisor) -> Vec<(String, Multiplicity)> {
    profile
        .boundary_points(delta)
        .map(|p| {
            let t = PullbackProfile::support_total(p, delta);
            let m = p
                .t
                .keys()
                .filter(|&&j| delta.in_support(j))
                .map(|&j| delta.multiplicity(j).ceil_div(t))
                .max()
                .expect("point meets the support");
            (p.id.clone(), m)
        })
        .collect()
}

/// Whether the curve multiplicities `n` (one per point meeting `supp Δ`, in
/// profile order) make `ψ` an orbifold morphism: `n_i·t_i ≥ m_j` for every
/// component `j` through `ψ(P_i)`.
pub fn is_orbifold_morphism(profile: &PullbackProfile, delta: &OrbifoldDivisor, n: &[Multiplicity]) -> bool {
    let points: Vec<_> = profile.boundary_points(delta).collect();
    assert_eq!(points.len(), n.len(), "one curve multiplicity per boundary point");
    points.iter().zip(n).all(|(p, &ni)| {
        let t = PullbackProfile::support_total(p, delta);
        p.t.keys()
            .filter(|&&j| delta.in_support(j))
            .all(|&j| delta.multiplicity(j).covered_by(ni, t))
    })
}

/// `deg Δ_C = Σ_i (1 − 1/m̃_i)`.
pub fn curve_orbifold_degree(profile: &PullbackProfile, delta: &OrbifoldDivisor) -> BigRational {
    induced_multiplicities(profile, delta)
        .iter()
        .fold(BigRational::zero(), |acc, (_, m)| acc + m.coefficient())
}

/// Both sides of `N^{[1]} ≤ Σ_i (1 − 1/m̃_i) + Σ_j deg(ψ*Δ_j)/m_j`.
pub fn orbifold_bound_chain(profile: &PullbackProfile, delta: &OrbifoldDivisor) -> (BigRational, BigRational) {
    let lhs = int(profile.boundary_points(delta).count() as i64);
    let rhs = delta.support().fold(curve_orbifold_degree(profile, delta), |acc, (j, m)| {
        acc + int(profile.pullback_degree(j) as i64) * m.reciprocal()
    });
    assert!(lhs <= rhs, "orbifold counting bound violated");
    (lhs, rhs)
}

/// Whether `L − Σ_{j∈J} s·D̃_j` passes the ampleness checks for every subset
/// `J` of the finite-multiplicity support of `Δ`.
fn twisted_box_ample(
    cfg: &SurfaceConfig,
    wb: &WeightedBoundary,
    twisted: &[usize],
    s: &BigRational,
) -> bool {
    (0u64..1 << twisted.len()).all(|mask| {
        let mut w = wb.weights().to_vec();
        for (bit, &j) in twisted.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                w[j] -= s;
            }
        }
        ample_rational_class(cfg, &RationalClass::weighted(cfg, &w)).is_certified()
    })
}

/// Least `m ≥ 1` such that `L − Σ_j (α/m_j)·D̃_j` passes the ampleness
/// checks whenever every finite `m_j` in `supp Δ` satisfies `m_j ≥ m`.
///
/// The certified classes form a convex set containing `L`, so checking the
/// corners of the box `0 ≤ s_j ≤ α/m` suffices, and the predicate is
/// monotone in `m`.
pub fn ample_twist_threshold(
    cfg: &SurfaceConfig,
    wb: &WeightedBoundary,
    alpha: &BigRational,
    delta: &OrbifoldDivisor,
) -> Result<u64, OrbifoldError> {
    if alpha.is_negative() {
        return Err(OrbifoldError::NegativeAlpha);
    }
    let base = ample_sufficient(cfg, wb);
    if !base.is_certified() {
        return Err(OrbifoldError::BaseNotAmple(base.to_string()));
    }
    let twisted: Vec<usize> = delta
        .support()
        .filter(|(_, m)| m.is_finite())
        .map(|(j, _)| j)
        .collect();
    if alpha.is_zero() || twisted.is_empty() {
        return Ok(1);
    }
    let passes = |m: u64| twisted_box_ample(cfg, wb, &twisted, &(alpha / int(m as i64)));
    const CAP: u64 = 1 << 40;
    let mut hi = 1u64;
    while !passes(hi) {
        if hi >= CAP {
            return Err(OrbifoldError::NoThreshold(CAP));
        }
        hi *= 2;
    }
    let mut lo = hi / 2; // fails, or 0 when hi = 1
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if passes(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Linear-scan twin of [`ample_twist_threshold`], for cross-checking.
pub fn ample_twist_threshold_scan(
    cfg: &SurfaceConfig,
    wb: &WeightedBoundary,
    alpha: &BigRational,
    delta: &OrbifoldDivisor,
    limit: u64,
) -> Option<u64> {
    let twisted: Vec<usize> = delta
        .support()
        .filter(|(_, m)| m.is_finite())
        .map(|(j, _)| j)
        .collect();
    (1..=limit).find(|&m| twisted_box_ample(cfg, wb, &twisted, &(alpha / int(m as i64))))
}
