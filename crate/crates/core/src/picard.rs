//! Intersection theory on blow-ups of the projective plane at finitely
//! many distinct points.
//!
//! A divisor class is stored as `h·H − Σ e[Q]·E_Q`, where `H` is the pullback
//! of a line and `E_Q` the exceptional curve over the blown-up point `Q`. The
//! lattice form is `H² = 1`, `E_Q² = −1`, `H·E_Q = 0`, `E_Q·E_R = 0`.
//!
//! Only incidences matter: a blown-up point is an opaque token together with
//! the boundary component it lies on.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("component {index}: {reason}")]
    Component { index: usize, reason: String },
    #[error("point `{id}`: {reason}")]
    Point { id: String, reason: String },
    #[error("concurrency set {index}: {reason}")]
    Concurrency { index: usize, reason: String },
    #[error("class refers to point `{0}` which is not blown up in this configuration")]
    ForeignPoint(String),
    #[error("component index {0} out of range")]
    NoSuchComponent(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub String);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PointId {
    fn from(s: &str) -> Self {
        PointId(s.to_string())
    }
}

/// An integral class `h·H − Σ e[Q]·E_Q`. Zero coefficients are never stored,
/// so derived equality is equality of classes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct DivisorClass {
    h: i64,
    e: BTreeMap<PointId, i64>,
}

impl DivisorClass {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Pullback of a plane curve of degree `degree`.
    pub fn hyperplane(degree: i64) -> Self {
        DivisorClass {
            h: degree,
            e: BTreeMap::new(),
        }
    }

    /// The exceptional curve `E_Q`.
    pub fn exceptional(q: &PointId) -> Self {
        let mut e = BTreeMap::new();
        e.insert(q.clone(), -1);
        DivisorClass { h: 0, e }
    }

    pub fn new(h: i64, e: impl IntoIterator<Item = (PointId, i64)>) -> Self {
        let mut class = DivisorClass {
            h,
            e: BTreeMap::new(),
        };
        for (q, c) in e {
            *class.e.entry(q).or_insert(0) += c;
        }
        class.normalize();
        class
    }

    fn normalize(&mut self) {
        self.e.retain(|_, c| *c != 0);
    }

    pub fn h_coeff(&self) -> i64 {
        self.h
    }

    /// Multiplicity `e[Q]` in `h·H − Σ e[Q]·E_Q` (zero if absent).
    pub fn e_coeff(&self, q: &PointId) -> i64 {
        self.e.get(q).copied().unwrap_or(0)
    }

    pub fn e_coeffs(&self) -> &BTreeMap<PointId, i64> {
        &self.e
    }

    pub fn is_zero(&self) -> bool {
        self.h == 0 && self.e.is_empty()
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        let mut out = self.clone();
        out.h += other.h;
        for (q, c) in &other.e {
            *out.e.entry(q.clone()).or_insert(0) += c;
        }
        out.normalize();
        out
    }

    pub fn sub(&self, other: &DivisorClass) -> DivisorClass {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> DivisorClass {
        let mut out = DivisorClass {
            h: self.h * k,
            e: self.e.iter().map(|(q, c)| (q.clone(), c * k)).collect(),
        };
        out.normalize();
        out
    }

    /// The lattice pairing, without checking which configuration the
    /// points belong to. See [`SurfaceConfig::intersect`] for the checked
    /// version.
    pub fn dot(&self, other: &DivisorClass) -> i64 {
        let (small, large) = if self.e.len() <= other.e.len() {
            (self, other)
        } else {
            (other, self)
        };
        let exc: i64 = small
            .e
            .iter()
            .map(|(q, c)| c * large.e_coeff(q))
            .sum();
        self.h * other.h - exc
    }

    pub fn self_intersection(&self) -> i64 {
        self.dot(self)
    }

    fn points(&self) -> impl Iterator<Item = &PointId> {
        self.e.keys()
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}H", self.h)?;
        for (q, c) in &self.e {
            if *c >= 0 {
                write!(f, " - {}E[{}]", c, q)?;
            } else {
                write!(f, " + {}E[{}]", -c, q)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentRole {
    /// A curve `D_i` blown up at its intersection with a pairing curve `B_i`
    /// (padded to `d_i²` points).
    Paired,
    /// A curve of the boundary that carries no blown-up point.
    Unpaired,
    /// The distinguished line `H`, never blown up.
    Hyperplane,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub degree: u32,
    pub role: ComponentRole,
    /// Degree of the pairing curve `B_i`; defaults to `degree`.
    pub pairing_degree: Option<u32>,
}

impl Component {
    pub fn paired(degree: u32) -> Self {
        Component {
            degree,
            role: ComponentRole::Paired,
            pairing_degree: None,
        }
    }

    pub fn unpaired(degree: u32) -> Self {
        Component {
            degree,
            role: ComponentRole::Unpaired,
            pairing_degree: None,
        }
    }

    pub fn hyperplane() -> Self {
        Component {
            degree: 1,
            role: ComponentRole::Hyperplane,
            pairing_degree: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlownPoint {
    pub id: PointId,
    /// The unique boundary component through the point.
    pub component: usize,
    /// Generated to reach `d_i²` points on the component.
    pub padding: bool,
}

/// A blow-up of the plane described by its boundary components and the
/// incidences of the blown-up points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceConfig {
    components: Vec<Component>,
    points: Vec<BlownPoint>,
    point_index: BTreeMap<PointId, usize>,
    concurrent: Vec<BTreeSet<usize>>,
    padded: bool,
}

impl SurfaceConfig {
    /// Builds a configuration. Paired components without explicit points get
    /// `d_i·b_i` intersection points with their pairing curve; every paired
    /// component is then padded with smooth points up to `d_i²`.
    ///
    /// `concurrent` lists sets of components that pass through a common
    /// point of the plane (used for the "no three meet" hypothesis).
    pub fn new(
        components: Vec<Component>,
        explicit_points: Vec<(PointId, usize)>,
        concurrent: Vec<Vec<usize>>,
    ) -> Result<Self, ConfigError> {
        for (index, c) in components.iter().enumerate() {
            if c.degree == 0 {
                return Err(ConfigError::Component {
                    index,
                    reason: "degree must be positive".into(),
                });
            }
            match c.role {
                ComponentRole::Hyperplane if c.degree != 1 => {
                    return Err(ConfigError::Component {
                        index,
                        reason: "the hyperplane component has degree 1".into(),
                    })
                }
                ComponentRole::Paired => {
                    let b = c.pairing_degree.unwrap_or(c.degree);
                    if b == 0 || b > c.degree {
                        return Err(ConfigError::Component {
                            index,
                            reason: format!(
                                "pairing degree {} must lie in 1..={}",
                                b, c.degree
                            ),
                        });
                    }
                }
                _ if c.pairing_degree.is_some() => {
                    return Err(ConfigError::Component {
                        index,
                        reason: "only paired components take a pairing degree".into(),
                    })
                }
                _ => {}
            }
        }

        let mut points = Vec::new();
        let mut point_index = BTreeMap::new();
        let mut per_component = vec![0usize; components.len()];
        for (id, component) in explicit_points {
            let Some(c) = components.get(component) else {
                return Err(ConfigError::Point {
                    id: id.0,
                    reason: format!("component index {} out of range", component),
                });
            };
            if c.role != ComponentRole::Paired {
                return Err(ConfigError::Point {
                    id: id.0,
                    reason: format!("component {} is not paired; only paired curves are blown up", component),
                });
            }
            if point_index.contains_key(&id) {
                return Err(ConfigError::Point {
                    id: id.0,
                    reason: "duplicate point identifier (a point lies on at most one component)".into(),
                });
            }
            per_component[component] += 1;
            point_index.insert(id.clone(), points.len());
            points.push(BlownPoint {
                id,
                component,
                padding: false,
            });
        }

        let mut padded = false;
        for (index, c) in components.iter().enumerate() {
            if c.role != ComponentRole::Paired {
                continue;
            }
            let d = c.degree as usize;
            let target = d * d;
            if per_component[index] > target {
                return Err(ConfigError::Component {
                    index,
                    reason: format!(
                        "{} blown-up points exceed d² = {}",
                        per_component[index], target
                    ),
                });
            }
            let mut push = |id: String, padding: bool, points: &mut Vec<BlownPoint>| {
                let id = PointId(id);
                point_index.insert(id.clone(), points.len());
                points.push(BlownPoint {
                    id,
                    component: index,
                    padding,
                });
            };
            if per_component[index] == 0 {
                let b = c.pairing_degree.unwrap_or(c.degree) as usize;
                for k in 0..d * b {
                    push(format!("D{}xB{}.{}", index, index, k), false, &mut points);
                }
                per_component[index] = d * b;
            }
            for k in per_component[index]..target {
                padded = true;
                push(format!("D{}.pad{}", index, k), true, &mut points);
            }
        }

        let mut concurrency = Vec::new();
        for (index, set) in concurrent.into_iter().enumerate() {
            let set: BTreeSet<usize> = set.into_iter().collect();
            if set.len() < 2 {
                return Err(ConfigError::Concurrency {
                    index,
                    reason: "needs at least two components".into(),
                });
            }
            if let Some(bad) = set.iter().find(|&&i| i >= components.len()) {
                return Err(ConfigError::Concurrency {
                    index,
                    reason: format!("component index {} out of range", bad),
                });
            }
            concurrency.push(set);
        }

        Ok(SurfaceConfig {
            components,
            points,
            point_index,
            concurrent: concurrency,
            padded,
        })
    }

    /// Paired curves of the given degrees followed by the hyperplane `H`,
    /// each paired curve blown up at `d_i²` points.
    pub fn paired_with_hyperplane(degrees: &[u32]) -> Result<Self, ConfigError> {
        let mut components: Vec<_> = degrees.iter().map(|&d| Component::paired(d)).collect();
        components.push(Component::hyperplane());
        SurfaceConfig::new(components, vec![], vec![])
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.components[i].degree as i64
    }

    pub fn points(&self) -> &[BlownPoint] {
        &self.points
    }

    pub fn points_on(&self, i: usize) -> impl Iterator<Item = &BlownPoint> {
        self.points.iter().filter(move |p| p.component == i)
    }

    pub fn padded(&self) -> bool {
        self.padded
    }

    pub fn concurrent_sets(&self) -> &[BTreeSet<usize>] {
        &self.concurrent
    }

    /// First set of at least three components sharing a point, if any.
    pub fn triple_point(&self) -> Option<&BTreeSet<usize>> {
        self.concurrent.iter().find(|s| s.len() >= 3)
    }

    pub fn contains_point(&self, q: &PointId) -> bool {
        self.point_index.contains_key(q)
    }

    fn check_class(&self, d: &DivisorClass) -> Result<(), ConfigError> {
        match d.points().find(|q| !self.contains_point(q)) {
            Some(q) => Err(ConfigError::ForeignPoint(q.0.clone())),
            None => Ok(()),
        }
    }

    /// Intersection number, rejecting classes that mention points outside
    /// this configuration.
    pub fn intersect(&self, a: &DivisorClass, b: &DivisorClass) -> Result<i64, ConfigError> {
        self.check_class(a)?;
        self.check_class(b)?;
        Ok(a.dot(b))
    }

    /// `K = −3H + Σ E_Q`.
    pub fn canonical_class(&self) -> DivisorClass {
        DivisorClass::new(-3, self.points.iter().map(|p| (p.id.clone(), -1)))
    }

    /// Strict transform `d_i·H − Σ_{Q on D_i} E_Q`.
    pub fn strict_transform(&self, i: usize) -> Result<DivisorClass, ConfigError> {
        let c = self
            .components
            .get(i)
            .ok_or(ConfigError::NoSuchComponent(i))?;
        Ok(DivisorClass::new(
            c.degree as i64,
            self.points_on(i).map(|p| (p.id.clone(), 1)),
        ))
    }

    pub fn strict_transforms(&self) -> Vec<DivisorClass> {
        (0..self.components.len())
            .map(|i| self.strict_transform(i).expect("index in range"))
            .collect()
    }

    /// Gram matrix of the strict transforms of the boundary components.
    pub fn boundary_gram(&self) -> Vec<Vec<i64>> {
        let st = self.strict_transforms();
        st.iter()
            .map(|a| st.iter().map(|b| a.dot(b)).collect())
            .collect()
    }

    /// Euler characteristic `χ(d) = 1 + d·(d − K)/2` by Riemann–Roch on a
    /// rational surface.
    pub fn chi(&self, d: &DivisorClass) -> Result<BigRational, ConfigError> {
        self.check_class(d)?;
        let k = self.canonical_class();
        let twice = 2 + d.dot(&d.sub(&k));
        let chi = BigRational::new(BigInt::from(twice), BigInt::from(2));
        // d² ≡ d·K (mod 2) on any smooth surface.
        assert!(chi.is_integer(), "non-integral Euler characteristic for {d}");
        Ok(chi)
    }
}

/// Sum `Σ w_i·D̃_i` for integer weights.
pub fn weighted_sum(classes: &[DivisorClass], weights: &[i64]) -> DivisorClass {
    classes
        .iter()
        .zip(weights)
        .fold(DivisorClass::zero(), |acc, (c, w)| acc.add(&c.scale(*w)))
}

/// `wᵀ G w` for a rational weight vector.
pub fn quadratic_form(gram: &[Vec<i64>], w: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, row) in gram.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            acc += &w[i] * &w[j] * BigRational::from_integer(BigInt::from(*g));
        }
    }
    acc
}

/// `(G w)_i`.
pub fn pairing_row(gram: &[Vec<i64>], w: &[BigRational], i: usize) -> BigRational {
    gram[i]
        .iter()
        .zip(w)
        .map(|(g, wj)| wj * BigRational::from_integer(BigInt::from(*g)))
        .fold(BigRational::zero(), |a, b| a + b)
}
