//! Heights and Nevanlinna-type functions over `K = ℚ(t)`.
//!
//! Points of `P¹` over an algebraic closure are grouped into Galois orbits:
//! a finite place is an irreducible primitive polynomial `p` and counts
//! `deg p` geometric points, each with the same local data. Every quantity
//! below is a sum over geometric points, so the grouping is exact.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::{Certificate, Status};
use crate::picard::SurfaceConfig;
use crate::poly::{cmp_poly, ZPoly};
use crate::positivity::WeightedBoundary;
use crate::rational::{common_denominator, fmt_rational, int, parse_rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FfError {
    #[error("all coordinates are zero")]
    ZeroMap,
    #[error("the image lies inside the hypersurface")]
    ImageInDivisor,
    #[error("`{0}` is not irreducible")]
    Reducible(String),
    #[error("form `{form}`: {reason}")]
    Form { form: String, reason: String },
    #[error("form uses X{var} but the map has {arity} coordinates")]
    Arity { var: usize, arity: usize },
    #[error("coordinates are linearly dependent over the constants")]
    Degenerate,
    #[error("hyperplane {0} is not a nonzero linear form")]
    NotHyperplane(usize),
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("the certificate does not pass")]
    CertificateNotPassing,
}

/// A place of `ℚ(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    /// Irreducible primitive polynomial with positive leading coefficient.
    Finite(ZPoly),
    Infinity,
}

impl Place {
    pub fn finite(p: ZPoly) -> Result<Self, FfError> {
        if !p.is_irreducible() {
            return Err(FfError::Reducible(p.to_string()));
        }
        Ok(Place::Finite(p.primitive()))
    }

    /// `t − a`.
    pub fn linear(a: i64) -> Self {
        Place::Finite(ZPoly::linear(a))
    }

    pub fn degree(&self) -> u64 {
        match self {
            Place::Finite(p) => p.degree().expect("nonconstant") as u64,
            Place::Infinity => 1,
        }
    }

    /// `v(f)`; `None` for `f = 0`.
    pub fn valuation(&self, f: &ZPoly) -> Option<i64> {
        let d = f.degree()?;
        Some(match self {
            Place::Finite(p) => f.valuation(p) as i64,
            Place::Infinity => -(d as i64),
        })
    }

    pub fn rational_valuation(&self, f: &RatFn) -> i64 {
        self.valuation(&f.num).expect("nonzero") - self.valuation(&f.den).expect("nonzero")
    }
}

impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Infinity, Place::Infinity) => Ordering::Equal,
            (Place::Infinity, _) => Ordering::Less,
            (_, Place::Infinity) => Ordering::Greater,
            (Place::Finite(a), Place::Finite(b)) => cmp_poly(a, b),
        }
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "({p})"),
            Place::Infinity => f.write_str("inf"),
        }
    }
}

fn geometric_size(s: &[Place]) -> u64 {
    s.iter().map(Place::degree).sum()
}

/// A nonzero rational function `num/den`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    pub num: ZPoly,
    pub den: ZPoly,
}

impl RatFn {
    pub fn new(num: ZPoly, den: ZPoly) -> Result<Self, FfError> {
        if num.is_zero() || den.is_zero() {
            return Err(FfError::ZeroMap);
        }
        Ok(RatFn { num, den })
    }

    /// Finite places in the support of the divisor, found by factoring.
    pub fn finite_support(&self) -> Vec<Place> {
        let mut out: Vec<Place> = [&self.num, &self.den]
            .into_iter()
            .filter(|p| !p.is_constant())
            .flat_map(|p| p.factor().factors.into_iter().map(|(g, _)| Place::Finite(g)))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// `Σ_places deg(𝔭)·v_𝔭(f)`, which vanishes for every nonzero `f`.
    pub fn degree_sum(&self) -> i64 {
        let finite: i64 = self
            .finite_support()
            .iter()
            .map(|p| p.degree() as i64 * p.rational_valuation(self))
            .sum();
        finite + Place::Infinity.rational_valuation(self)
    }
}

/// A point of `P^m(ℚ(t))` as coprime integer polynomials, scaled so the
/// first nonzero coordinate has positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMap {
    coords: Vec<ZPoly>,
}

impl RatMap {
    pub fn new(coords: Vec<ZPoly>) -> Result<Self, FfError> {
        if coords.iter().all(ZPoly::is_zero) {
            return Err(FfError::ZeroMap);
        }
        let g = coords
            .iter()
            .filter(|c| !c.is_zero())
            .fold(ZPoly::zero(), |acc, c| if acc.is_zero() { c.primitive() } else { acc.gcd(c) });
        let mut coords: Vec<ZPoly> = coords
            .iter()
            .map(|c| c.div_exact(&g).expect("gcd divides"))
            .collect();
        let mut content = coords.iter().fold(BigInt::zero(), |acc, c| num_integer::Integer::gcd(&acc, &c.content()));
        let first = coords.iter().find(|c| !c.is_zero()).expect("nonzero");
        if first.leading().expect("nonzero").is_negative() {
            content = -content;
        }
        for c in &mut coords {
            *c = ZPoly::new(c.coeffs().iter().map(|a| a / &content).collect());
        }
        Ok(RatMap { coords })
    }

    pub fn from_i64s(coords: &[&[i64]]) -> Result<Self, FfError> {
        Self::new(coords.iter().map(|c| ZPoly::from_i64s(c)).collect())
    }

    /// Clears denominators of `[f_0 : … : f_m]`.
    pub fn from_rational_functions(fs: &[RatFn]) -> Result<Self, FfError> {
        let coords = fs
            .iter()
            .enumerate()
            .map(|(i, f)| {
                fs.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .fold(f.num.clone(), |acc, (_, g)| acc.mul(&g.den))
            })
            .collect();
        Self::new(coords)
    }

    pub fn coords(&self) -> &[ZPoly] {
        &self.coords
    }

    /// `m` for a point of `P^m`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Number of poles: `max_j deg x_j` for coprime coordinates.
    pub fn height(&self) -> u64 {
        self.coords.iter().filter_map(ZPoly::degree).max().unwrap_or(0) as u64
    }

    /// `Σ_𝔭 deg(𝔭)·(−min_j v_𝔭(x_j))` summed over the places that can
    /// contribute; equals [`RatMap::height`].
    pub fn height_by_places(&self) -> u64 {
        let mut places: Vec<Place> = self
            .coords
            .iter()
            .filter(|c| !c.is_constant())
            .flat_map(|c| c.factor().factors.into_iter().map(|(g, _)| Place::Finite(g)))
            .collect();
        places.sort();
        places.dedup();
        places.push(Place::Infinity);
        places
            .iter()
            .map(|p| {
                let min = self.coords.iter().filter_map(|c| p.valuation(c)).min().expect("nonzero");
                p.degree() as i64 * -min
            })
            .sum::<i64>() as u64
    }

    /// The image of `t = ∞`: coefficients of `t^h`.
    pub fn value_at_infinity(&self) -> Vec<BigInt> {
        let h = self.height() as usize;
        self.coords.iter().map(|c| c.coeff(h)).collect()
    }

    /// Coordinates linearly independent over `ℚ`.
    pub fn is_nondegenerate(&self) -> bool {
        let width = self.height() as usize + 1;
        let rows = self
            .coords
            .iter()
            .map(|c| (0..width).map(|k| BigRational::from_integer(c.coeff(k))).collect())
            .collect();
        rank(rows) == self.coords.len()
    }

    /// The curve passes through the point `p` (at a finite `t` or at `∞`).
    pub fn passes_through(&self, p: &[BigRational]) -> bool {
        let den = common_denominator(p);
        let p: Vec<BigInt> = p.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
        let n = self.coords.len();
        let mut g = ZPoly::zero();
        for i in 0..n {
            for j in i + 1..n {
                let minor = self.coords[j].scale(&p[i]).sub(&self.coords[i].scale(&p[j]));
                g = if g.is_zero() { minor.primitive() } else { g.gcd(&minor) };
            }
        }
        if g.is_zero() || !g.is_constant() {
            return true;
        }
        let v = self.value_at_infinity();
        (0..n).all(|i| (i + 1..n).all(|j| &v[i] * &p[j] == &v[j] * &p[i]))
    }

    pub fn eval(&self, f: &Form) -> Result<ZPoly, FfError> {
        f.eval(self)
    }
}

impl fmt::Display for RatMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(" : ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

/// Rank over `ℚ` by Gaussian elimination.
pub fn rank(rows: Vec<Vec<BigRational>>) -> usize {
    let mut basis = Basis::default();
    rows.into_iter().filter(|r| basis.insert(r.clone())).count()
}

/// Incrementally built echelon basis.
#[derive(Debug, Default, Clone)]
struct Basis {
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl Basis {
    /// Adds `v` if it is independent of the stored rows.
    fn insert(&mut self, mut v: Vec<BigRational>) -> bool {
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                let k = v[*pivot].clone() / &row[*pivot];
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= &k * r;
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }
}

/// A homogeneous form in `X0, …, Xm` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    terms: Vec<(BigRational, Vec<u32>)>,
    degree: u32,
    text: String,
}

impl Form {
    /// `Σ a_j·X_j`.
    pub fn linear(coeffs: &[BigRational]) -> Result<Self, FfError> {
        let terms: Vec<_> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(j, a)| {
                let mut e = vec![0; j + 1];
                e[j] = 1;
                (a.clone(), e)
            })
            .collect();
        let text = terms
            .iter()
            .map(|(a, e)| format!("{}*X{}", fmt_rational(a), e.len() - 1))
            .collect::<Vec<_>>()
            .join(" + ");
        Self::from_terms(terms, text)
    }

    fn from_terms(terms: Vec<(BigRational, Vec<u32>)>, text: String) -> Result<Self, FfError> {
        let err = |reason: &str| FfError::Form {
            form: text.clone(),
            reason: reason.into(),
        };
        let mut merged: Vec<(BigRational, Vec<u32>)> = Vec::new();
        for (a, mut e) in terms {
            while e.last() == Some(&0) {
                e.pop();
            }
            match merged.iter_mut().find(|(_, f)| *f == e) {
                Some((b, _)) => *b += a,
                None => merged.push((a, e)),
            }
        }
        merged.retain(|(a, _)| !a.is_zero());
        let Some(degree) = merged.first().map(|(_, e)| e.iter().sum::<u32>()) else {
            return Err(err("the zero form"));
        };
        if merged.iter().any(|(_, e)| e.iter().sum::<u32>() != degree) {
            return Err(err("not homogeneous"));
        }
        if degree == 0 {
            return Err(err("constant form"));
        }
        Ok(Form {
            terms: merged,
            degree,
            text,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Highest variable index used.
    pub fn max_var(&self) -> usize {
        self.terms.iter().map(|(_, e)| e.len() - 1).max().expect("nonzero form")
    }

    /// Coefficients `(a_0, …, a_n)` of a linear form.
    pub fn linear_coeffs(&self, n: usize) -> Option<Vec<BigRational>> {
        if self.degree != 1 || self.max_var() >= n {
            return None;
        }
        let mut v = vec![BigRational::zero(); n];
        for (a, e) in &self.terms {
            v[e.len() - 1] = a.clone();
        }
        Some(v)
    }

    /// `F(x)` up to a nonzero constant (denominators are cleared).
    pub fn eval(&self, x: &RatMap) -> Result<ZPoly, FfError> {
        let arity = x.coords.len();
        if self.max_var() >= arity {
            return Err(FfError::Arity {
                var: self.max_var(),
                arity,
            });
        }
        let den = common_denominator(self.terms.iter().map(|(a, _)| a));
        let mut out = ZPoly::zero();
        for (a, e) in &self.terms {
            let c = (a * BigRational::from_integer(den.clone())).to_integer();
            let term = e
                .iter()
                .enumerate()
                .fold(ZPoly::constant(c), |acc, (j, &k)| acc.mul(&x.coords[j].pow(k)));
            out = out.add(&term);
        }
        Ok(out)
    }

    pub fn eval_point(&self, p: &[BigRational]) -> BigRational {
        self.terms
            .iter()
            .map(|(a, e)| {
                e.iter()
                    .enumerate()
                    .fold(a.clone(), |acc, (j, &k)| acc * num_traits::pow(p[j].clone(), k as usize))
            })
            .sum()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for Form {
    type Err = FfError;

    /// Sums of terms such as `3/2*X0^2*X1`, `-X2` or `X0`.
    fn from_str(s: &str) -> Result<Self, FfError> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |reason: String| FfError::Form {
            form: s.to_string(),
            reason,
        };
        if text.is_empty() {
            return Err(err("empty".into()));
        }
        let mut pieces = Vec::new();
        let mut start = 0;
        for (i, ch) in text.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !text[..i].ends_with(['*', '^']) {
                pieces.push(&text[start..i]);
                start = i;
            }
        }
        pieces.push(&text[start..]);

        let mut terms = Vec::new();
        for piece in pieces {
            let (sign, body) = match piece.as_bytes().first() {
                Some(b'-') => (-1, &piece[1..]),
                Some(b'+') => (1, &piece[1..]),
                _ => (1, piece),
            };
            if body.is_empty() {
                return Err(err("dangling sign".into()));
            }
            let mut coeff = int(sign);
            let mut exps: Vec<u32> = Vec::new();
            for factor in body.split('*') {
                if let Some(var) = factor.strip_prefix('X') {
                    let (idx, pow) = match var.split_once('^') {
                        Some((i, p)) => (i, p.parse::<u32>().map_err(|_| err(format!("bad exponent in `{factor}`")))?),
                        None => (var, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| err(format!("bad variable `{factor}`")))?;
                    if exps.len() <= idx {
                        exps.resize(idx + 1, 0);
                    }
                    exps[idx] += pow;
                } else {
                    let c = parse_rational(factor).map_err(|e| err(e.0))?;
                    coeff *= c;
                }
            }
            terms.push((coeff, exps));
        }
        Form::from_terms(terms, s.trim().to_string())
    }
}

/// `λ_{F,𝔭}(x) = v_𝔭(F(x)) − deg F·min_j v_𝔭(x_j)`.
pub fn weil_hypersurface(f: &Form, x: &RatMap, place: &Place) -> Result<u64, FfError> {
    let fx = f.eval(x)?;
    weil_of_value(f.degree(), x.height(), &fx, place)
}

fn weil_of_value(e: u32, h: u64, fx: &ZPoly, place: &Place) -> Result<u64, FfError> {
    let v = place.valuation(fx).ok_or(FfError::ImageInDivisor)?;
    // Coprime coordinates: min_j v = 0 at finite places and −h at ∞.
    let shift = match place {
        Place::Finite(_) => 0,
        Place::Infinity => e as i64 * h as i64,
    };
    Ok((v + shift) as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counting {
    /// `m_S = Σ_{𝔭∈S} deg 𝔭·λ_𝔭`.
    pub proximity: u64,
    /// `N_S = Σ_{𝔭∉S} deg 𝔭·λ_𝔭`.
    pub counting: u64,
    /// Geometric points outside `S` where `λ > 0`.
    pub truncated: u64,
}

/// Proximity over `S`, counting over the complement via factorization, and
/// the truncated count via the radical.
pub fn counting_functions(f: &Form, x: &RatMap, s: &[Place]) -> Result<Counting, FfError> {
    let fx = f.eval(x)?;
    if fx.is_zero() {
        return Err(FfError::ImageInDivisor);
    }
    let (e, h) = (f.degree(), x.height());
    let proximity = s
        .iter()
        .map(|p| weil_of_value(e, h, &fx, p).map(|l| p.degree() * l))
        .sum::<Result<u64, _>>()?;

    let lambda_inf = weil_of_value(e, h, &fx, &Place::Infinity)?;
    let inf_outside = !s.contains(&Place::Infinity);
    let mut counting = if inf_outside { lambda_inf } else { 0 };
    if !fx.is_constant() {
        for (g, k) in fx.factor().factors {
            let place = Place::Finite(g);
            if !s.contains(&place) {
                counting += place.degree() * k as u64;
            }
        }
    }

    let rad = fx.squarefree_part();
    let mut truncated = rad.degree().expect("nonzero") as u64;
    for p in s {
        if let Place::Finite(g) = p {
            if !rad.is_constant() && rad.div_exact(g).is_some() {
                truncated -= p.degree();
            }
        }
    }
    if inf_outside && lambda_inf > 0 {
        truncated += 1;
    }
    Ok(Counting {
        proximity,
        counting,
        truncated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WangCheck {
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

/// `Σ_{𝔭∈S} deg 𝔭·max_J Σ_{j∈J} λ_{H_j,𝔭}(x) ≤ (m+1)h + m(m+1)/2·(#S − 2)`
/// for `x` nondegenerate, `J` over linearly independent subsets.
pub fn wang_smt_check(x: &RatMap, hyperplanes: &[Form], s: &[Place]) -> Result<WangCheck, FfError> {
    let n = x.coords.len();
    let coeffs = hyperplanes
        .iter()
        .enumerate()
        .map(|(j, f)| f.linear_coeffs(n).ok_or(FfError::NotHyperplane(j)))
        .collect::<Result<Vec<_>, _>>()?;
    if !x.is_nondegenerate() {
        return Err(FfError::Degenerate);
    }
    let values = hyperplanes.iter().map(|f| f.eval(x)).collect::<Result<Vec<_>, _>>()?;
    let h = x.height();
    let mut lhs: i64 = 0;
    for place in s {
        let mut lambdas = values
            .iter()
            .enumerate()
            .map(|(j, v)| weil_of_value(1, h, v, place).map(|l| (l, j)))
            .collect::<Result<Vec<_>, _>>()?;
        lambdas.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        // Greedy is optimal on the linear matroid.
        let mut basis = Basis::default();
        let mut best = 0u64;
        for (l, j) in lambdas {
            if l > 0 && basis.insert(coeffs[j].clone()) {
                best += l;
            }
        }
        lhs += (place.degree() * best) as i64;
    }
    let m = x.dim() as i64;
    let rhs = (m + 1) * h as i64 + m * (m + 1) / 2 * (geometric_size(s) as i64 - 2);
    Ok(WangCheck {
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

/// Plane model of the boundary: one form per component and the blown-up
/// points in the order of the configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geometry {
    pub forms: Vec<Form>,
    pub points: Vec<Vec<BigRational>>,
}

impl Geometry {
    /// Lines `X0, X1, X2, X0+X1+X2`; each paired line is blown up at one
    /// point off the other three lines.
    pub fn three_lines() -> Self {
        let forms = ["X0", "X1", "X2", "X0 + X1 + X2"].map(|s| s.parse().expect("valid form"));
        let points = [[0, 1, 2], [1, 0, 2], [1, 2, 0]]
            .iter()
            .map(|p| p.iter().map(|&a| int(a)).collect())
            .collect();
        Geometry {
            forms: forms.to_vec(),
            points,
        }
    }

    pub fn parse(forms: &[String], points: &[Vec<String>]) -> Result<Self, FfError> {
        let forms = forms.iter().map(|s| s.parse()).collect::<Result<Vec<Form>, _>>()?;
        let points = points
            .iter()
            .map(|p| {
                p.iter()
                    .map(|a| parse_rational(a).map_err(|e| FfError::Geometry(e.0)))
                    .collect()
            })
            .collect::<Result<Vec<Vec<_>>, _>>()?;
        Ok(Geometry { forms, points })
    }

    /// Degrees and incidences agree with the configuration.
    pub fn validate(&self, cfg: &SurfaceConfig) -> Result<(), FfError> {
        let bad = |s: String| Err(FfError::Geometry(s));
        if self.forms.len() != cfg.component_count() {
            return bad(format!("{} forms for {} components", self.forms.len(), cfg.component_count()));
        }
        for (i, f) in self.forms.iter().enumerate() {
            if f.max_var() > 2 {
                return bad(format!("form {i} is not a plane form"));
            }
            if f.degree() as i64 != cfg.degree(i) {
                return bad(format!("form {i} has degree {} but the component has degree {}", f.degree(), cfg.degree(i)));
            }
        }
        if self.points.len() != cfg.points().len() {
            return bad(format!("{} points for {} blown-up points", self.points.len(), cfg.points().len()));
        }
        for (k, (p, bp)) in self.points.iter().zip(cfg.points()).enumerate() {
            if p.len() != 3 || p.iter().all(Zero::is_zero) {
                return bad(format!("point {k} is not a point of the plane"));
            }
            for (i, f) in self.forms.iter().enumerate() {
                let on = f.eval_point(p).is_zero();
                if on != (i == bp.component) {
                    return bad(format!(
                        "point {k} ({}) must lie on component {} only",
                        bp.id, bp.component
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub map: String,
    pub height: u64,
    #[serde(rename = "N1")]
    pub n1: u64,
    /// `deg φ*D_p`.
    pub lhs: u64,
    /// `max{1, N1 − 2}`.
    pub rhs: u64,
    #[serde(with = "crate::rational::serde_rational")]
    pub ratio: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exclusion {
    Constant,
    ThroughBlownPoint(usize),
    ImageInBoundary(usize),
}

impl fmt::Display for Exclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exclusion::Constant => f.write_str("constant map"),
            Exclusion::ThroughBlownPoint(k) => write!(f, "passes through blown-up point {k}"),
            Exclusion::ImageInBoundary(i) => write!(f, "image inside component {i}"),
        }
    }
}

/// Rational curves `P¹ → X` tested against the linear height bound for a
/// certified configuration.
#[derive(Debug, Clone)]
pub struct Probe {
    geometry: Geometry,
    weights: Vec<u64>,
    weighted_degree: u64,
}

impl Probe {
    pub fn new(cfg: &SurfaceConfig, wb: &WeightedBoundary, geometry: Geometry, cert: &Certificate) -> Result<Self, FfError> {
        if cert.outcome.status != Status::Pass {
            return Err(FfError::CertificateNotPassing);
        }
        geometry.validate(cfg)?;
        let weights: Vec<u64> = wb
            .integer_weights()
            .ok_or(FfError::CertificateNotPassing)?
            .into_iter()
            .map(|w| w as u64)
            .collect();
        let weighted_degree = (0..weights.len()).map(|i| weights[i] * cfg.degree(i) as u64).sum();
        Ok(Probe {
            geometry,
            weights,
            weighted_degree,
        })
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// Avoiding the blown-up points, `deg φ*D̃_i = d_i·h(x)`.
    pub fn evaluate(&self, x: &RatMap) -> Result<ProbeRecord, Exclusion> {
        let h = x.height();
        if h == 0 {
            return Err(Exclusion::Constant);
        }
        let mut product = ZPoly::one();
        let mut at_infinity = false;
        for (i, f) in self.geometry.forms.iter().enumerate() {
            let v = f.eval(x).map_err(|_| Exclusion::ImageInBoundary(i))?;
            if v.is_zero() {
                return Err(Exclusion::ImageInBoundary(i));
            }
            at_infinity |= (v.degree().expect("nonzero") as u64) < f.degree() as u64 * h;
            product = product.mul(&v);
        }
        if let Some(k) = self.geometry.points.iter().position(|p| x.passes_through(p)) {
            return Err(Exclusion::ThroughBlownPoint(k));
        }
        let n1 = product.squarefree_part().degree().expect("nonzero") as u64 + at_infinity as u64;
        let lhs = self.weighted_degree * h;
        let rhs = n1.saturating_sub(2).max(1);
        Ok(ProbeRecord {
            map: x.to_string(),
            height: h,
            n1,
            lhs,
            rhs,
            ratio: BigRational::new(lhs.into(), rhs.into()),
        })
    }
}

/// Sampling knobs shared by the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleParams {
    pub max_degree: u32,
    pub coeff_bound: i64,
    /// Largest `m` for maps to `P^m`.
    pub max_dim: usize,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams {
            max_degree: 10,
            coeff_bound: 100,
            max_dim: 3,
        }
    }
}

/// Independent stream per sample so results do not depend on scheduling.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_poly<R: Rng>(rng: &mut R, degree: u32, bound: i64) -> ZPoly {
    ZPoly::new((0..=degree).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect())
}

/// Product of small linear factors `(t − a)` times a random cofactor, so
/// that coordinates share roots with the places in the sweep.
fn clustered_poly<R: Rng>(rng: &mut R, degree: u32, bound: i64) -> ZPoly {
    let roots = rng.gen_range(0..=degree);
    let mut p = ZPoly::one();
    for _ in 0..roots {
        p = p.mul(&ZPoly::linear(rng.gen_range(-2..=2)));
    }
    let rest = random_poly(rng, degree - roots, bound.min(5));
    p.mul(&rest)
}

/// A nondegenerate map to `P^m`; resamples until independence holds.
pub fn random_map<R: Rng>(rng: &mut R, params: &SampleParams) -> RatMap {
    let m = rng.gen_range(1..=params.max_dim);
    loop {
        let clustered = rng.gen_bool(0.5);
        let coords = (0..=m)
            .map(|_| {
                let d = rng.gen_range(0..=params.max_degree);
                if clustered {
                    clustered_poly(rng, d, params.coeff_bound)
                } else {
                    random_poly(rng, d, params.coeff_bound)
                }
            })
            .collect();
        if let Ok(x) = RatMap::new(coords) {
            if x.is_nondegenerate() {
                return x;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct WangSample {
    pub map: RatMap,
    pub hyperplanes: Vec<Form>,
    pub places: Vec<Place>,
}

pub fn wang_sample(seed: u64, index: u64, params: &SampleParams) -> WangSample {
    let mut rng = sample_rng(seed, index);
    let map = random_map(&mut rng, params);
    let n = map.coords.len();
    let mut hyperplanes: Vec<Form> = (0..n)
        .map(|j| {
            let mut c = vec![BigRational::zero(); n];
            c[j] = BigRational::one();
            Form::linear(&c).expect("nonzero")
        })
        .collect();
    for _ in 0..rng.gen_range(0..=2) {
        let c: Vec<BigRational> = (0..n).map(|_| int(rng.gen_range(-3..=3))).collect();
        if let Ok(f) = Form::linear(&c) {
            hyperplanes.push(f);
        }
    }
    let mut places: Vec<Place> = (-2..=2).filter(|_| rng.gen_bool(0.6)).map(Place::linear).collect();
    if rng.gen_bool(0.7) {
        places.push(Place::Infinity);
    }
    if rng.gen_bool(0.3) {
        places.push(Place::Finite(ZPoly::from_i64s(&[1, 0, 1])));
    }
    places.sort();
    WangSample {
        map,
        hyperplanes,
        places,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WangSummary {
    pub samples: u64,
    pub violations: u64,
    /// Samples where `m_S + N_S ≠ deg F·h` for the checked hyperplane.
    pub fmt_failures: u64,
    /// Largest `lhs − rhs` seen (nonpositive when no violation).
    pub max_excess: i64,
    pub first_violation: Option<u64>,
}

impl WangSummary {
    fn merge(mut self, o: WangSummary) -> WangSummary {
        self.samples += o.samples;
        self.violations += o.violations;
        self.fmt_failures += o.fmt_failures;
        self.max_excess = self.max_excess.max(o.max_excess);
        self.first_violation = match (self.first_violation, o.first_violation) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Checks the inequality and the First Main Theorem identity per sample.
pub fn wang_sweep(seed: u64, samples: u64, params: &SampleParams) -> WangSummary {
    let empty = || WangSummary {
        max_excess: i64::MIN,
        ..Default::default()
    };
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = wang_sample(seed, i, params);
            let check = wang_smt_check(&s.map, &s.hyperplanes, &s.places).expect("nondegenerate sample");
            // One hyperplane per sample, rotating; factoring dominates the cost.
            let f = &s.hyperplanes[i as usize % s.hyperplanes.len()];
            let c = counting_functions(f, &s.map, &s.places).expect("nonzero");
            let fmt_ok = c.proximity + c.counting == f.degree() as u64 * s.map.height();
            WangSummary {
                samples: 1,
                violations: !check.holds as u64,
                fmt_failures: !fmt_ok as u64,
                max_excess: check.lhs - check.rhs,
                first_violation: (!check.holds).then_some(i),
            }
        })
        .reduce(empty, WangSummary::merge)
}

pub fn random_ratfn<R: Rng>(rng: &mut R, params: &SampleParams) -> RatFn {
    loop {
        let d1 = rng.gen_range(0..=params.max_degree);
        let d2 = rng.gen_range(0..=params.max_degree);
        let num = clustered_poly(rng, d1, params.coeff_bound);
        let den = random_poly(rng, d2, params.coeff_bound);
        if let Ok(f) = RatFn::new(num, den) {
            return f;
        }
    }
}

/// Number of sampled rational functions whose degree sum is nonzero.
pub fn product_formula_sweep(seed: u64, samples: u64, params: &SampleParams) -> u64 {
    (0..samples)
        .into_par_iter()
        .filter(|&i| random_ratfn(&mut sample_rng(seed, i), params).degree_sum() != 0)
        .count() as u64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeSummary {
    pub sampled: u64,
    pub excluded: u64,
    pub records: Vec<ProbeRecord>,
    /// Largest observed ratio: an empirical lower bound for the constant.
    pub alpha_emp: Option<BigRational>,
    /// Records with `lhs > alpha_emp·rhs`.
    pub violations: u64,
}

pub fn random_plane_map<R: Rng>(rng: &mut R, params: &SampleParams) -> RatMap {
    loop {
        let d = rng.gen_range(1..=params.max_degree.max(1));
        let coords = (0..3).map(|_| random_poly(rng, d, params.coeff_bound)).collect();
        if let Ok(x) = RatMap::new(coords) {
            return x;
        }
    }
}

pub fn probe_sweep(probe: &Probe, seed: u64, samples: u64, params: &SampleParams) -> ProbeSummary {
    let outcomes: Vec<_> = (0..samples)
        .into_par_iter()
        .map(|i| probe.evaluate(&random_plane_map(&mut sample_rng(seed, i), params)))
        .collect();
    let records: Vec<ProbeRecord> = outcomes.iter().filter_map(|o| o.as_ref().ok().cloned()).collect();
    let alpha_emp = records.iter().map(|r| r.ratio.clone()).max();
    let violations = match &alpha_emp {
        Some(a) => records
            .iter()
            .filter(|r| BigRational::from_integer(r.lhs.into()) > a * BigRational::from_integer(r.rhs.into()))
            .count() as u64,
        None => 0,
    };
    ProbeSummary {
        sampled: samples,
        excluded: samples - records.len() as u64,
        records,
        alpha_emp,
        violations,
    }
}

/// Float rendering for summaries.
pub fn approx(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
