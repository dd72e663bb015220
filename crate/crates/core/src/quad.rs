//! Exact arithmetic in real quadratic fields `ℚ(√d)`.
//!
//! A [`QuadExt`] is `a + b·√d` with rational `a`, `b` and `d` either `0`
//! (the value is rational, `b = 0`) or a squarefree integer `≥ 2`. Square
//! factors of the radicand are pulled into `b` on construction, so two values
//! of the same field are equal iff their representations are equal.
//!
//! Signs and comparisons are decided symbolically, by comparing squares of
//! rationals. Values from different fields are compared with
//! [`compare_cross`], which works in the biquadratic compositum.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{fmt_rational, parse_rational, signum};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("negative radicand {0}")]
    NegativeRadicand(String),
    #[error("operands live in different fields ℚ(√{0}) and ℚ(√{1})")]
    CrossField(BigInt, BigInt),
    #[error("division by zero")]
    DivisionByZero,
    #[error("quadratic has no real root (discriminant {0})")]
    NoRealRoot(String),
    #[error("quadratic has no positive root")]
    NoPositiveRoot,
    #[error("constant term must be positive, got {0}")]
    NonPositiveConstant(String),
    #[error("cannot parse `{0}` as a quadratic irrational")]
    Parse(String),
}

/// Trial division bound used when extracting square factors.
const TRIAL_LIMIT: u64 = 1 << 20;

/// Splits `n > 0` as `s²·f` with `f` squarefree as far as trial division up
/// to [`TRIAL_LIMIT`] (plus a final perfect-square test) can tell.
fn square_decompose(n: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(n.is_positive());
    if let Some(small) = n.to_u128() {
        let (s, f) = square_decompose_u128(small);
        return (s.into(), f.into());
    }
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let mut p: u64 = 2;
    while p <= TRIAL_LIMIT {
        let pb = BigInt::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        if e > 0 {
            square *= pb.pow(e / 2);
            if e % 2 == 1 {
                free *= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        let r = rest.sqrt();
        if &r * &r == rest {
            square *= r;
        } else {
            free *= rest;
        }
    }
    (square, free)
}

fn square_decompose_u128(mut rest: u128) -> (u128, u128) {
    let (mut square, mut free) = (1u128, 1u128);
    let mut p: u128 = 2;
    while p <= TRIAL_LIMIT as u128 && p * p <= rest {
        let mut e = 0u32;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            square *= p.pow(e / 2);
            if e % 2 == 1 {
                free *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        let r = rest.isqrt();
        if r * r == rest {
            square *= r;
        } else {
            free *= rest;
        }
    }
    (square, free)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadExt {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl QuadExt {
    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn rational(a: BigRational) -> Self {
        QuadExt {
            a,
            b: BigRational::zero(),
            d: BigInt::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    /// `a + b·√delta` in canonical form.
    pub fn new(a: BigRational, b: BigRational, delta: BigRational) -> Result<Self, QuadError> {
        if delta.is_negative() {
            return Err(QuadError::NegativeRadicand(fmt_rational(&delta)));
        }
        if delta.is_zero() || b.is_zero() {
            return Ok(Self::rational(a));
        }
        // √(p/q) = √(p·q)/q
        let radicand = delta.numer() * delta.denom();
        let (square, free) = square_decompose(&radicand);
        let coeff = b * BigRational::new(square, delta.denom().clone());
        if free.is_one() {
            return Ok(Self::rational(a + coeff));
        }
        Ok(QuadExt {
            a,
            b: coeff,
            d: free,
        })
    }

    /// `√r` for a nonnegative rational `r`.
    pub fn sqrt(r: &BigRational) -> Result<Self, QuadError> {
        Self::new(BigRational::zero(), BigRational::one(), r.clone())
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_coeff(&self) -> &BigRational {
        &self.b
    }

    /// Squarefree radicand, `0` for rational values.
    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.d.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn field_with(&self, other: &QuadExt) -> Result<BigInt, QuadError> {
        match (self.is_rational(), other.is_rational()) {
            (true, _) => Ok(other.d.clone()),
            (_, true) => Ok(self.d.clone()),
            _ if self.d == other.d => Ok(self.d.clone()),
            _ => Err(QuadError::CrossField(self.d.clone(), other.d.clone())),
        }
    }

    fn build(a: BigRational, b: BigRational, d: BigInt) -> Self {
        if b.is_zero() || d.is_zero() {
            Self::rational(a)
        } else {
            QuadExt { a, b, d }
        }
    }

    pub fn try_add(&self, other: &QuadExt) -> Result<QuadExt, QuadError> {
        let d = self.field_with(other)?;
        Ok(Self::build(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn try_sub(&self, other: &QuadExt) -> Result<QuadExt, QuadError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &QuadExt) -> Result<QuadExt, QuadError> {
        let d = self.field_with(other)?;
        let dr = BigRational::from_integer(d.clone());
        let a = &self.a * &other.a + &self.b * &other.b * dr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::build(a, b, d))
    }

    pub fn try_div(&self, other: &QuadExt) -> Result<QuadExt, QuadError> {
        self.try_mul(&other.inverse()?)
    }

    /// `a² − b²·d`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.clone())
    }

    pub fn conjugate(&self) -> QuadExt {
        Self::build(self.a.clone(), -self.b.clone(), self.d.clone())
    }

    pub fn inverse(&self) -> Result<QuadExt, QuadError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(QuadError::DivisionByZero);
        }
        let c = self.conjugate();
        Ok(Self::build(&c.a / &n, &c.b / &n, c.d))
    }

    pub fn neg(&self) -> QuadExt {
        Self::build(-self.a.clone(), -self.b.clone(), self.d.clone())
    }

    pub fn scale(&self, k: &BigRational) -> QuadExt {
        Self::build(&self.a * k, &self.b * k, self.d.clone())
    }

    pub fn add_rational(&self, k: &BigRational) -> QuadExt {
        Self::build(&self.a + k, self.b.clone(), self.d.clone())
    }

    pub fn square(&self) -> QuadExt {
        self.try_mul(self).expect("same field")
    }

    /// Exact sign in {−1, 0, +1}.
    pub fn sign(&self) -> i32 {
        let sa = signum(&self.a);
        let sb = signum(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: the larger square wins.
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(self.d.clone());
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    /// Ordering against a rational number.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.add_rational(&-r).sign().cmp(&0)
    }

    /// `⌊x⌋`, exactly.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        // |b|·√d = √(bn²·d)/bd, bracketed by integer square roots.
        let bn = self.b.numer().abs();
        let bd = self.b.denom();
        let r = (&bn * &bn * &self.d).sqrt();
        let (lo, hi) = if self.b.is_positive() {
            (
                &self.a + BigRational::new(r.clone(), bd.clone()),
                &self.a + BigRational::new(&r + 1, bd.clone()),
            )
        } else {
            (
                &self.a - BigRational::new(&r + 1, bd.clone()),
                &self.a - BigRational::new(r, bd.clone()),
            )
        };
        let candidate = hi.floor().to_integer();
        if candidate <= lo.floor().to_integer() {
            return candidate;
        }
        if self.cmp_rational(&BigRational::from_integer(candidate.clone())) == Ordering::Less {
            candidate - 1
        } else {
            candidate
        }
    }

    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    /// Rational bounds `lo ≤ x ≤ hi` from the continued-fraction convergents
    /// of `x` with denominator at most `max_den`. Both bounds are strict when
    /// `x` is irrational, and equal `x` when it is rational.
    pub fn rational_bounds(&self, max_den: &BigInt) -> (BigRational, BigRational) {
        if let Some(r) = self.as_rational() {
            return (r.clone(), r.clone());
        }
        // Convergents h_k/k_k: even k below x, odd k above.
        let (mut h_prev, mut h) = (BigInt::one(), BigInt::zero());
        let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
        let mut y = self.clone();
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for step in 0usize.. {
            let a = y.floor();
            let h_next = &a * &h_prev + &h;
            let k_next = &a * &k_prev + &k;
            h = std::mem::replace(&mut h_prev, h_next);
            k = std::mem::replace(&mut k_prev, k_next);
            if &k_prev > max_den && lo.is_some() && hi.is_some() {
                break;
            }
            let conv = BigRational::new(h_prev.clone(), k_prev.clone());
            if step % 2 == 0 {
                lo = Some(conv);
            } else {
                hi = Some(conv);
            }
            let frac = y.add_rational(&-BigRational::from_integer(a));
            y = frac.inverse().expect("irrational values have no zero remainder");
        }
        (lo.expect("set"), hi.expect("set"))
    }

    /// Floating approximation, for display only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        a + b * d.sqrt()
    }
}

/// Sign of `x + y` for values possibly in different quadratic fields.
fn sign_of_sum(x: &QuadExt, y: &QuadExt) -> i32 {
    if let Ok(s) = x.try_add(y) {
        return s.sign();
    }
    // x + y = u + v, u rational, v = b1√d1 + b2√d2 with d1 ≠ d2 squarefree.
    let u = &x.a + &y.a;
    let v1 = QuadExt::build(BigRational::zero(), x.b.clone(), x.d.clone());
    let v2 = QuadExt::build(BigRational::zero(), y.b.clone(), y.d.clone());
    let s1 = v1.sign();
    let s2 = v2.sign();
    let sv = if s1 == 0 || s1 == s2 {
        s2
    } else if s2 == 0 {
        s1
    } else {
        let m1 = &x.b * &x.b * BigRational::from_integer(x.d.clone());
        let m2 = &y.b * &y.b * BigRational::from_integer(y.d.clone());
        match m1.cmp(&m2) {
            Ordering::Greater => s1,
            Ordering::Less => s2,
            Ordering::Equal => 0,
        }
    };
    let su = signum(&u);
    if sv == 0 {
        return su;
    }
    if su == 0 || su == sv {
        return sv;
    }
    // v² = b1²d1 + b2²d2 + 2·b1·b2·√(d1·d2) lives in ℚ(√(d1·d2)).
    let v_sq = QuadExt::new(
        &x.b * &x.b * BigRational::from_integer(x.d.clone())
            + &y.b * &y.b * BigRational::from_integer(y.d.clone()),
        BigRational::from_integer(BigInt::from(2)) * &x.b * &y.b,
        BigRational::from_integer(&x.d * &y.d),
    )
    .expect("positive radicand");
    match v_sq.neg().add_rational(&(&u * &u)).sign() {
        1 => su,
        -1 => sv,
        _ => 0,
    }
}

/// Exact comparison of two values from arbitrary quadratic fields.
pub fn compare_cross(x: &QuadExt, y: &QuadExt) -> Ordering {
    sign_of_sum(x, &y.neg()).cmp(&0)
}

/// Smallest positive real root of `A·x² − 2B·x + C = 0` with `C > 0`.
pub fn min_root_quadratic(
    a: &BigRational,
    b: &BigRational,
    c: &BigRational,
) -> Result<QuadExt, QuadError> {
    if !c.is_positive() {
        return Err(QuadError::NonPositiveConstant(fmt_rational(c)));
    }
    if a.is_zero() {
        if !b.is_positive() {
            return Err(QuadError::NoPositiveRoot);
        }
        return Ok(QuadExt::rational(c / (BigRational::from_integer(2.into()) * b)));
    }
    let disc = b * b - a * c;
    if disc.is_negative() {
        return Err(QuadError::NoRealRoot(fmt_rational(&disc)));
    }
    if a.is_positive() && !b.is_positive() {
        // Both roots share the sign of B/A.
        return Err(QuadError::NoPositiveRoot);
    }
    // For A > 0 this is the smaller of two positive roots; for A < 0 the
    // roots have opposite signs and this one is positive.
    let root = QuadExt::sqrt(&disc)?
        .neg()
        .add_rational(b)
        .scale(&a.recip());
    debug_assert!(root.is_positive());
    Ok(root)
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_cross(self, other)
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return f.write_str(&fmt_rational(&self.a));
        }
        if !self.a.is_zero() {
            let op = if self.b.is_negative() { '-' } else { '+' };
            write!(
                f,
                "{} {} {}*sqrt({})",
                fmt_rational(&self.a),
                op,
                fmt_rational(&self.b.abs()),
                self.d
            )
        } else {
            write!(f, "{}*sqrt({})", fmt_rational(&self.b), self.d)
        }
    }
}

impl FromStr for QuadExt {
    type Err = QuadError;

    /// Parses the [`Display`](fmt::Display) form: `r`, `r*sqrt(d)`,
    /// `a + r*sqrt(d)` or `a - r*sqrt(d)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || QuadError::Parse(s.to_string());
        let s = s.trim();
        let Some(stripped) = s.strip_suffix(')') else {
            return Ok(QuadExt::rational(parse_rational(s).map_err(|_| err())?));
        };
        let (head, radicand) = stripped.rsplit_once("*sqrt(").ok_or_else(err)?;
        let d = parse_rational(radicand).map_err(|_| err())?;
        // Split `a ± b` at the last binary operator, if any.
        let split = head
            .char_indices()
            .rev()
            .find(|&(i, ch)| (ch == '+' || ch == '-') && i > 0 && head[..i].ends_with(' '));
        let (a, b) = match split {
            Some((i, op)) => {
                let a = parse_rational(&head[..i]).map_err(|_| err())?;
                let mut b = parse_rational(&head[i + 1..]).map_err(|_| err())?;
                if op == '-' {
                    b = -b;
                }
                (a, b)
            }
            None => (BigRational::zero(), parse_rational(head).map_err(|_| err())?),
        };
        QuadExt::new(a, b, d)
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `true` iff `n` is a perfect square.
pub fn is_square(n: &BigInt) -> bool {
    if n.sign() == Sign::Minus {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}
