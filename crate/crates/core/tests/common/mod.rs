//! Independent oracles for the integration tests. Nothing here calls into
//! the algorithms under test; inputs and outputs are plain integers,
//! rationals and decimal intervals.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use orbicert::picard::{Component, ComponentRole, SurfaceConfig};
use orbicert::quad::QuadExt;
use rand::Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

/// `[lo, hi]` with `lo ≤ x·10^k ≤ hi` and `hi − lo ≤ 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decimal {
    pub lo: BigInt,
    pub hi: BigInt,
    pub digits: u32,
}

impl Decimal {
    pub fn rational(r: &BigRational, digits: u32) -> Self {
        let scaled = r * BigRational::from_integer(pow10(digits));
        Decimal {
            lo: scaled.floor().to_integer(),
            hi: scaled.ceil().to_integer(),
            digits,
        }
    }

    /// `sign(c)·√(c²·n)` enclosed from `isqrt`.
    pub fn sqrt_times(c: &BigRational, n: &BigInt, digits: u32) -> Self {
        if c.is_zero() {
            return Self::rational(&BigRational::zero(), digits);
        }
        // c·√n·10^k = sign(c)·√(c_num²·n·10^{2k}) / c_den
        let big = c.numer() * c.numer() * n * pow10(2 * digits);
        let root = big.sqrt();
        let lo = BigRational::new(root.clone(), c.denom().clone());
        let hi = BigRational::new(root + 1, c.denom().clone());
        let (lo, hi) = if c.is_negative() { (-hi, -lo) } else { (lo, hi) };
        Decimal {
            lo: lo.floor().to_integer(),
            hi: hi.ceil().to_integer(),
            digits,
        }
    }

    pub fn add(&self, o: &Decimal) -> Decimal {
        assert_eq!(self.digits, o.digits);
        Decimal {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
            digits: self.digits,
        }
    }

    pub fn of_quad(x: &QuadExt, digits: u32) -> Self {
        Self::rational(x.rational_part(), digits).add(&Self::sqrt_times(x.irrational_coeff(), x.radicand(), digits))
    }

    /// Definitely below, definitely above, or overlapping.
    pub fn compare(&self, o: &Decimal) -> Option<std::cmp::Ordering> {
        if self.hi < o.lo {
            Some(std::cmp::Ordering::Less)
        } else if self.lo > o.hi {
            Some(std::cmp::Ordering::Greater)
        } else {
            None
        }
    }

    pub fn contains_within(&self, o: &Decimal, slack: i64) -> bool {
        &self.lo - slack <= o.hi && o.lo <= &self.hi + slack
    }
}

/// Classes `h·H − Σ e_k·E_k` as `[h, e_1, …]` with the form `diag(1, −1, …)`.
pub fn lattice_dot(a: &[i64], b: &[i64]) -> i64 {
    a[0] * b[0] - a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<i64>()
}

pub fn lattice_add(a: &[i64], b: &[i64], k: i64) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + k * y).collect()
}

/// `K = −3H + ΣE_k`.
pub fn lattice_canonical(points: usize) -> Vec<i64> {
    let mut k = vec![-1; points + 1];
    k[0] = -3;
    k
}

pub fn lattice_chi(d: &[i64]) -> BigRational {
    let k = lattice_canonical(d.len() - 1);
    q(2 + lattice_dot(d, d) - lattice_dot(&k, d), 2)
}

/// The three-line configuration by hand: `D̃_i = H − E_i`, `H̃ = H`.
pub fn three_lines_boundary() -> Vec<Vec<i64>> {
    vec![vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![1, 0, 0, 1], vec![1, 0, 0, 0]]
}

pub fn three_lines_dp() -> Vec<i64> {
    let w = [4, 4, 4, 3];
    three_lines_boundary()
        .iter()
        .zip(w)
        .fold(vec![0; 4], |acc, (d, p)| lattice_add(&acc, d, p))
}

/// Number of monomials of degree `k` in three variables, by enumeration.
pub fn monomials(k: i64) -> u64 {
    if k < 0 {
        return 0;
    }
    let mut n = 0;
    for i in 0..=k {
        // the third exponent is k − i − j
        for _j in 0..=k - i {
            n += 1;
        }
    }
    n
}

/// `Σ_{m≥1} h⁰(O(aN − m)) / (N·h⁰(O(aN)))` by monomial enumeration.
pub fn plane_ratio_bruteforce(a: i64, n: i64) -> BigRational {
    let top = a * n;
    let sum: u64 = (1..=top).map(|m| monomials(top - m)).sum();
    BigRational::new(sum.into(), (BigInt::from(n) * BigInt::from(monomials(top))).into())
}

/// Truncation point and volume bound in fixed point (`digits` places):
/// the least positive root of `A x² − 2B x + C` and
/// `(2/3·C·ξ − 1/3·B·ξ²)/C`. Inputs are small integers.
pub fn xi_beta_fixed(a: i64, b: i64, c: i64, digits: u32) -> (BigInt, BigInt) {
    let s = pow10(digits);
    let xi = if a == 0 {
        BigInt::from(c) * &s / (2 * b)
    } else {
        let disc = BigInt::from(b * b - a * c);
        let root = (disc * &s * &s).sqrt();
        (BigInt::from(b) * &s - root) / a
    };
    let c_big = BigInt::from(c);
    let xi2 = &xi * &xi / &s;
    let beta = (2 * &c_big * &xi - BigInt::from(b) * xi2) / (3 * c_big);
    (xi, beta)
}

/// A random configuration with degrees ≤ 4 and at least one component that
/// is not blown up, so the weighted boundary has a chance to be ample.
pub fn random_config<R: Rng>(rng: &mut R) -> SurfaceConfig {
    let r = rng.gen_range(2..=4);
    let mut components = Vec::with_capacity(r);
    let mut has_free = false;
    let mut has_hyperplane = false;
    for i in 0..r {
        let force_free = i == r - 1 && !has_free;
        let roll = rng.gen_range(0..3);
        let c = if force_free || roll == 0 {
            has_free = true;
            if !has_hyperplane && rng.gen_bool(0.3) {
                has_hyperplane = true;
                Component::hyperplane()
            } else {
                Component::unpaired(rng.gen_range(1..=4))
            }
        } else {
            let d = rng.gen_range(1..=4);
            Component {
                degree: d,
                role: ComponentRole::Paired,
                pairing_degree: Some(rng.gen_range(1..=d)),
            }
        };
        components.push(c);
    }
    SurfaceConfig::new(components, vec![], vec![]).expect("valid random configuration")
}

pub fn random_weights<R: Rng>(rng: &mut R, r: usize, max: i64) -> Vec<i64> {
    (0..r).map(|_| rng.gen_range(1..=max)).collect()
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn one() -> BigRational {
    BigRational::one()
}
