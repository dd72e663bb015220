//! The finite-level constant chain `(N, b, M, C, Q, m₀)`.
//!
//! Dimensions of spaces of sections are certified through Riemann–Roch with
//! explicit vanishing guards, relative to the certified-ample `A = D_p`:
//!
//! * `d·A < 0` forces `h⁰(d) = 0`;
//! * `(K − d)·A < 0` forces `h²(d) = h⁰(K − d) = 0`, so `h⁰(d) ≥ χ(d)`;
//! * `d − K` certified ample gives `h¹(d) = h²(d) = 0` (Kodaira), so
//!   `h⁰(d) = χ(d)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::certificate::{ConstantsSection, Tagged};
use crate::cz::CzReport;
use crate::picard::{ConfigError, DivisorClass, SurfaceConfig};
use crate::positivity::{ample_class, ample_sufficient, WeightedBoundary};
use crate::quad::{compare_cross, QuadExt};
use crate::rational::{fmt_rational, from_big, int};

/// Denominator cap for rational bounds of irrational constants.
pub const BOUND_DEN: i64 = 1_000_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H0Bound {
    pub lower: BigRational,
    /// `χ(d)` when both higher cohomology groups provably vanish, or `0`
    /// when `d` cannot be effective.
    pub exact: Option<BigRational>,
}

/// Certified bounds on `h⁰(d)` relative to the ample class `a`.
pub fn h0_certified(cfg: &SurfaceConfig, d: &DivisorClass, a: &DivisorClass) -> Result<H0Bound, ConfigError> {
    let da = cfg.intersect(d, a)?;
    if da < 0 {
        return Ok(H0Bound {
            lower: BigRational::zero(),
            exact: Some(BigRational::zero()),
        });
    }
    let chi = cfg.chi(d)?;
    let k = cfg.canonical_class();
    if cfg.intersect(&k.sub(d), a)? >= 0 {
        return Ok(H0Bound {
            lower: BigRational::zero(),
            exact: None,
        });
    }
    let exact = ample_class(cfg, &d.sub(&k)).is_certified().then(|| chi.clone());
    Ok(H0Bound {
        lower: if chi.is_negative() { BigRational::zero() } else { chi },
        exact,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("weights must be positive integers")]
    NonIntegerWeights,
    #[error("D_p is not certified ample")]
    NotAmple,
    #[error("D_p·D{0} must be positive")]
    NonPositivePairing(usize),
    #[error("target epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("volume bounds must be positive, got {0} for component {1}")]
    NonPositiveBeta(String, usize),
    #[error("no feasible N up to the cap {0}")]
    CapExceeded(u64),
    #[error("intermediate value exceeds the 128-bit fast path")]
    Overflow,
}

/// Intersection data for the fast evaluation of `χ(N·A − m·D)`.
#[derive(Debug, Clone, Copy)]
struct TwistData {
    a2: i128,
    ad: i128,
    d2: i128,
    ak: i128,
    dk: i128,
}

impl TwistData {
    fn new(cfg: &SurfaceConfig, a: &DivisorClass, d: &DivisorClass) -> Self {
        let k = cfg.canonical_class();
        TwistData {
            a2: a.dot(a) as i128,
            ad: a.dot(d) as i128,
            d2: d.dot(d) as i128,
            ak: a.dot(&k) as i128,
            dk: d.dot(&k) as i128,
        }
    }

    /// Lower bound for `h⁰(N·A − m·D)`, mirroring [`h0_certified`].
    fn term(&self, n: i128, m: i128) -> Option<i128> {
        if n.checked_mul(self.a2)? - m * self.ad < 0 {
            return Some(0);
        }
        // (K − d)·A = A·K − N·A² + m·A·D
        if self.ak - n * self.a2 + m * self.ad >= 0 {
            return Some(0);
        }
        let sq = n.checked_mul(n)?.checked_mul(self.a2)? - 2 * n * m * self.ad + m * m * self.d2;
        let dk = n * self.ak - m * self.dk;
        let twice = 2 + sq - dk;
        debug_assert!(twice % 2 == 0);
        Some((twice / 2).max(0))
    }

    /// `Σ_{m ≥ 1}` of the lower bounds; terms vanish once `(N·A − m·D)·A < 0`.
    fn sum(&self, n: i128) -> Option<i128> {
        assert!(self.ad > 0, "pairing must be positive");
        let mut total: i128 = 0;
        let mut m = 1;
        while n * self.a2 - m * self.ad >= 0 {
            total = total.checked_add(self.term(n, m)?)?;
            m += 1;
        }
        Some(total)
    }
}

/// `Σ_{m ≥ 1}` of certified lower bounds for `h⁰(N·D_p − m·D̃_i)`.
pub fn sum_h0_lower(cfg: &SurfaceConfig, wb: &WeightedBoundary, i: usize, n: u64) -> Result<BigInt, ChainError> {
    let a = wb.class(cfg).ok_or(ChainError::NonIntegerWeights)?;
    let d = cfg.strict_transform(i).expect("index in range");
    let t = TwistData::new(cfg, &a, &d);
    if t.ad <= 0 {
        return Err(ChainError::NonPositivePairing(i));
    }
    t.sum(n as i128).map(BigInt::from).ok_or(ChainError::Overflow)
}

/// Same sum evaluated term by term through [`h0_certified`].
pub fn sum_h0_lower_slow(cfg: &SurfaceConfig, wb: &WeightedBoundary, i: usize, n: u64) -> Result<BigRational, ChainError> {
    let a = wb.class(cfg).ok_or(ChainError::NonIntegerWeights)?;
    let d = cfg.strict_transform(i).expect("index in range");
    if a.dot(&d) <= 0 {
        return Err(ChainError::NonPositivePairing(i));
    }
    let na = a.scale(n as i64);
    let mut total = BigRational::zero();
    for m in 1.. {
        let twist = na.sub(&d.scale(m));
        if twist.dot(&a) < 0 {
            break;
        }
        total += h0_certified(cfg, &twist, &a).expect("same configuration").lower;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantsChain {
    pub eps_target: BigRational,
    /// `eps_target/4`: the chain is applied at `ε/2`, and the finite-level
    /// argument loses a factor 2 on its own ε.
    pub rv_epsilon: BigRational,
    pub betas: Vec<QuadExt>,
    pub n: u64,
    pub b: BigInt,
    pub m: BigInt,
    pub sum_h0_lower: Vec<BigInt>,
    pub c: BigRational,
    pub q_exact: QuadExt,
    pub q: BigRational,
    pub truncation_level: BigInt,
    pub min_beta: QuadExt,
    pub sum_beta_upper: BigRational,
    pub m0: BigInt,
    pub wronskian_leading: BigInt,
}

/// `(1 + 2/b)·β·N·M / S`.
fn feasibility_lhs(beta: &QuadExt, n: u64, m: &BigInt, b: &BigInt, s: &BigInt) -> QuadExt {
    let factor = (int(1) + BigRational::new(BigInt::from(2), b.clone())) * int(n as i64) * from_big(m.clone())
        / from_big(s.clone());
    beta.scale(&factor)
}

/// Least `b ≥ 1` with `(1 + 2/b)·β·N·M < (1 + ε)·S`, if any.
fn minimal_b(beta: &QuadExt, nm: &BigRational, s: &BigRational, eps: &BigRational) -> Option<BigInt> {
    let bnm = beta.scale(nm);
    let gap = bnm.neg().add_rational(&((int(1) + eps) * s));
    if !gap.is_positive() {
        return None;
    }
    let ratio = bnm.scale(&int(2)).try_div(&gap).expect("same field");
    Some(ratio.floor() + 1)
}

fn rational_upper(x: &QuadExt) -> BigRational {
    x.rational_bounds(&BigInt::from(BOUND_DEN)).1
}

impl ConstantsChain {
    pub fn feasibility_lhs(&self) -> Vec<QuadExt> {
        self.betas
            .iter()
            .zip(&self.sum_h0_lower)
            .map(|(beta, s)| feasibility_lhs(beta, self.n, &self.m, &self.b, s))
            .collect()
    }

    /// Re-evaluates every defining relation from scratch.
    pub fn reverify(&self, cfg: &SurfaceConfig, wb: &WeightedBoundary) -> Result<(), String> {
        let a = wb.class(cfg).ok_or("weights are not integers")?;
        let na = a.scale(self.n as i64);
        let h0 = h0_certified(cfg, &na, &a).map_err(|e| e.to_string())?;
        if h0.exact != Some(from_big(self.m.clone())) {
            return Err(format!("M = {} is not the certified h⁰(N·D_p)", self.m));
        }
        for (i, s) in self.sum_h0_lower.iter().enumerate() {
            let slow = sum_h0_lower_slow(cfg, wb, i, self.n).map_err(|e| e.to_string())?;
            if slow != from_big(s.clone()) {
                return Err(format!("stale volume sum for component {i}"));
            }
        }
        let bound = int(1) + &self.rv_epsilon;
        for (i, lhs) in self.feasibility_lhs().iter().enumerate() {
            if lhs.cmp_rational(&bound) != std::cmp::Ordering::Less {
                return Err(format!("feasibility fails for component {i}"));
            }
        }
        let nm = from_big(self.m.clone()) * int(self.n as i64);
        if self.c != &bound / &nm {
            return Err("C ≠ (1 + ε)/(M·N)".into());
        }
        let min = self.betas.iter().min_by(|x, y| compare_cross(x, y)).ok_or("no components")?;
        if *min != self.min_beta {
            return Err("stale minimum β".into());
        }
        let mm = from_big(&self.m * (&self.m - 1));
        let q_exact = min
            .inverse()
            .map_err(|e| e.to_string())?
            .scale(&(&self.c * &mm / int(2)));
        if q_exact != self.q_exact || q_exact.cmp_rational(&self.q) == std::cmp::Ordering::Greater {
            return Err("Q is not an upper bound of C·M(M−1)/(2·min β)".into());
        }
        if self.truncation_level != self.q.ceil().to_integer() {
            return Err("truncation level ≠ ⌈Q⌉".into());
        }
        for beta in &self.betas {
            if beta.cmp_rational(&rational_upper(beta)) == std::cmp::Ordering::Greater {
                return Err("β upper bound below β".into());
            }
        }
        if !m0_holds(&self.q, &self.sum_beta_upper, &self.eps_target, &self.m0) {
            return Err("m₀ fails the strict inequality".into());
        }
        if self.m0 > BigInt::one() && m0_holds(&self.q, &self.sum_beta_upper, &self.eps_target, &(&self.m0 - 1)) {
            return Err("m₀ is not minimal".into());
        }
        if self.wronskian_leading != &self.m * (&self.m - 1) / 2 {
            return Err("stale Wronskian constant".into());
        }
        Ok(())
    }

    pub fn to_section(&self) -> ConstantsSection {
        ConstantsSection {
            eps_target: Tagged::rational(&self.eps_target),
            rv_epsilon: Tagged::rational(&self.rv_epsilon),
            n: Tagged::integer(self.n),
            b: Tagged::integer(self.b.clone()),
            m: Tagged::integer(self.m.clone()),
            sum_h0_lower: self.sum_h0_lower.iter().map(|s| Tagged::lower(s)).collect(),
            feasibility_lhs: self.feasibility_lhs().iter().map(Tagged::upper).collect(),
            c: Tagged::rational(&self.c),
            q: Tagged::upper_rational(&self.q),
            q_exact: Tagged::quad(&self.q_exact),
            truncation_level: Tagged::integer(self.truncation_level.clone()),
            min_beta: Tagged::lower(&self.min_beta),
            sum_beta_upper: Tagged::upper_rational(&self.sum_beta_upper),
            m0: Tagged::integer(self.m0.clone()),
            wronskian_leading: Tagged::integer(self.wronskian_leading.clone()),
            additive_constant: "unspecified: the bounded Weil-function terms are not pinned down".into(),
        }
    }
}

/// `(Q/m₀)·Σβ < ε/2`.
pub fn m0_holds(q: &BigRational, sum_beta: &BigRational, eps: &BigRational, m0: &BigInt) -> bool {
    m0.is_positive() && q / from_big(m0.clone()) * sum_beta < eps / int(2)
}

impl fmt::Display for ConstantsChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<(&str, String)> = vec![
            ("eps target", fmt_rational(&self.eps_target)),
            ("eps used for (N, b)", fmt_rational(&self.rv_epsilon)),
            ("N", self.n.to_string()),
            ("b", self.b.to_string()),
            ("M = h0(N D_p)", self.m.to_string()),
            (
                "sum h0 lower",
                self.sum_h0_lower
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(", "),
            ),
            ("C", fmt_rational(&self.c)),
            ("min beta", self.min_beta.to_string()),
            ("Q exact", self.q_exact.to_string()),
            ("Q upper", fmt_rational(&self.q)),
            ("truncation level", self.truncation_level.to_string()),
            ("sum beta upper", fmt_rational(&self.sum_beta_upper)),
            ("m0", self.m0.to_string()),
            ("M(M-1)/2", self.wronskian_leading.to_string()),
        ];
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        for (k, v) in rows {
            writeln!(f, "{k:<width$}  {v}")?;
        }
        Ok(())
    }
}

/// Smallest `N ≤ cap` (then smallest `b`) satisfying
/// `(1 + 2/b)·max_i β_i·N·M/S_i < 1 + ε'` with `ε' = eps_target/4`, followed
/// by `C`, `Q` and the least `m₀` with `(Q/m₀)·Σβ < eps_target/2`.
pub fn find_nb(
    cfg: &SurfaceConfig,
    wb: &WeightedBoundary,
    report: &CzReport,
    eps_target: &BigRational,
    cap: u64,
) -> Result<ConstantsChain, ChainError> {
    if !eps_target.is_positive() {
        return Err(ChainError::NonPositiveEpsilon);
    }
    let a = wb.class(cfg).ok_or(ChainError::NonIntegerWeights)?;
    if !wb.all_positive() {
        return Err(ChainError::NonIntegerWeights);
    }
    if !ample_sufficient(cfg, wb).is_certified() {
        return Err(ChainError::NotAmple);
    }
    let betas: Vec<QuadExt> = report.components.iter().map(|c| c.beta.clone()).collect();
    for (i, b) in betas.iter().enumerate() {
        if !b.is_positive() {
            return Err(ChainError::NonPositiveBeta(b.to_string(), i));
        }
    }
    let twists: Vec<TwistData> = (0..cfg.component_count())
        .map(|i| TwistData::new(cfg, &a, &cfg.strict_transform(i).expect("in range")))
        .collect();
    if let Some(i) = twists.iter().position(|t| t.ad <= 0) {
        return Err(ChainError::NonPositivePairing(i));
    }
    let rv_eps = eps_target / int(4);
    let one_eps = int(1) + &rv_eps;

    // Everything needed at a candidate N, or None when N does not work.
    let evaluate = |n: u64| -> Result<Option<(BigInt, Vec<BigInt>, BigInt)>, ChainError> {
        let h0 = h0_certified(cfg, &a.scale(n as i64), &a).expect("same configuration");
        let Some(m) = h0.exact else {
            return Ok(None);
        };
        let nm = &m * int(n as i64);
        let mut sums = Vec::with_capacity(twists.len());
        let mut b = BigInt::one();
        for (t, beta) in twists.iter().zip(&betas) {
            let s = t.sum(n as i128).ok_or(ChainError::Overflow)?;
            let sr = BigRational::from_integer(BigInt::from(s));
            match minimal_b(beta, &nm, &sr, &rv_eps) {
                Some(bi) => b = b.max(bi),
                None => return Ok(None),
            }
            sums.push(BigInt::from(s));
        }
        Ok(Some((m.to_integer(), sums, b)))
    };

    let found = (1..=cap)
        .into_par_iter()
        .map(|n| evaluate(n).map(|r| r.map(|x| (n, x))))
        .find_first(|r| !matches!(r, Ok(None)));
    let (n, (m, sums, b)) = match found {
        Some(Ok(Some(x))) => x,
        Some(Err(e)) => return Err(e),
        _ => return Err(ChainError::CapExceeded(cap)),
    };

    let mr = from_big(m.clone());
    let c = &one_eps / (&mr * int(n as i64));
    let min_beta = betas
        .iter()
        .min_by(|x, y| compare_cross(x, y))
        .expect("at least one component")
        .clone();
    let q_exact = min_beta
        .inverse()
        .expect("positive")
        .scale(&(&c * &mr * (&mr - int(1)) / int(2)));
    let q = rational_upper(&q_exact);
    let truncation_level = q.ceil().to_integer();
    let sum_beta_upper = betas.iter().fold(BigRational::zero(), |acc, b| acc + rational_upper(b));
    // Least m₀ > 2·Q·Σβ/ε.
    let m0 = (int(2) * &q * &sum_beta_upper / eps_target).floor().to_integer() + 1;
    let wronskian_leading = &m * (&m - 1) / 2;
    Ok(ConstantsChain {
        eps_target: eps_target.clone(),
        rv_epsilon: rv_eps,
        betas,
        n,
        b,
        m,
        sum_h0_lower: sums,
        c,
        q_exact,
        q,
        truncation_level,
        min_beta,
        sum_beta_upper,
        m0,
        wronskian_leading,
    })
}

/// `C(aN+2, 3) / (N·C(aN+2, 2))`: the volume ratio of `O(a)` along a line
/// in the plane at level `N`, by counting monomials.
pub fn plane_beta_ratio(a: u64, n: u64) -> BigRational {
    let k = BigInt::from(a * n);
    // Σ_{m=1}^{aN} h⁰(O(aN − m)) = Σ_{j=0}^{aN−1} C(j+2, 2) = C(aN+2, 3)
    let num = (&k + 2) * (&k + 1) * &k / 6;
    let den = BigInt::from(n) * (&k + 2) * (&k + 1) / 2;
    BigRational::new(num, den)
}
