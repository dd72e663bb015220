//! Truncation points `ξ_i`, volume lower bounds `β_i`, the margin `ε` and
//! the certificate assembling all hypotheses.
//!
//! With `A = D̃_i²`, `B = D_p·D̃_i` and `C = D_p²`:
//!
//! * `ξ_i` is the least positive root of `A·x² − 2B·x + C`;
//! * the inequality to certify is `2C·ξ_i − B·ξ_i² − 3C·p_i > 0`;
//! * `β_i = (2/3·C·ξ_i − 1/3·B·ξ_i²)/C`, so the inequality is `β_i > p_i`;
//! * `ε = min_i (β_i − p_i)/p_i`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

use crate::certificate::{
    AmplenessRecord, Certificate, ComponentRecord, ConfigEcho, EpsilonRecord, Hypothesis, HypothesisRecord,
    IntersectionTable, OrbifoldSection, Outcome, Status, Tagged, FORMAT, VERSION,
};
use crate::orbifold::{ample_twist_threshold, Multiplicity, OrbifoldDivisor};
use crate::picard::{pairing_row, quadratic_form, SurfaceConfig};
use crate::positivity::{ample_sufficient, orbifold_canonical_big, AmpleVerdict, RationalClass, WeightedBoundary};
use crate::quad::{compare_cross, min_root_quadratic, QuadError, QuadExt};
use crate::rational::{fmt_rational, int, rat};
use crate::rv::{find_nb, ChainError, ConstantsChain};

/// Denominator cap for the rational lower bound of an irrational `ε`.
pub const EPS_BOUND_DEN: i64 = 1_000_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CzError {
    #[error("component {index}: {source}")]
    Root { index: usize, source: QuadError },
    #[error("epsilon {0} is not positive")]
    NonPositiveEpsilon(String),
    #[error("no components")]
    Empty,
}

/// `(A, B, C) = (D̃_i², D_p·D̃_i, D_p²)`.
pub fn quadratic_coefficients(
    cfg: &SurfaceConfig,
    wb: &WeightedBoundary,
    i: usize,
) -> (BigRational, BigRational, BigRational) {
    let gram = cfg.boundary_gram();
    (
        int(gram[i][i]),
        pairing_row(&gram, wb.weights(), i),
        quadratic_form(&gram, wb.weights()),
    )
}

pub fn xi(cfg: &SurfaceConfig, wb: &WeightedBoundary, i: usize) -> Result<QuadExt, CzError> {
    let (a, b, c) = quadratic_coefficients(cfg, wb, i);
    min_root_quadratic(&a, &b, &c).map_err(|source| CzError::Root { index: i, source })
}

/// `2C·ξ − B·ξ² − 3C·p_i`.
pub fn cz_margin(cfg: &SurfaceConfig, wb: &WeightedBoundary, i: usize, xi: &QuadExt) -> QuadExt {
    let (_, b, c) = quadratic_coefficients(cfg, wb, i);
    let p = &wb.weights()[i];
    xi.scale(&(int(2) * &c))
        .try_sub(&xi.square().scale(&b))
        .expect("same field")
        .add_rational(&-(int(3) * &c * p))
}

pub fn cz_inequality(cfg: &SurfaceConfig, wb: &WeightedBoundary, i: usize, xi: &QuadExt) -> bool {
    cz_margin(cfg, wb, i, xi).is_positive()
}

/// `(2/3·C·ξ − 1/3·B·ξ²)/C`.
pub fn beta_lower(cfg: &SurfaceConfig, wb: &WeightedBoundary, i: usize, xi: &QuadExt) -> QuadExt {
    let (_, b, c) = quadratic_coefficients(cfg, wb, i);
    xi.scale(&rat(2, 3))
        .try_sub(&xi.square().scale(&(b / (int(3) * &c))))
        .expect("same field")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CzComponent {
    pub index: usize,
    pub weight: BigRational,
    pub xi: QuadExt,
    pub cz_margin: QuadExt,
    pub cz_inequality_holds: bool,
    pub beta: QuadExt,
    pub beta_exceeds_p: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Epsilon {
    pub value: QuadExt,
    /// Lowest index attaining the minimum.
    pub argmin: usize,
    /// Equal to `value` when it is rational, otherwise a strictly smaller
    /// continued-fraction convergent.
    pub lower_bound: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CzReport {
    pub components: Vec<CzComponent>,
    pub epsilon: Option<Epsilon>,
}

impl CzReport {
    pub fn passes(&self) -> bool {
        self.components.iter().all(|c| c.cz_inequality_holds)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.components.iter().position(|c| !c.cz_inequality_holds)
    }
}

/// `min_i (β_i − p_i)/p_i` over components with positive weight.
pub fn epsilon(components: &[CzComponent]) -> Result<Epsilon, CzError> {
    let mut best: Option<(QuadExt, usize)> = None;
    for c in components {
        let v = c.beta.add_rational(&-c.weight.clone()).scale(&c.weight.recip());
        if best.as_ref().is_none_or(|(b, _)| compare_cross(&v, b) == Ordering::Less) {
            best = Some((v, c.index));
        }
    }
    let (value, argmin) = best.ok_or(CzError::Empty)?;
    if !value.is_positive() {
        return Err(CzError::NonPositiveEpsilon(value.to_string()));
    }
    let lower_bound = value.rational_bounds(&BigInt::from(EPS_BOUND_DEN)).0;
    Ok(Epsilon {
        value,
        argmin,
        lower_bound,
    })
}

/// Evaluates every component; `ε` is filled in when all inequalities hold.
/// Weights must be positive.
pub fn report(cfg: &SurfaceConfig, wb: &WeightedBoundary) -> Result<CzReport, CzError> {
    let mut components = Vec::with_capacity(cfg.component_count());
    for i in 0..cfg.component_count() {
        let x = xi(cfg, wb, i)?;
        let margin = cz_margin(cfg, wb, i, &x);
        let holds = margin.is_positive();
        let beta = beta_lower(cfg, wb, i, &x);
        let weight = wb.weights()[i].clone();
        let beta_exceeds_p = beta.cmp_rational(&weight) == Ordering::Greater;
        assert_eq!(holds, beta_exceeds_p, "β_i − p_i = margin/(3·D_p²)");
        components.push(CzComponent {
            index: i,
            weight,
            xi: x,
            cz_margin: margin,
            cz_inequality_holds: holds,
            beta,
            beta_exceeds_p,
        });
    }
    let epsilon = if components.iter().all(|c| c.cz_inequality_holds) {
        Some(epsilon(&components)?)
    } else {
        None
    };
    Ok(CzReport { components, epsilon })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifyOptions {
    pub name: Option<String>,
    /// Accept a single boundary component instead of failing.
    pub allow_single_component: bool,
    /// Orbifold multiplicities, one per component.
    pub multiplicities: Option<Vec<Multiplicity>>,
    /// Twist parameter for the ample-twist threshold.
    pub alpha: BigRational,
    /// Largest `N` tried by the constant chain.
    pub rv_cap: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            name: None,
            allow_single_component: false,
            multiplicities: None,
            alpha: int(1),
            rv_cap: 500,
        }
    }
}

fn record(name: Hypothesis, status: Status, detail: impl Into<String>) -> HypothesisRecord {
    HypothesisRecord {
        name,
        status,
        detail: detail.into(),
    }
}

fn intersection_table(cfg: &SurfaceConfig, wb: &WeightedBoundary) -> IntersectionTable {
    let gram = cfg.boundary_gram();
    let k = cfg.canonical_class();
    let st = cfg.strict_transforms();
    let d_p = wb.class(cfg);
    IntersectionTable {
        d_p: d_p.as_ref().map(|d| d.to_string()),
        gram: gram
            .iter()
            .map(|row| row.iter().map(|&g| Tagged::integer(g)).collect())
            .collect(),
        d_p_squared: Tagged::rational(&quadratic_form(&gram, wb.weights())),
        d_p_dot_components: (0..cfg.component_count())
            .map(|i| Tagged::rational(&pairing_row(&gram, wb.weights(), i)))
            .collect(),
        canonical_squared: Tagged::integer(k.self_intersection()),
        canonical_dot_d_p: d_p.as_ref().map(|d| Tagged::integer(k.dot(d))),
        canonical_dot_components: st.iter().map(|d| Tagged::integer(k.dot(d))).collect(),
    }
}

fn component_record(c: &CzComponent) -> ComponentRecord {
    ComponentRecord {
        index: c.index,
        weight: Tagged::rational(&c.weight),
        xi: Tagged::quad(&c.xi),
        cz_margin: Tagged::quad(&c.cz_margin),
        cz_inequality_holds: c.cz_inequality_holds,
        beta: Tagged::lower(&c.beta),
        beta_exceeds_p: c.beta_exceeds_p,
    }
}

/// Runs the full checklist and assembles a certificate. Failures are
/// certified too; the first non-passing hypothesis decides the outcome.
pub fn certify(cfg: &SurfaceConfig, wb: &WeightedBoundary, opts: &CertifyOptions) -> Certificate {
    let mut hypotheses = Vec::new();
    let mut components = Vec::new();
    let mut eps_record = None;
    let mut orbifold = None;
    let mut constants = None;

    let r = cfg.component_count();
    hypotheses.push(match r {
        0 => record(Hypothesis::ComponentCount, Status::Fail, "no boundary components"),
        1 if !opts.allow_single_component => record(
            Hypothesis::ComponentCount,
            Status::Fail,
            "a single component; at least two are required",
        ),
        1 => record(Hypothesis::ComponentCount, Status::Pass, "single component allowed by configuration"),
        _ => record(Hypothesis::ComponentCount, Status::Pass, format!("r = {r}")),
    });

    hypotheses.push(match cfg.triple_point() {
        Some(set) => record(
            Hypothesis::NoThreeMeet,
            Status::Fail,
            format!("components {set:?} pass through a common point"),
        ),
        None => record(Hypothesis::NoThreeMeet, Status::Pass, "no concurrent triple declared"),
    });

    let integral = wb.is_integral() && wb.all_positive();
    hypotheses.push(if integral {
        record(Hypothesis::Weights, Status::Pass, "positive integers")
    } else {
        record(Hypothesis::Weights, Status::Fail, "weights must be positive integers")
    });

    let intersections = (r > 0).then(|| intersection_table(cfg, wb));

    let verdict = ample_sufficient(cfg, wb);
    let residue = RationalClass::weighted(cfg, wb.weights()).bezout_residue(cfg);
    let ampleness = Some(AmplenessRecord {
        verdict: verdict.to_string(),
        bezout_residue: Tagged::rational(&residue),
    });
    let ample = verdict.is_certified();
    hypotheses.push(match &verdict {
        AmpleVerdict::Certified => record(Hypothesis::Ampleness, Status::Pass, verdict.to_string()),
        AmpleVerdict::Inconclusive { .. } => record(Hypothesis::Ampleness, Status::Inconclusive, verdict.to_string()),
    });

    let mut cz_report = None;
    if ample && wb.all_positive() {
        match report(cfg, wb) {
            Ok(rep) => {
                components = rep.components.iter().map(component_record).collect();
                hypotheses.push(match rep.first_failure() {
                    None => record(Hypothesis::CzInequality, Status::Pass, "holds for every component"),
                    Some(i) => record(
                        Hypothesis::CzInequality,
                        Status::Fail,
                        format!("fails for component {i}: margin {}", rep.components[i].cz_margin),
                    ),
                });
                if let Some(e) = &rep.epsilon {
                    eps_record = Some(EpsilonRecord {
                        value: Tagged::quad(&e.value),
                        rational_lower_bound: if e.value.is_rational() {
                            Tagged::rational(&e.lower_bound)
                        } else {
                            Tagged::lower_rational(&e.lower_bound)
                        },
                        argmin: e.argmin,
                    });
                }
                cz_report = Some(rep);
            }
            Err(e) => hypotheses.push(record(Hypothesis::CzInequality, Status::Fail, e.to_string())),
        }
    } else {
        hypotheses.push(record(
            Hypothesis::CzInequality,
            Status::NotEvaluated,
            "requires certified ampleness and positive weights",
        ));
    }

    let core_pass = hypotheses.iter().all(|h| h.status == Status::Pass);
    let finite = opts
        .multiplicities
        .as_ref()
        .filter(|m| m.iter().any(|x| x.is_finite()));
    if let Some(mults) = finite {
        let degree = orbifold_canonical_big(cfg, mults);
        let mut section = OrbifoldSection {
            multiplicities: mults.clone(),
            canonical_degree: Tagged::rational(degree.degree()),
            canonical_big: degree.is_certified(),
            twist_alpha: Tagged::rational(&opts.alpha),
            twist_threshold: None,
            constants_threshold: None,
            required_multiplicity: None,
            multiplicities_sufficient: false,
        };
        if core_pass {
            let rep = cz_report.as_ref().expect("evaluated");
            let eps = rep.epsilon.as_ref().expect("passing report");
            let delta = OrbifoldDivisor::from_list(mults).expect("validated multiplicities");
            let twist = ample_twist_threshold(cfg, wb, &opts.alpha, &delta).ok();
            section.twist_threshold = twist.map(Tagged::integer);
            match find_nb(cfg, wb, rep, &eps.lower_bound, opts.rv_cap) {
                Ok(chain) => {
                    hypotheses.push(record(Hypothesis::Constants, Status::Pass, format!("N = {}", chain.n)));
                    let required = twist
                        .map(BigInt::from)
                        .unwrap_or_default()
                        .max(chain.m0.clone());
                    let sufficient = mults.iter().all(|m| match m {
                        Multiplicity::Infinite => true,
                        Multiplicity::Finite(k) => BigInt::from(*k) >= required,
                    });
                    hypotheses.push(if sufficient {
                        record(Hypothesis::MultiplicityThreshold, Status::Pass, format!("all m_i ≥ {required}"))
                    } else {
                        record(
                            Hypothesis::MultiplicityThreshold,
                            Status::Inconclusive,
                            format!("certified only for m_i ≥ {required}"),
                        )
                    });
                    section.constants_threshold = Some(Tagged::integer(chain.m0.clone()));
                    section.required_multiplicity = Some(Tagged::integer(required));
                    section.multiplicities_sufficient = sufficient;
                    constants = Some(chain.to_section());
                }
                Err(e) => {
                    let status = match e {
                        ChainError::CapExceeded(_) => Status::Inconclusive,
                        _ => Status::Fail,
                    };
                    hypotheses.push(record(Hypothesis::Constants, status, e.to_string()));
                    hypotheses.push(record(
                        Hypothesis::MultiplicityThreshold,
                        Status::NotEvaluated,
                        "requires the constant chain",
                    ));
                }
            }
        }
        orbifold = Some(section);
    }

    let outcome = if let Some(h) = hypotheses.iter().find(|h| h.status == Status::Fail) {
        Outcome {
            status: Status::Fail,
            first_failure: Some(h.name),
        }
    } else if let Some(h) = hypotheses.iter().find(|h| h.status != Status::Pass) {
        Outcome {
            status: Status::Inconclusive,
            first_failure: Some(h.name),
        }
    } else {
        Outcome {
            status: Status::Pass,
            first_failure: None,
        }
    };

    Certificate {
        format: FORMAT.into(),
        version: VERSION,
        config: ConfigEcho {
            name: opts.name.clone(),
            components: cfg.components().to_vec(),
            points: cfg.points().to_vec(),
            concurrent: cfg
                .concurrent_sets()
                .iter()
                .map(|s| s.iter().copied().collect())
                .collect(),
            padded: cfg.padded(),
            allow_single_component: opts.allow_single_component,
            weights: wb.weights().iter().map(Tagged::rational).collect(),
            multiplicities: opts.multiplicities.clone(),
        },
        intersections,
        ampleness,
        hypotheses,
        components,
        epsilon: eps_record,
        orbifold,
        constants,
        outcome,
    }
}

/// Convenience: the constant chain for a passing configuration.
pub fn constants_chain(
    cfg: &SurfaceConfig,
    wb: &WeightedBoundary,
    eps_target: Option<&BigRational>,
    cap: u64,
) -> Result<ConstantsChain, String> {
    let rep = report(cfg, wb).map_err(|e| e.to_string())?;
    let eps = rep
        .epsilon
        .as_ref()
        .ok_or("the inequality fails for some component")?;
    let target = eps_target.cloned().unwrap_or_else(|| eps.lower_bound.clone());
    if target > eps.lower_bound || !target.is_positive() {
        return Err(format!(
            "eps target must lie in (0, {}]",
            fmt_rational(&eps.lower_bound)
        ));
    }
    find_nb(cfg, wb, &rep, &target, cap).map_err(|e| e.to_string())
}
