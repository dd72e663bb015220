//! Integer weight search.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cz::report;
use crate::picard::{ComponentRole, SurfaceConfig};
use crate::positivity::{ample_sufficient, WeightedBoundary};
use crate::quad::{compare_cross, QuadExt};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("the ansatz needs three paired components and the hyperplane, found {0}")]
    NotAnsatzShape(String),
    #[error("bound must be at least 1")]
    ZeroBound,
}

/// `c = 4·d_1·d_2·d_3`, `p_i = c/d_i` on the paired curves and `3c/4` on `H`.
pub fn ansatz_weights(cfg: &SurfaceConfig) -> Result<WeightedBoundary, SearchError> {
    let roles: Vec<_> = cfg.components().iter().map(|c| c.role).collect();
    let paired = roles.iter().filter(|r| **r == ComponentRole::Paired).count();
    let hyper = roles.iter().filter(|r| **r == ComponentRole::Hyperplane).count();
    if paired != 3 || hyper != 1 || roles.len() != 4 {
        return Err(SearchError::NotAnsatzShape(format!("{roles:?}")));
    }
    let c: i64 = 4 * (0..4)
        .filter(|&i| roles[i] == ComponentRole::Paired)
        .map(|i| cfg.degree(i))
        .product::<i64>();
    let w: Vec<i64> = (0..4)
        .map(|i| match roles[i] {
            ComponentRole::Hyperplane => 3 * c / 4,
            _ => c / cfg.degree(i),
        })
        .collect();
    Ok(WeightedBoundary::from_integers(cfg, &w).expect("length matches"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    MinSum,
    MaxEpsilon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchHit {
    pub weights: Vec<i64>,
    pub epsilon: QuadExt,
}

impl SearchHit {
    pub fn boundary(&self, cfg: &SurfaceConfig) -> WeightedBoundary {
        WeightedBoundary::from_integers(cfg, &self.weights).expect("length matches")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub bound: u32,
    pub objective: Objective,
    pub limit: Option<usize>,
    pub allow_single_component: bool,
    /// Disable the ampleness pre-filter (for cross-checking).
    pub prune: bool,
}

impl SearchOptions {
    pub fn new(bound: u32, objective: Objective) -> Self {
        SearchOptions {
            bound,
            objective,
            limit: None,
            allow_single_component: false,
            prune: true,
        }
    }
}

/// Full checklist on one vector; returns `ε` when every hypothesis passes.
pub fn evaluate(cfg: &SurfaceConfig, w: &[i64], allow_single_component: bool) -> Option<QuadExt> {
    let r = cfg.component_count();
    if r == 0 || (r == 1 && !allow_single_component) || cfg.triple_point().is_some() {
        return None;
    }
    if w.iter().any(|&p| p <= 0) {
        return None;
    }
    let wb = WeightedBoundary::from_integers(cfg, w).ok()?;
    if !ample_sufficient(cfg, &wb).is_certified() {
        return None;
    }
    report(cfg, &wb).ok()?.epsilon.map(|e| e.value)
}

/// An upper bound of `D_p·D̃_i` over all completions of a prefix is
/// non-positive for some assigned `i`. Off-diagonal intersections are
/// nonnegative, so the bound takes free coordinates at `bound` where they
/// help and at 1 where they hurt.
fn prunable(gram: &[Vec<i64>], prefix: &[i64], bound: i64) -> bool {
    let k = prefix.len();
    (0..k).any(|i| {
        let fixed: i64 = (0..k).map(|j| gram[i][j] * prefix[j]).sum();
        let free: i64 = (k..gram.len())
            .map(|j| gram[i][j] * if gram[i][j] >= 0 { bound } else { 1 })
            .sum();
        fixed + free <= 0
    })
}

fn walk(
    cfg: &SurfaceConfig,
    gram: &[Vec<i64>],
    opts: &SearchOptions,
    prefix: &mut Vec<i64>,
    out: &mut Vec<SearchHit>,
) {
    if opts.prune && prunable(gram, prefix, opts.bound as i64) {
        return;
    }
    if prefix.len() == gram.len() {
        if let Some(epsilon) = evaluate(cfg, prefix, opts.allow_single_component) {
            out.push(SearchHit {
                weights: prefix.clone(),
                epsilon,
            });
        }
        return;
    }
    for p in 1..=opts.bound as i64 {
        prefix.push(p);
        walk(cfg, gram, opts, prefix, out);
        prefix.pop();
    }
}

fn order(objective: Objective, a: &SearchHit, b: &SearchHit) -> Ordering {
    let primary = match objective {
        Objective::MinSum => a.weights.iter().sum::<i64>().cmp(&b.weights.iter().sum::<i64>()),
        Objective::MaxEpsilon => compare_cross(&b.epsilon, &a.epsilon),
    };
    primary.then_with(|| a.weights.cmp(&b.weights))
}

/// Every vector in `[1, bound]^r` passing the checklist, best first.
pub fn search(cfg: &SurfaceConfig, opts: &SearchOptions) -> Result<Vec<SearchHit>, SearchError> {
    if opts.bound == 0 {
        return Err(SearchError::ZeroBound);
    }
    let r = cfg.component_count();
    if r == 0 {
        return Ok(Vec::new());
    }
    let gram = cfg.boundary_gram();
    let mut hits: Vec<SearchHit> = (1..=opts.bound as i64)
        .into_par_iter()
        .flat_map_iter(|p0| {
            let mut out = Vec::new();
            walk(cfg, &gram, opts, &mut vec![p0], &mut out);
            out
        })
        .collect();
    hits.sort_by(|a, b| order(opts.objective, a, b));
    if let Some(k) = opts.limit {
        hits.truncate(k);
    }
    Ok(hits)
}
