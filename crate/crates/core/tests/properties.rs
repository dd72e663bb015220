//! Structural invariants as property tests. Oracles come from `common`.

mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use orbicert::certificate::{Certificate, Exactness, Tagged};
use orbicert::cz::{certify, report, xi, CertifyOptions};
use orbicert::ff::{counting_functions, random_map, Form, RatMap, SampleParams};
use orbicert::orbifold::{curve_orbifold_degree, Multiplicity, OrbifoldDivisor, ProfilePoint, PullbackProfile};
use orbicert::picard::{quadratic_form, Component, DivisorClass, PointId, SurfaceConfig};
use orbicert::poly::ZPoly;
use orbicert::positivity::{ample_sufficient, WeightedBoundary};
use orbicert::quad::{compare_cross, QuadExt};
use orbicert::rv::h0_certified;
use orbicert::search::{evaluate, search, Objective, SearchOptions};

fn class_strategy() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..=50, 4)
}

fn to_class(v: &[i64]) -> DivisorClass {
    DivisorClass::new(v[0], (1..v.len()).map(|k| (PointId(format!("Q{k}")), v[k])))
}

fn rat() -> impl Strategy<Value = BigRational> {
    (-60i64..=60, 1i64..=12).prop_map(|(n, d)| q(n, d))
}

fn quad_in(radicand: i64) -> impl Strategy<Value = QuadExt> {
    (rat(), rat()).prop_map(move |(a, b)| QuadExt::new(a, b, q(radicand, 1)).unwrap())
}

fn random_ample(seed: u64) -> Option<(SurfaceConfig, Vec<i64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..50 {
        let cfg = random_config(&mut rng);
        let w = random_weights(&mut rng, cfg.component_count(), 30);
        let wb = WeightedBoundary::from_integers(&cfg, &w).unwrap();
        if ample_sufficient(&cfg, &wb).is_certified() {
            return Some((cfg, w));
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn intersection_is_symmetric_bilinear(a in class_strategy(), b in class_strategy(), c in class_strategy(), k in -5i64..=5) {
        let (ca, cb, cc) = (to_class(&a), to_class(&b), to_class(&c));
        prop_assert_eq!(ca.dot(&cb), cb.dot(&ca));
        prop_assert_eq!(ca.dot(&cb), lattice_dot(&a, &b));
        prop_assert_eq!(ca.add(&cb.scale(k)).dot(&cc), ca.dot(&cc) + k * cb.dot(&cc));
    }

    #[test]
    fn quadratic_field_axioms(x in quad_in(3), y in quad_in(3), z in quad_in(3)) {
        let xy = x.try_mul(&y).unwrap();
        prop_assert_eq!(&xy, &y.try_mul(&x).unwrap());
        prop_assert_eq!(
            x.try_add(&y).unwrap().try_mul(&z).unwrap(),
            x.try_mul(&z).unwrap().try_add(&y.try_mul(&z).unwrap()).unwrap()
        );
        prop_assert_eq!(x.try_mul(&y.try_mul(&z).unwrap()).unwrap(), xy.try_mul(&z).unwrap());
        if !x.is_zero() {
            prop_assert_eq!(x.try_mul(&x.inverse().unwrap()).unwrap(), QuadExt::from_int(1));
            prop_assert_eq!(x.norm(), x.try_mul(&x.conjugate()).unwrap().as_rational().unwrap().clone());
        }
        prop_assert_eq!(x.try_sub(&x).unwrap(), QuadExt::zero());
    }

    #[test]
    fn quadratic_signs_match_decimal_enclosures(x in quad_in(3), y in quad_in(7)) {
        let dx = Decimal::of_quad(&x, 100);
        let dy = Decimal::of_quad(&y, 100);
        match dx.compare(&dy) {
            Some(o) => prop_assert_eq!(compare_cross(&x, &y), o),
            None => prop_assert!(x == y || (x.is_rational() && y.is_rational())),
        }
        let zero = Decimal::rational(&BigRational::zero(), 100);
        if let Some(o) = dx.compare(&zero) {
            prop_assert_eq!(x.sign(), o as i32);
        }
        prop_assert_eq!(x.neg().sign(), -x.sign());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn riemann_roch_is_symmetric_under_duality(h in -20i64..=20, e in prop::collection::vec(-10i64..=10, 3)) {
        let cfg = SurfaceConfig::paired_with_hyperplane(&[1, 1, 1]).unwrap();
        let ids: Vec<PointId> = cfg.points().iter().map(|p| p.id.clone()).collect();
        let d = DivisorClass::new(h, ids.iter().cloned().zip(e.iter().copied()));
        let k = cfg.canonical_class();
        prop_assert_eq!(cfg.chi(&d).unwrap(), cfg.chi(&k.sub(&d)).unwrap());
        let mut v = vec![h];
        v.extend(&e);
        prop_assert_eq!(cfg.chi(&d).unwrap(), lattice_chi(&v));
        prop_assert_eq!(cfg.intersect(&k, &DivisorClass::exceptional(&ids[0])).unwrap(), -1);
    }

    #[test]
    fn plane_sections_count_monomials(d in -30i64..=30) {
        let cfg = SurfaceConfig::new(vec![Component::unpaired(1)], vec![], vec![]).unwrap();
        let b = h0_certified(&cfg, &DivisorClass::hyperplane(d), &DivisorClass::hyperplane(1)).unwrap();
        prop_assert_eq!(b.exact, Some(BigRational::from_integer(monomials(d).into())));
    }

    // Support fixed (all m ≥ 2): moving a component into the support raises t
    // at shared points and can lower the induced multiplicity there.
    #[test]
    fn orbifold_degree_is_monotone_in_multiplicities(
        ms in prop::collection::vec(2u32..=12, 1..=4),
        bump in 0usize..4,
        ts in prop::collection::vec(prop::collection::vec(0u32..=4, 4), 1..=5),
    ) {
        let r = ms.len();
        let points: Vec<ProfilePoint> = ts
            .iter()
            .enumerate()
            .filter_map(|(i, t)| {
                let t: std::collections::BTreeMap<usize, u32> =
                    (0..r).filter(|&j| t[j] > 0).map(|j| (j, t[j])).collect();
                (!t.is_empty()).then(|| ProfilePoint { id: format!("P{i}"), t })
            })
            .collect();
        prop_assume!(!points.is_empty());
        let profile = PullbackProfile::new(points).unwrap();
        let lo: Vec<Multiplicity> = ms.iter().map(|&m| Multiplicity::Finite(m)).collect();
        let mut hi = lo.clone();
        let j = bump % r;
        hi[j] = Multiplicity::Finite(ms[j] + 1);
        let mut inf = lo.clone();
        inf[j] = Multiplicity::Infinite;
        let d = |m: &[Multiplicity]| curve_orbifold_degree(&profile, &OrbifoldDivisor::from_list(m).unwrap());
        prop_assert!(d(&lo) <= d(&hi));
        prop_assert!(d(&hi) <= d(&inf));
    }

    #[test]
    fn heights_ignore_scaling_and_common_factors(seed in any::<u64>(), c in 1i64..=9, root in -5i64..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_map(&mut rng, &SampleParams { max_degree: 6, coeff_bound: 20, max_dim: 3 });
        let factor = ZPoly::from_i64s(&[root, 1]).scale(&BigInt::from(c));
        let y = RatMap::new(x.coords().iter().map(|p| p.mul(&factor)).collect()).unwrap();
        prop_assert_eq!(&y, &x);
        prop_assert_eq!(x.height(), x.height_by_places());
    }

    #[test]
    fn first_main_theorem_and_truncation(seed in any::<u64>(), coeffs in prop::collection::vec(-3i64..=3, 4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_map(&mut rng, &SampleParams { max_degree: 6, coeff_bound: 20, max_dim: 3 });
        let n = x.dim() + 1;
        let c: Vec<BigRational> = coeffs[..n].iter().map(|&v| q(v, 1)).collect();
        prop_assume!(c.iter().any(|v| !v.is_zero()));
        let f = Form::linear(&c).unwrap();
        prop_assume!(!f.eval(&x).unwrap().is_zero());
        let s = [orbicert::ff::Place::linear(0), orbicert::ff::Place::Infinity];
        let cnt = counting_functions(&f, &x, &s).unwrap();
        prop_assert_eq!(cnt.proximity + cnt.counting, x.height());
        prop_assert!(cnt.truncated <= cnt.counting);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ampleness_is_monotone_and_scale_invariant(seed in any::<u64>(), bump in 0usize..4, k in 2i64..=5) {
        let Some((cfg, w)) = random_ample(seed) else { return Ok(()) };
        let j = bump % w.len();
        let mut up = w.clone();
        up[j] += 1;
        let scaled: Vec<i64> = w.iter().map(|v| v * k).collect();
        for v in [up, scaled] {
            let wb = WeightedBoundary::from_integers(&cfg, &v).unwrap();
            prop_assert!(ample_sufficient(&cfg, &wb).is_certified(), "{:?} -> {:?}", w, v);
        }
    }

    #[test]
    fn truncation_points_scale_linearly(seed in any::<u64>(), k in 2i64..=4) {
        let Some((cfg, w)) = random_ample(seed) else { return Ok(()) };
        let wb = WeightedBoundary::from_integers(&cfg, &w).unwrap();
        let scaled: Vec<i64> = w.iter().map(|v| v * k).collect();
        let wk = WeightedBoundary::from_integers(&cfg, &scaled).unwrap();
        let (a, b) = (report(&cfg, &wb).unwrap(), report(&cfg, &wk).unwrap());
        let lambda = q(k, 1);
        let gram = cfg.boundary_gram();
        let wr: Vec<BigRational> = w.iter().map(|&v| q(v, 1)).collect();
        let c = quadratic_form(&gram, &wr);
        for (x, y) in a.components.iter().zip(&b.components) {
            prop_assert_eq!(x.xi.scale(&lambda), y.xi.clone());
            prop_assert_eq!(x.beta.scale(&lambda), y.beta.clone());
            prop_assert_eq!(x.cz_inequality_holds, y.cz_inequality_holds);
            // Hodge index: (D_p·D̃)² ≥ D̃²·D_p² for ample D_p.
            let i = x.index;
            let bi: i64 = (0..w.len()).map(|j| gram[i][j] * w[j]).sum();
            prop_assert!(q(bi * bi, 1) >= q(gram[i][i], 1) * &c);
            prop_assert_eq!(xi(&cfg, &wb, i).unwrap(), x.xi.clone());
        }
    }

    #[test]
    fn certificates_round_trip(seed in any::<u64>()) {
        let Some((cfg, w)) = random_ample(seed) else { return Ok(()) };
        let wb = WeightedBoundary::from_integers(&cfg, &w).unwrap();
        let cert = certify(&cfg, &wb, &CertifyOptions::default());
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        prop_assert_eq!(&back, &cert);
        for c in &cert.components {
            let irrational = c.xi.value.contains("sqrt");
            let expected = if irrational { Exactness::ExactQuadratic } else { Exactness::ExactRational };
            prop_assert_eq!(c.xi.exactness, expected);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn search_hits_recertify_and_pruning_is_sound(seed in any::<u64>(), bound in 3u32..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(&mut rng);
        let mut opts = SearchOptions::new(bound, Objective::MinSum);
        let pruned = search(&cfg, &opts).unwrap();
        opts.prune = false;
        let full = search(&cfg, &opts).unwrap();
        prop_assert_eq!(&pruned, &full);
        for hit in pruned.iter().take(5) {
            let cert = certify(&cfg, &hit.boundary(&cfg), &CertifyOptions::default());
            prop_assert_eq!(cert.outcome.status, orbicert::certificate::Status::Pass);
            prop_assert_eq!(evaluate(&cfg, &hit.weights, false), Some(hit.epsilon.clone()));
        }
    }
}

#[test]
fn tags_follow_the_number_field() {
    assert_eq!(Tagged::quad(&QuadExt::rational(q(1, 176))).exactness, Exactness::ExactRational);
    let s = QuadExt::sqrt(&q(3, 1)).unwrap();
    assert_eq!(Tagged::quad(&s).exactness, Exactness::ExactQuadratic);
    assert_eq!(Tagged::lower_rational(&one()).exactness, Exactness::LowerBound);
}
