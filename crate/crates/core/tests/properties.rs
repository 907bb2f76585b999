#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use concept_lattice::verify::{check_axioms, hasse, CheckConfig, FiniteSpace};
use concept_lattice::{
    canonicalize, concept_diff, concept_prob, disj_join, disj_meet, generalise, negate,
    probabilistic_meet, prop_leq, region_subset, subsumes, unify, wire, Closed, Concept,
    DimOutcome, DisjunctiveProperty, FeatureId, FeatureSchema, IntervalSet, MeetJoinResult,
    PMeetConfig, Posterior, Property, ValueDomain,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{Family, FAMILIES};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(FAMILIES.to_vec())
}

/// A non-canonical spelling of the same value: shuffled and duplicated
/// points, or interval members split into touching pieces.
fn respell(p: &Property) -> Property {
    match p {
        Property::PointSet(pts) => {
            let mut v: Vec<f64> = pts.iter().rev().copied().collect();
            v.push(pts[0]);
            Property::PointSet(v)
        }
        Property::IntervalSet(set) => {
            let mut pieces = Vec::new();
            for m in set.members().iter().rev() {
                let mid = 0.5 * (m.lo + m.hi);
                pieces.push(Closed::new(mid, m.hi).unwrap());
                pieces.push(Closed::new(m.lo, mid).unwrap());
            }
            Property::IntervalSet(IntervalSet::from_intervals(pieces))
        }
        other => other.clone(),
    }
}

proptest! {
    #[test]
    fn canonical_form_is_idempotent_and_decides_order_equality(seed in any::<u64>(), fam in family()) {
        let mut r = rng(seed);
        let space = common::space(fam);
        let c = common::random_concept(&mut r, &space);
        let d = common::random_concept(&mut r, &space);
        for ((_, p), q) in c.entries().zip(d.entries().map(|(_, q)| q)) {
            let cp = canonicalize(p);
            prop_assert_eq!(&canonicalize(&cp), &cp);
            let alias = canonicalize(&respell(p));
            prop_assert!(prop_leq(p, &alias).unwrap() && prop_leq(&alias, p).unwrap());
            prop_assert_eq!(&alias, &cp);
            if std::mem::discriminant(p) == std::mem::discriminant(q) {
                let equal = prop_leq(p, q).unwrap() && prop_leq(q, p).unwrap();
                prop_assert_eq!(equal, cp == canonicalize(q));
            }
        }
    }

    #[test]
    fn meet_is_a_lower_bound_and_join_an_upper_bound(seed in any::<u64>(), fam in family()) {
        let mut r = rng(seed);
        let space = common::space(fam);
        let c = common::random_concept(&mut r, &space);
        let d = if r.gen_bool(0.5) { common::refine(&mut r, &space, &c) } else { common::random_concept(&mut r, &space) };
        let m = generalise(&c, &d).unwrap();
        prop_assert!(subsumes(&m, &c).unwrap() && subsumes(&m, &d).unwrap());
        if let MeetJoinResult::Defined(j) = unify(&c, &d).unwrap() {
            prop_assert!(subsumes(&c, &j).unwrap() && subsumes(&d, &j).unwrap());
            prop_assert_eq!(generalise(&c, &j).unwrap(), c.clone());
        }
        // c ≤ d exactly when they meet at c
        prop_assert_eq!(subsumes(&c, &d).unwrap(), m == c);
    }

    #[test]
    fn clash_free_discrete_operations_are_set_operations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let space = common::space(Family::Discrete);
        let c = common::random_concept(&mut r, &space);
        let d = common::random_concept(&mut r, &space);
        let pairs = |x: &Concept| -> BTreeSet<(FeatureId, String)> {
            x.entries().map(|(id, p)| (id, wire::property_to_json(p).to_string())).collect()
        };
        let (pc, pd) = (pairs(&c), pairs(&d));
        let clash = c.entries().any(|(id, p)| d.get(id).is_some_and(|q| q != p));
        let meet = pairs(&generalise(&c, &d).unwrap());
        prop_assert_eq!(meet, pc.intersection(&pd).cloned().collect::<BTreeSet<_>>());
        if !clash {
            let join = unify(&c, &d).unwrap().defined().unwrap();
            prop_assert_eq!(pairs(&join), pc.union(&pd).cloned().collect::<BTreeSet<_>>());
            prop_assert_eq!(pairs(&concept_diff(&c, &d).unwrap()), pc.difference(&pd).cloned().collect::<BTreeSet<_>>());
        } else {
            prop_assert_eq!(unify(&c, &d).unwrap(), MeetJoinResult::Undefined);
        }
    }

    #[test]
    fn disjunctive_order_compatibility_and_absorption(
        a in prop::collection::vec((0u8..16, 0u8..8), 1..4),
        b in prop::collection::vec((0u8..16, 0u8..8), 1..4),
    ) {
        let build = |v: &[(u8, u8)]| {
            let pairs: Vec<(f64, f64)> = v.iter().map(|&(lo, w)| (lo as f64 * 0.25, (lo + w) as f64 * 0.25)).collect();
            DisjunctiveProperty::from_pairs(&pairs).unwrap()
        };
        let (p, q) = (build(&a), build(&b));
        let (pp, qp) = (p.clone().into_property(), q.clone().into_property());
        let p_le_q = prop_leq(&pp, &qp).unwrap();
        prop_assert_eq!(p_le_q, region_subset(&qp, &pp).unwrap());
        prop_assert_eq!(p_le_q, disj_meet(&p, &q) == p);
        prop_assert_eq!(p_le_q, disj_join(&p, &q) == Some(q.clone()));
        if let Some(j) = disj_join(&p, &q) {
            prop_assert_eq!(disj_meet(&p, &j), p.clone());
        }
        prop_assert_eq!(disj_join(&p, &disj_meet(&p, &q)), Some(p.clone()));
        // negation reverses inclusion
        if p_le_q {
            prop_assert!(region_subset(&negate(&pp).unwrap(), &negate(&qp).unwrap()).unwrap());
        }
    }

    #[test]
    fn emitted_concepts_reparse_to_order_equal_concepts(seed in any::<u64>(), fam in family()) {
        let mut r = rng(seed);
        let space = common::space(fam);
        let c = common::random_concept(&mut r, &space);
        let text = wire::concept_to_json(&c).to_string();
        let back = wire::parse_concept(&space.schema, &text).unwrap();
        prop_assert!(subsumes(&c, &back).unwrap() && subsumes(&back, &c).unwrap());
        prop_assert_eq!(wire::concept_to_json(&back).to_string(), text);
    }

    #[test]
    fn arbitrary_floats_survive_emit_parse_emit(
        lo in -1e3f64..1e3,
        width in prop_oneof![Just(2.0), 0.0f64..=2.0],
        pts in prop::collection::vec(0.0f64..=2.0, 1..4),
        shift in -50.0f64..50.0,
    ) {
        let schema = Arc::new(FeatureSchema::new([
            ("z", ValueDomain::Interval { epsilon: 1.0 }),
            ("p", ValueDomain::PointSet { epsilon: 1.0 }),
        ]).unwrap());
        let hi = lo + width;
        prop_assume!(hi - lo <= 2.0);
        let shifted: Vec<f64> = pts.iter().map(|x| x + shift).collect();
        let c = Concept::from_named(schema.clone(), [
            ("z", Property::interval(lo, hi).unwrap()),
            ("p", Property::point_set(&shifted)),
        ]);
        prop_assume!(c.is_ok());
        let text = wire::concept_to_json(&c.unwrap()).to_string();
        let back = wire::parse_concept(&schema, &text).unwrap();
        prop_assert_eq!(wire::concept_to_json(&back).to_string(), text);
    }
}

fn small_schema<R: Rng>(r: &mut R) -> FeatureSchema {
    let features = r.gen_range(1..=3);
    let domains: Vec<(String, ValueDomain)> = (0..features)
        .map(|i| {
            let domain = match r.gen_range(0..3) {
                0 => ValueDomain::Discrete {
                    symbols: (0..r.gen_range(1..=3)).map(|k| format!("v{k}")).collect(),
                },
                1 => ValueDomain::Disjunctive {
                    symbols: (0..r.gen_range(1..=3)).map(|k| format!("v{k}")).collect(),
                },
                _ => ValueDomain::Partition {
                    cutoffs: (0..r.gen_range(1..=3)).map(|k| k as f64).collect(),
                },
            };
            (format!("f{i}"), domain)
        })
        .collect();
    FeatureSchema::new(domains).unwrap()
}

fn partition_schema<R: Rng>(r: &mut R) -> FeatureSchema {
    let features = r.gen_range(1..=3);
    FeatureSchema::new((0..features).map(|i| {
        let cutoffs = (0..r.gen_range(1..=3)).map(|k| k as f64 * 0.5).collect();
        (format!("x{i}"), ValueDomain::Partition { cutoffs })
    }))
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hasse_edges_are_the_transitive_reduction(seed in any::<u64>()) {
        let space = FiniteSpace::enumerate(Arc::new(small_schema(&mut rng(seed)))).unwrap();
        let h = hasse(&space);
        let n = h.nodes.len();
        let idx: Vec<usize> = h.nodes.iter().map(|c| space.index_of(c).unwrap()).collect();
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in &h.edges {
            prop_assert!(h.nodes[a].len() <= h.nodes[b].len());
            reach[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(reach[i][j], space.leq(idx[i], idx[j]));
            }
        }
    }

    #[test]
    fn partition_spaces_have_total_maximal_elements(seed in any::<u64>()) {
        let space = FiniteSpace::enumerate(Arc::new(partition_schema(&mut rng(seed)))).unwrap();
        let report = check_axioms(&space, &CheckConfig::default());
        let total: BTreeSet<String> = space.concepts().iter().filter(|c| c.is_total()).map(wire::concept_key).collect();
        let maximal: BTreeSet<String> = report.maximal_elements.iter().map(wire::concept_key).collect();
        prop_assert_eq!(maximal, total);
        prop_assert!(report.is_cpo());
    }
}

// ---------------------------------------------------------------------------
// Probability

fn pdf(mean: f64, sd: f64, x: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

/// Double integral of the joint density over a rectangle, by nested
/// adaptive quadrature.
fn rect_mass(g: [(f64, f64); 2], x: (f64, f64), y: (f64, f64)) -> f64 {
    let clip =
        |(lo, hi): (f64, f64), (m, s): (f64, f64)| (lo.max(m - 12.0 * s), hi.min(m + 12.0 * s));
    let (x, y) = (clip(x, g[0]), clip(y, g[1]));
    if x.0 >= x.1 || y.0 >= y.1 {
        return 0.0;
    }
    common::simpson(
        |u| {
            common::simpson(
                |v| pdf(g[0].0, g[0].1, u) * pdf(g[1].0, g[1].1, v),
                y.0,
                y.1,
                1e-11,
            )
        },
        x.0,
        x.1,
        1e-10,
    )
}

fn pieces(p: Option<&Property>) -> Vec<(f64, f64)> {
    match p {
        None => vec![(f64::NEG_INFINITY, f64::INFINITY)],
        Some(Property::Interval(iv)) => vec![(iv.lo, iv.hi)],
        Some(Property::IntervalSet(set)) => set.members().iter().map(|m| (m.lo, m.hi)).collect(),
        Some(other) => panic!("unexpected {other:?}"),
    }
}

fn two_dim_schema() -> Arc<FeatureSchema> {
    Arc::new(
        FeatureSchema::new([
            ("u", ValueDomain::Interval { epsilon: 1.0 }),
            ("v", ValueDomain::Interval { epsilon: 1.0 }),
        ])
        .unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_factorisation_matches_planar_integration(
        seed in any::<u64>(),
        m in (-1.0f64..3.0, -1.0f64..3.0),
        s in (0.2f64..1.5, 0.2f64..1.5),
    ) {
        let schema = two_dim_schema();
        let mut r = rng(seed);
        let mut entries: BTreeMap<FeatureId, Property> = BTreeMap::new();
        for i in 0..2 {
            if !r.gen_bool(0.8) {
                continue;
            }
            let n = r.gen_range(1..=2);
            let members: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    let lo = r.gen_range(-1.0..3.0);
                    (lo, lo + r.gen_range(0.1..2.0))
                })
                .collect();
            let p = if n == 1 {
                Property::interval(members[0].0, members[0].1).unwrap()
            } else {
                Property::interval_set(&members).unwrap()
            };
            entries.insert(FeatureId(i), p);
        }
        let c = Concept::new(schema.clone(), entries).unwrap();
        let post = Posterior::new(schema, vec![m.0, m.1], vec![s.0, s.1]).unwrap();
        let p = concept_prob(&c, &post).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let g = [(m.0, s.0), (m.1, s.1)];
        let mut planar = 0.0;
        for x in pieces(c.get(FeatureId(0))) {
            for y in pieces(c.get(FeatureId(1))) {
                planar += rect_mass(g, x, y);
            }
        }
        prop_assert!((p - planar).abs() <= 1e-6, "product {} vs planar {}", p, planar);
    }

    #[test]
    fn probabilistic_meet_is_symmetric_and_threshold_monotone(
        m in (-1.0f64..1.0, -1.0f64..1.0),
        s in (0.05f64..0.6, 0.05f64..0.6),
        eps in 0.5f64..1.5,
    ) {
        let schema = Arc::new(FeatureSchema::new([("z", ValueDomain::Interval { epsilon: eps })]).unwrap());
        let p1 = Posterior::new(schema.clone(), vec![m.0], vec![s.0]).unwrap();
        let p2 = Posterior::new(schema.clone(), vec![m.1], vec![s.1]).unwrap();
        let mut config = PMeetConfig::from_schema(&schema).unwrap();
        config.resolution = Some(eps * 1e-2);
        config.threshold = 0.8;
        let low = probabilistic_meet(&p1, &p2, &config).unwrap();
        prop_assert_eq!(&low, &probabilistic_meet(&p2, &p1, &config).unwrap());
        config.threshold = 0.95;
        let high = probabilistic_meet(&p1, &p2, &config).unwrap();
        if let DimOutcome::Found { interval: hi_iv, .. } = &high.dims[0] {
            match &low.dims[0] {
                DimOutcome::Found { interval: lo_iv, .. } => {
                    prop_assert!(hi_iv.width() >= lo_iv.width() - eps * 1e-2);
                }
                DimOutcome::Dropped { .. } => prop_assert!(false, "found at 0.95 but dropped at 0.8"),
            }
        }
    }
}
