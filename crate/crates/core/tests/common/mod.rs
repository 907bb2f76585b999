//! Independent oracles and random generators shared by the integration
//! tests and the acceptance suite.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use concept_lattice::{
    Closed, Concept, FeatureId, FeatureSchema, Instance, IntervalSet, Property, ValueDomain,
};
use rand::seq::SliceRandom;
use rand::Rng;

// ---------------------------------------------------------------------------
// Numerical integration oracle

fn pdf(mean: f64, sd: f64, x: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over a finite `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Gaussian mass of `[lo, hi]` by direct integration of the density. The
/// range is clipped to ±40σ and split at every whole σ inside ±8σ so the
/// quadrature never straddles the peak.
pub fn gauss_mass(mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    let lo = lo.max(mean - 40.0 * sd);
    let hi = hi.min(mean + 40.0 * sd);
    if lo >= hi {
        return 0.0;
    }
    let mut cuts = vec![lo];
    for k in -8..=8 {
        let x = mean + k as f64 * sd;
        if x > lo && x < hi {
            cuts.push(x);
        }
    }
    cuts.push(hi);
    cuts.windows(2)
        .map(|w| simpson(|x| pdf(mean, sd, x), w[0], w[1], 1e-14))
        .sum()
}

fn merged(mut pairs: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in pairs {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn pairs(set: &IntervalSet) -> Vec<(f64, f64)> {
    set.members().iter().map(|c| (c.lo, c.hi)).collect()
}

/// Mass a Gaussian gives to the region denoted by a property.
pub fn region_mass(mean: f64, sd: f64, p: &Property, domain: &ValueDomain) -> f64 {
    match p {
        Property::Interval(iv) => gauss_mass(mean, sd, iv.lo, iv.hi),
        Property::IntervalSet(set) => merged(pairs(set))
            .iter()
            .map(|&(a, b)| gauss_mass(mean, sd, a, b))
            .sum(),
        Property::Negated(excluded) => {
            let mut total = 0.0;
            let mut from = f64::NEG_INFINITY;
            for (a, b) in merged(pairs(excluded)) {
                total += gauss_mass(mean, sd, from, a);
                from = b;
            }
            total + gauss_mass(mean, sd, from, f64::INFINITY)
        }
        Property::Bucket(b) => match domain {
            ValueDomain::Partition { cutoffs } => {
                let lo = if *b == 0 {
                    f64::NEG_INFINITY
                } else {
                    cutoffs[b - 1]
                };
                let hi = cutoffs.get(*b).copied().unwrap_or(f64::INFINITY);
                gauss_mass(mean, sd, lo, hi)
            }
            _ => panic!("bucket outside a partition domain"),
        },
        Property::Point(_) | Property::PointSet(_) => 0.0,
        other => panic!("no density over {other:?}"),
    }
}

/// Probability of a concept under a diagonal Gaussian, one quadrature per
/// specified dimension.
pub fn concept_mass(c: &Concept, mean: &[f64], sd: &[f64]) -> f64 {
    c.entries()
        .map(|(id, p)| region_mass(mean[id.0], sd[id.0], p, &c.schema().features()[id.0].domain))
        .product()
}

pub fn joint_mass(g1: (f64, f64), g2: (f64, f64), lo: f64, hi: f64) -> f64 {
    gauss_mass(g1.0, g1.1, lo, hi) * gauss_mass(g2.0, g2.1, lo, hi)
}

/// Best joint mass over interval centres on a fixed grid.
pub fn grid_best(g1: (f64, f64), g2: (f64, f64), length: f64, step: f64) -> (f64, f64) {
    let spread = g1.1.max(g2.1);
    let from = g1.0.min(g2.0) - 3.0 * spread;
    let to = g1.0.max(g2.0) + 3.0 * spread;
    let n = ((to - from) / step).ceil() as usize;
    (0..=n)
        .map(|k| {
            let c = from + k as f64 * step;
            (c, joint_mass(g1, g2, c - length / 2.0, c + length / 2.0))
        })
        .fold((from, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        })
}

/// Smallest multiple of `step` in `(0, cap]` whose best grid placement
/// reaches `threshold`; `None` if even `cap` does not.
pub fn grid_min_length(
    g1: (f64, f64),
    g2: (f64, f64),
    threshold: f64,
    cap: f64,
    step: f64,
) -> Option<f64> {
    let reaches = |len: f64| grid_best(g1, g2, len, step).1 >= threshold;
    if !reaches(cap) {
        return None;
    }
    // reaching the threshold is monotone in length
    let (mut lo, mut hi) = (0usize, (cap / step).floor() as usize);
    if (hi as f64) * step < cap && !reaches(hi as f64 * step) {
        return Some(cap);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if reaches(mid as f64 * step) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi as f64 * step)
}

// ---------------------------------------------------------------------------
// Random schemas and concepts

fn symbols(n: usize) -> BTreeSet<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Discrete,
    Disjunctive,
    Interval,
    Partition,
    /// Disjunctive intervals, negated intervals, point sets and points.
    Regions,
}

pub const FAMILIES: [Family; 5] = [
    Family::Discrete,
    Family::Disjunctive,
    Family::Interval,
    Family::Partition,
    Family::Regions,
];

/// Which kind of value a generator puts on each feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Symbol,
    SymbolSet,
    Base,
    Disjunction,
    Negation,
    PointSet,
    Point,
    Bucket,
}

pub struct Space {
    pub schema: Arc<FeatureSchema>,
    pub slots: Vec<Slot>,
}

pub fn space(family: Family) -> Space {
    let (features, slots): (Vec<(&str, ValueDomain)>, Vec<Slot>) = match family {
        Family::Discrete => (0..4)
            .map(|_| {
                (
                    "",
                    ValueDomain::Discrete {
                        symbols: symbols(3),
                    },
                )
            })
            .zip(std::iter::repeat(Slot::Symbol))
            .unzip(),
        Family::Disjunctive => (0..3)
            .map(|_| {
                (
                    "",
                    ValueDomain::Disjunctive {
                        symbols: symbols(4),
                    },
                )
            })
            .zip(std::iter::repeat(Slot::SymbolSet))
            .unzip(),
        Family::Interval => (0..3)
            .map(|_| ("", ValueDomain::Interval { epsilon: 1.0 }))
            .zip(std::iter::repeat(Slot::Base))
            .unzip(),
        Family::Partition => (0..3)
            .map(|_| {
                (
                    "",
                    ValueDomain::Partition {
                        cutoffs: vec![0.0, 1.0, 2.0],
                    },
                )
            })
            .zip(std::iter::repeat(Slot::Bucket))
            .unzip(),
        Family::Regions => vec![
            (
                ("", ValueDomain::Interval { epsilon: 1.0 }),
                Slot::Disjunction,
            ),
            (("", ValueDomain::Interval { epsilon: 1.0 }), Slot::Negation),
            (("", ValueDomain::PointSet { epsilon: 1.0 }), Slot::PointSet),
            (("", ValueDomain::Point), Slot::Point),
        ]
        .into_iter()
        .unzip(),
    };
    let schema = FeatureSchema::new(
        features
            .into_iter()
            .enumerate()
            .map(|(i, (_, d))| (format!("f{i}"), d)),
    )
    .expect("valid schema");
    Space {
        schema: Arc::new(schema),
        slots,
    }
}

/// Quarter-step grid point in `[0, 4]`.
fn grid<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(0..=16) as f64 * 0.25
}

fn base<R: Rng>(rng: &mut R) -> (f64, f64) {
    let lo = grid(rng);
    (lo, lo + rng.gen_range(0..=8) as f64 * 0.25)
}

fn value<R: Rng>(rng: &mut R, slot: Slot) -> Property {
    match slot {
        Slot::Symbol => Property::symbol(format!("s{}", rng.gen_range(0..3))),
        Slot::SymbolSet => {
            let mut set: BTreeSet<String> = (0..4)
                .filter(|_| rng.gen_bool(0.5))
                .map(|i| format!("s{i}"))
                .collect();
            if set.is_empty() {
                set.insert(format!("s{}", rng.gen_range(0..4)));
            }
            Property::SymbolSet(set)
        }
        Slot::Base => {
            let (lo, hi) = base(rng);
            Property::interval(lo, hi).unwrap()
        }
        Slot::Disjunction => {
            let n = rng.gen_range(1..=3);
            let members: Vec<(f64, f64)> = (0..n).map(|_| base(rng)).collect();
            Property::interval_set(&members).unwrap()
        }
        Slot::Negation => {
            let n = rng.gen_range(1..=2);
            let mut members: Vec<Closed> = (0..n)
                .map(|_| {
                    let (lo, hi) = base(rng);
                    Closed::new(lo, hi).unwrap()
                })
                .collect();
            if rng.gen_bool(0.2) {
                members.push(Closed::new(f64::NEG_INFINITY, -1.0).unwrap());
            }
            Property::Negated(IntervalSet::from_intervals(members))
        }
        Slot::PointSet => {
            let b = grid(rng);
            let n = rng.gen_range(1..=3);
            let pts: Vec<f64> = (0..n)
                .map(|_| b + rng.gen_range(0..=8) as f64 * 0.25)
                .collect();
            Property::point_set(&pts)
        }
        Slot::Point => Property::Point(rng.gen_range(0..4) as f64),
        Slot::Bucket => Property::Bucket(rng.gen_range(0..4)),
    }
}

pub fn random_concept<R: Rng>(rng: &mut R, space: &Space) -> Concept {
    let mut entries = Vec::new();
    for (i, slot) in space.slots.iter().enumerate() {
        if rng.gen_bool(0.7) {
            entries.push((FeatureId(i), value(rng, *slot)));
        }
    }
    Concept::new(space.schema.clone(), entries).expect("generated concept is valid")
}

fn narrow<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> (f64, f64) {
    let a = lo + rng.gen::<f64>() * (hi - lo);
    let b = a + rng.gen::<f64>() * (hi - a);
    (a, b.min(hi))
}

fn refine_value<R: Rng>(rng: &mut R, p: &Property) -> Property {
    match p {
        Property::SymbolSet(set) => {
            let items: Vec<&String> = set.iter().collect();
            let k = rng.gen_range(1..=items.len());
            Property::SymbolSet(
                items
                    .choose_multiple(rng, k)
                    .map(|s| (*s).clone())
                    .collect(),
            )
        }
        Property::Interval(iv) => {
            let (a, b) = narrow(rng, iv.lo, iv.hi);
            Property::interval(a, b).unwrap()
        }
        Property::IntervalSet(set) => {
            let members = set.members();
            let k = rng.gen_range(1..=members.len());
            let picked: Vec<(f64, f64)> = members
                .choose_multiple(rng, k)
                .map(|m| narrow(rng, m.lo, m.hi))
                .collect();
            Property::interval_set(&picked).unwrap()
        }
        Property::Negated(excluded) => {
            let (lo, hi) = base(rng);
            let grown = excluded.union(&IntervalSet::single(Closed::new(lo, hi).unwrap()));
            if grown.is_everything() {
                p.clone()
            } else {
                Property::Negated(grown)
            }
        }
        Property::PointSet(pts) => {
            let k = rng.gen_range(1..=pts.len());
            let picked: Vec<f64> = pts.choose_multiple(rng, k).copied().collect();
            Property::point_set(&picked)
        }
        other => other.clone(),
    }
}

/// A random concept at or above `c`: specified features are narrowed and
/// unspecified ones may be filled in.
pub fn refine<R: Rng>(rng: &mut R, space: &Space, c: &Concept) -> Concept {
    let entries: Vec<(FeatureId, Property)> = space
        .slots
        .iter()
        .enumerate()
        .filter_map(|(i, slot)| match c.get(FeatureId(i)) {
            Some(p) => Some((FeatureId(i), refine_value(rng, p))),
            None => rng.gen_bool(0.5).then(|| (FeatureId(i), value(rng, *slot))),
        })
        .collect();
    Concept::new(space.schema.clone(), entries).expect("refined concept is valid")
}

/// Random real instance over a schema without symbol domains.
pub fn random_instance<R: Rng>(rng: &mut R, space: &Space) -> Instance {
    let values = space
        .slots
        .iter()
        .map(|slot| match slot {
            // points and point sets live on a coarse grid so hits happen
            Slot::Point => rng.gen_range(0..4) as f64,
            Slot::PointSet => grid(rng),
            _ => rng.gen_range(-1.5..5.5),
        })
        .collect();
    Instance::new(space.schema.clone(), values).expect("valid instance")
}
