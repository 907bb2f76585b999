//! Disjunctive and negated interval spaces.
//!
//! Both extend the base space of capped closed intervals. A disjunctive
//! value is a finite union of closed intervals with no width cap; a negated
//! value is the reals minus such a union. Concept discovery only ever takes
//! meets in the base space: in the disjunctive space every pair of points
//! forms a concept, and in the negated space far-apart intervals have many
//! lower bounds but no greatest one. [`guard_base_meet`] enforces this.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::order::{generalise, Concept};
use crate::region::IntervalSet;
use crate::schema::{FeatureId, Property};

/// Non-empty disjunction of closed intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjunctiveProperty(IntervalSet);

impl DisjunctiveProperty {
    pub fn new(set: IntervalSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::Malformed(
                "disjunctive property must be non-empty".into(),
            ));
        }
        if !set.is_bounded() {
            return Err(Error::Malformed(
                "disjunctive property endpoints must be finite".into(),
            ));
        }
        Ok(DisjunctiveProperty(set))
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        match Property::interval_set(pairs)? {
            Property::IntervalSet(set) => DisjunctiveProperty::new(set),
            _ => unreachable!(),
        }
    }

    pub fn set(&self) -> &IntervalSet {
        &self.0
    }

    pub fn into_property(self) -> Property {
        Property::IntervalSet(self.0)
    }
}

/// The reals minus a non-empty excluded region.
#[derive(Debug, Clone, PartialEq)]
pub struct NegatedProperty(IntervalSet);

impl NegatedProperty {
    pub fn new(excluded: IntervalSet) -> Result<Self> {
        if excluded.is_empty() {
            return Err(Error::Malformed(
                "negated property must exclude something".into(),
            ));
        }
        if excluded.is_everything() {
            return Err(Error::Malformed(
                "negated property excludes every real".into(),
            ));
        }
        Ok(NegatedProperty(excluded))
    }

    pub fn excluded(&self) -> &IntervalSet {
        &self.0
    }

    /// The region as open gaps; `None` marks an unbounded ray.
    pub fn gaps(&self) -> Vec<(Option<f64>, Option<f64>)> {
        self.0.gaps()
    }

    pub fn into_property(self) -> Property {
        Property::Negated(self.0)
    }
}

/// Meet in the disjunctive space: union, never capped.
pub fn disj_meet(p: &DisjunctiveProperty, q: &DisjunctiveProperty) -> DisjunctiveProperty {
    DisjunctiveProperty(p.0.union(&q.0))
}

/// Join in the disjunctive space: intersection, `None` when empty.
pub fn disj_join(p: &DisjunctiveProperty, q: &DisjunctiveProperty) -> Option<DisjunctiveProperty> {
    let common = p.0.intersection(&q.0);
    (!common.is_empty()).then_some(DisjunctiveProperty(common))
}

/// Set complement of a region-valued property.
///
/// Base and disjunctive values map to negated ones; a negated value maps
/// back to the disjunction it excludes, so negating twice returns the same
/// point set.
pub fn negate(p: &Property) -> Result<Property> {
    match p {
        Property::Interval(iv) => {
            Ok(NegatedProperty::new(IntervalSet::single(*iv))?.into_property())
        }
        Property::IntervalSet(set) => Ok(NegatedProperty::new(set.clone())?.into_property()),
        Property::Negated(excluded) => {
            Ok(DisjunctiveProperty::new(excluded.clone())?.into_property())
        }
        other => Err(Error::DomainMismatch {
            feature: String::new(),
            detail: format!("cannot negate a {} property", other.kind()),
        }),
    }
}

enum Region<'a> {
    Positive(std::borrow::Cow<'a, IntervalSet>),
    Negative(&'a IntervalSet),
}

fn region(p: &Property) -> Result<Region<'_>> {
    match p {
        Property::Interval(iv) => Ok(Region::Positive(std::borrow::Cow::Owned(
            IntervalSet::single(*iv),
        ))),
        Property::IntervalSet(set) => Ok(Region::Positive(std::borrow::Cow::Borrowed(set))),
        Property::Negated(excluded) => Ok(Region::Negative(excluded)),
        other => Err(Error::DomainMismatch {
            feature: String::new(),
            detail: format!("{} is not a region of the real line", other.kind()),
        }),
    }
}

/// `p ⊆ q` on the denoted sets of reals, across base, disjunctive and negated
/// values.
pub fn region_subset(p: &Property, q: &Property) -> Result<bool> {
    Ok(match (region(p)?, region(q)?) {
        (Region::Positive(s), Region::Positive(t)) => t.covers(&s),
        (Region::Positive(s), Region::Negative(e)) => s.is_disjoint(e),
        // R \ E ⊆ T exactly when E ∪ T is the whole line.
        (Region::Negative(e), Region::Positive(t)) => e.union(&t).is_everything(),
        (Region::Negative(e), Region::Negative(f)) => e.covers(f),
    })
}

/// Where a meet is being taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeetContext {
    /// Concept discovery: only the convex base space is allowed.
    Discovery,
    /// Post-hoc analysis: disjunctive and negated values are allowed.
    Analysis,
}

fn is_extension_value(p: &Property) -> bool {
    matches!(p, Property::IntervalSet(_) | Property::Negated(_))
}

/// Generalisation gated by context.
///
/// In discovery, any disjunctive or negated entry is a policy error. In
/// analysis, a base interval meeting a disjunctive value on the same feature
/// is lifted into the disjunctive space first. Mixing negated values with
/// positive ones is experimental and rejected as a kind mismatch.
pub fn guard_base_meet(context: MeetContext, c: &Concept, d: &Concept) -> Result<Concept> {
    let uses_extensions = c
        .entries()
        .chain(d.entries())
        .any(|(_, p)| is_extension_value(p));
    match context {
        MeetContext::Discovery if uses_extensions => Err(Error::Policy(
            "discovery restricted to convex base space".to_string(),
        )),
        MeetContext::Discovery => generalise(c, d),
        MeetContext::Analysis => {
            let (c, d) = lift_pairs(c, d)?;
            generalise(&c, &d)
        }
    }
}

fn lift_pairs(c: &Concept, d: &Concept) -> Result<(Concept, Concept)> {
    let lift = |own: &Concept, other: &Concept| -> Result<Concept> {
        let entries: BTreeMap<FeatureId, Property> = own
            .entries()
            .map(|(id, p)| {
                let lifted = match (p, other.get(id)) {
                    (Property::Interval(iv), Some(Property::IntervalSet(_))) => {
                        Property::IntervalSet(IntervalSet::single(*iv))
                    }
                    _ => p.clone(),
                };
                (id, lifted)
            })
            .collect();
        Concept::new(own.schema().clone(), entries)
    };
    Ok((lift(c, d)?, lift(d, c)?))
}
