//! Feature schemas, value domains and properties.
//!
//! A [`FeatureSchema`] fixes the ordered list of feature dimensions, each bound
//! to one [`ValueDomain`]. A [`Property`] is one value in one dimension's
//! domain. Properties are held in canonical form so that two properties that
//! are each below the other in the order are structurally identical.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::region::{Closed, IntervalSet};

/// Index of a feature within its schema (`0..K`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureId(pub usize);

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValueDomain {
    /// Unordered finite symbols; values are single symbols.
    Discrete { symbols: BTreeSet<String> },
    /// Values are non-empty subsets of the symbols, ordered by superset.
    Disjunctive { symbols: BTreeSet<String> },
    /// Values are single reals.
    Point,
    /// Closed intervals no wider than `2 * epsilon`. Disjunctive interval
    /// sets and negated regions also live on these dimensions, cap-exempt.
    Interval { epsilon: f64 },
    /// Finite real sets whose spread is at most `2 * epsilon`.
    PointSet { epsilon: f64 },
    /// Buckets of a partition of the line; `cutoffs.len() + 1` buckets.
    Partition { cutoffs: Vec<f64> },
}

impl ValueDomain {
    pub fn kind(&self) -> &'static str {
        match self {
            ValueDomain::Discrete { .. } => "discrete",
            ValueDomain::Disjunctive { .. } => "disjunctive",
            ValueDomain::Point => "point",
            ValueDomain::Interval { .. } => "interval",
            ValueDomain::PointSet { .. } => "pointset",
            ValueDomain::Partition { .. } => "partition",
        }
    }

    /// Maximum property width, for capped domains.
    pub fn cap(&self) -> Option<f64> {
        match self {
            ValueDomain::Interval { epsilon } | ValueDomain::PointSet { epsilon } => {
                Some(2.0 * epsilon)
            }
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(
            self,
            ValueDomain::Discrete { .. }
                | ValueDomain::Disjunctive { .. }
                | ValueDomain::Partition { .. }
        )
    }

    /// Bucket holding `x`: bucket 0 is `x < c0`, bucket `i` is
    /// `c(i-1) <= x < c(i)`, the last bucket is `x >= c(n-1)`.
    pub fn bucket_of(cutoffs: &[f64], x: f64) -> usize {
        cutoffs.partition_point(|&c| c <= x)
    }

    fn check(&self) -> std::result::Result<(), String> {
        match self {
            ValueDomain::Discrete { symbols } | ValueDomain::Disjunctive { symbols } => {
                if symbols.is_empty() {
                    return Err("symbol set must be non-empty".into());
                }
            }
            ValueDomain::Interval { epsilon } | ValueDomain::PointSet { epsilon } => {
                if !(epsilon.is_finite() && *epsilon > 0.0) {
                    return Err(format!(
                        "epsilon must be positive and finite, got {epsilon}"
                    ));
                }
            }
            ValueDomain::Partition { cutoffs } => {
                if cutoffs.iter().any(|c| !c.is_finite()) {
                    return Err("partition cutoffs must be finite".into());
                }
                if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
                    return Err("partition cutoffs must be strictly increasing".into());
                }
            }
            ValueDomain::Point => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub id: FeatureId,
    pub name: String,
    pub domain: ValueDomain,
}

/// Ordered list of named feature dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSchema {
    features: Vec<Feature>,
    by_name: BTreeMap<String, FeatureId>,
}

impl FeatureSchema {
    pub fn new<I, S>(features: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, ValueDomain)>,
        S: Into<String>,
    {
        let mut out = Vec::new();
        let mut by_name = BTreeMap::new();
        for (i, (name, domain)) in features.into_iter().enumerate() {
            let name = name.into();
            domain
                .check()
                .map_err(|e| Error::InvalidSchema(format!("feature `{name}`: {e}")))?;
            if by_name.insert(name.clone(), FeatureId(i)).is_some() {
                return Err(Error::InvalidSchema(format!(
                    "duplicate feature name `{name}`"
                )));
            }
            out.push(Feature {
                id: FeatureId(i),
                name,
                domain,
            });
        }
        Ok(FeatureSchema {
            features: out,
            by_name,
        })
    }

    /// Number of feature dimensions (K).
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn feature(&self, id: FeatureId) -> Result<&Feature> {
        self.features
            .get(id.0)
            .ok_or_else(|| Error::UnknownFeature(id.to_string()))
    }

    pub fn id_of(&self, name: &str) -> Result<FeatureId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }
}

/// One value on one feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum Property {
    Symbol(String),
    SymbolSet(BTreeSet<String>),
    Point(f64),
    Interval(Closed),
    /// Sorted, deduplicated, non-empty.
    PointSet(Vec<f64>),
    /// Disjunction of closed intervals; exempt from the width cap.
    IntervalSet(IntervalSet),
    /// The reals minus the stored excluded region.
    Negated(IntervalSet),
    Bucket(usize),
}

impl Property {
    pub fn symbol(s: impl Into<String>) -> Self {
        Property::Symbol(s.into())
    }

    pub fn symbols<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Property::SymbolSet(items.into_iter().map(Into::into).collect())
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::Malformed(format!(
                "interval endpoints must be finite: [{lo}, {hi}]"
            )));
        }
        Closed::new(lo, hi)
            .map(Property::Interval)
            .ok_or_else(|| Error::Malformed(format!("interval [{lo}, {hi}] has lo > hi")))
    }

    pub fn interval_set(pairs: &[(f64, f64)]) -> Result<Self> {
        Ok(Property::IntervalSet(closed_set(pairs)?))
    }

    /// Region excluding the given closed intervals.
    pub fn negated(excluded: &[(f64, f64)]) -> Result<Self> {
        Ok(Property::Negated(closed_set(excluded)?))
    }

    pub fn point_set(points: &[f64]) -> Self {
        canonicalize(&Property::PointSet(points.to_vec()))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Property::Symbol(_) => "symbol",
            Property::SymbolSet(_) => "symbolset",
            Property::Point(_) => "point",
            Property::Interval(_) => "interval",
            Property::PointSet(_) => "pointset",
            Property::IntervalSet(_) => "intervalset",
            Property::Negated(_) => "negated",
            Property::Bucket(_) => "bucket",
        }
    }
}

fn closed_set(pairs: &[(f64, f64)]) -> Result<IntervalSet> {
    let members = pairs
        .iter()
        .map(|&(a, b)| {
            Closed::new(a, b)
                .ok_or_else(|| Error::Malformed(format!("interval [{a}, {b}] has lo > hi")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalSet::from_intervals(members))
}

/// Unique canonical form of a property. Idempotent.
pub fn canonicalize(p: &Property) -> Property {
    match p {
        Property::Point(x) => Property::Point(x + 0.0),
        Property::Interval(iv) => Property::Interval(Closed {
            lo: iv.lo + 0.0,
            hi: iv.hi + 0.0,
        }),
        Property::PointSet(points) => {
            let mut pts: Vec<f64> = points.iter().map(|x| x + 0.0).collect();
            pts.sort_by(|a, b| a.total_cmp(b));
            pts.dedup();
            Property::PointSet(pts)
        }
        Property::IntervalSet(set) => {
            Property::IntervalSet(IntervalSet::from_intervals(set.members().iter().copied()))
        }
        Property::Negated(set) => {
            Property::Negated(IntervalSet::from_intervals(set.members().iter().copied()))
        }
        other => other.clone(),
    }
}

/// Checks that `p` is a legal value for feature `id` of `schema`.
pub fn validate_property(schema: &FeatureSchema, id: FeatureId, p: &Property) -> Result<()> {
    let feature = schema.feature(id)?;
    let name = &feature.name;
    let mismatch = |detail: String| Error::DomainMismatch {
        feature: name.clone(),
        detail,
    };
    let wrong_tag = || {
        mismatch(format!(
            "{} property on {} domain",
            p.kind(),
            feature.domain.kind()
        ))
    };
    match (&feature.domain, p) {
        (ValueDomain::Discrete { symbols }, Property::Symbol(s)) => {
            if !symbols.contains(s) {
                return Err(mismatch(format!("unknown symbol `{s}`")));
            }
        }
        (ValueDomain::Disjunctive { symbols }, Property::SymbolSet(set)) => {
            if set.is_empty() {
                return Err(Error::Malformed(format!("empty symbol set on `{name}`")));
            }
            if let Some(s) = set.iter().find(|s| !symbols.contains(*s)) {
                return Err(mismatch(format!("unknown symbol `{s}`")));
            }
        }
        (ValueDomain::Point, Property::Point(x)) => finite(*x)?,
        (ValueDomain::Interval { epsilon }, Property::Interval(iv)) => {
            finite(iv.lo)?;
            finite(iv.hi)?;
            if iv.lo > iv.hi {
                return Err(Error::Malformed(format!(
                    "interval [{}, {}] has lo > hi",
                    iv.lo, iv.hi
                )));
            }
            check_cap(name, iv.width(), *epsilon)?;
        }
        (ValueDomain::Interval { .. }, Property::IntervalSet(set)) => {
            if set.is_empty() {
                return Err(Error::Malformed(format!("empty interval set on `{name}`")));
            }
            if !set.is_bounded() {
                return Err(Error::Malformed(
                    "interval set endpoints must be finite".into(),
                ));
            }
            if *p != canonicalize(p) {
                return Err(Error::Malformed("interval set is not canonical".into()));
            }
        }
        (ValueDomain::Interval { .. }, Property::Negated(excluded)) => {
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
            if *p != canonicalize(p) {
                return Err(Error::Malformed("negated region is not canonical".into()));
            }
        }
        (ValueDomain::PointSet { epsilon }, Property::PointSet(points)) => {
            let (Some(&lo), Some(&hi)) = (points.first(), points.last()) else {
                return Err(Error::Malformed(format!("empty point set on `{name}`")));
            };
            for &x in points {
                finite(x)?;
            }
            if *p != canonicalize(p) {
                return Err(Error::Malformed(
                    "point set is not sorted and deduplicated".into(),
                ));
            }
            check_cap(name, hi - lo, *epsilon)?;
        }
        (ValueDomain::Partition { cutoffs }, Property::Bucket(b)) => {
            if *b > cutoffs.len() {
                return Err(mismatch(format!(
                    "bucket {b} out of range 0..={}",
                    cutoffs.len()
                )));
            }
        }
        _ => return Err(wrong_tag()),
    }
    Ok(())
}

fn finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Malformed(format!("non-finite value {x}")))
    }
}

fn check_cap(feature: &str, width: f64, epsilon: f64) -> Result<()> {
    let cap = 2.0 * epsilon;
    if width > cap {
        Err(Error::CapExceeded {
            feature: feature.to_string(),
            width,
            cap,
        })
    } else {
        Ok(())
    }
}
