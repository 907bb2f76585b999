//! Concepts as partial maps, and their order.
//!
//! `c <= d` (c subsumes d) holds when every feature specified by `c` is also
//! specified by `d` with a value at least as informative. Generalisation is
//! the meet and is always defined; unification is the join and fails when two
//! shared values have no common refinement.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::region::Closed;
use crate::schema::{
    canonicalize, validate_property, Feature, FeatureId, FeatureSchema, Property, ValueDomain,
};

/// A partial map from features to properties. The empty map is the
/// universal concept, the bottom of the order.
#[derive(Debug, Clone)]
pub struct Concept {
    schema: Arc<FeatureSchema>,
    entries: BTreeMap<FeatureId, Property>,
}

impl PartialEq for Concept {
    fn eq(&self, other: &Self) -> bool {
        same_schema(&self.schema, &other.schema) && self.entries == other.entries
    }
}

pub(crate) fn same_schema(a: &Arc<FeatureSchema>, b: &Arc<FeatureSchema>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Concept {
    pub fn universal(schema: Arc<FeatureSchema>) -> Self {
        Concept {
            schema,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a concept, canonicalizing and validating every entry.
    pub fn new<I>(schema: Arc<FeatureSchema>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FeatureId, Property)>,
    {
        let mut map = BTreeMap::new();
        for (id, p) in entries {
            let p = canonicalize(&p);
            validate_property(&schema, id, &p)?;
            if map.insert(id, p).is_some() {
                let name = schema.feature(id)?.name.clone();
                return Err(Error::Malformed(format!(
                    "feature `{name}` specified twice"
                )));
            }
        }
        Ok(Concept {
            schema,
            entries: map,
        })
    }

    /// Like [`Concept::new`] with features given by name.
    pub fn from_named<'a, I>(schema: Arc<FeatureSchema>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, Property)>,
    {
        let resolved = entries
            .into_iter()
            .map(|(name, p)| Ok((schema.id_of(name)?, p)))
            .collect::<Result<Vec<_>>>()?;
        Concept::new(schema, resolved)
    }

    // Entries produced by order operations are already canonical and valid.
    fn from_parts(schema: Arc<FeatureSchema>, entries: BTreeMap<FeatureId, Property>) -> Self {
        Concept { schema, entries }
    }

    pub fn schema(&self) -> &Arc<FeatureSchema> {
        &self.schema
    }

    pub fn get(&self, id: FeatureId) -> Option<&Property> {
        self.entries.get(&id)
    }

    pub fn entries(&self) -> impl Iterator<Item = (FeatureId, &Property)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    /// Number of specified features.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_universal(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_total(&self) -> bool {
        self.entries.len() == self.schema.len()
    }
}

/// Outcome of a join.
#[derive(Debug, Clone, PartialEq)]
pub enum MeetJoinResult {
    Defined(Concept),
    Undefined,
}

impl MeetJoinResult {
    pub fn defined(self) -> Option<Concept> {
        match self {
            MeetJoinResult::Defined(c) => Some(c),
            MeetJoinResult::Undefined => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, MeetJoinResult::Defined(_))
    }
}

/// A total real-valued point of the representation space.
#[derive(Debug, Clone)]
pub struct Instance {
    schema: Arc<FeatureSchema>,
    values: Vec<f64>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        same_schema(&self.schema, &other.schema) && self.values == other.values
    }
}

impl Instance {
    pub fn new(schema: Arc<FeatureSchema>, values: Vec<f64>) -> Result<Self> {
        if values.len() != schema.len() {
            return Err(Error::DimensionMismatch {
                expected: schema.len(),
                got: values.len(),
            });
        }
        if let Some(x) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::Malformed(format!(
                "instance value {x} is not finite"
            )));
        }
        Ok(Instance { schema, values })
    }

    pub fn schema(&self) -> &Arc<FeatureSchema> {
        &self.schema
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn mismatch(feature: &str, p: &Property, q: &Property) -> Error {
    Error::DomainMismatch {
        feature: feature.to_string(),
        detail: format!("cannot compare {} with {}", p.kind(), q.kind()),
    }
}

fn kind_mismatch(feature: &str, p: &Property, q: &Property) -> Error {
    Error::KindMismatch {
        feature: feature.to_string(),
        left: p.kind(),
        right: q.kind(),
    }
}

/// `p <= q` in the value order of their shared domain.
///
/// Atomic values (symbols, points, buckets) are ordered by equality; set- and
/// region-valued properties by reverse inclusion, so wider values sit lower.
pub fn prop_leq(p: &Property, q: &Property) -> Result<bool> {
    prop_leq_on("", p, q)
}

fn prop_leq_on(feature: &str, p: &Property, q: &Property) -> Result<bool> {
    use Property::*;
    Ok(match (p, q) {
        (Symbol(a), Symbol(b)) => a == b,
        (SymbolSet(a), SymbolSet(b)) => a.is_superset(b),
        (Point(a), Point(b)) => a == b,
        (Interval(a), Interval(b)) => a.contains(b),
        (PointSet(a), PointSet(b)) => b
            .iter()
            .all(|x| a.binary_search_by(|y| y.total_cmp(x)).is_ok()),
        (IntervalSet(a), IntervalSet(b)) => a.covers(b),
        // R \ E contains R \ F exactly when E is inside F.
        (Negated(e), Negated(f)) => f.covers(e),
        (Bucket(a), Bucket(b)) => a == b,
        _ => return Err(mismatch(feature, p, q)),
    })
}

/// Greatest lower bound of two values on one dimension; `None` drops the
/// feature (no common generalisation within the width cap).
pub(crate) fn prop_meet(
    feature: &str,
    domain: &ValueDomain,
    p: &Property,
    q: &Property,
) -> Result<Option<Property>> {
    use Property::*;
    let cap = domain.cap().unwrap_or(f64::INFINITY);
    Ok(match (p, q) {
        (Symbol(a), Symbol(b)) => (a == b).then(|| p.clone()),
        (Point(a), Point(b)) => (a == b).then(|| p.clone()),
        (Bucket(a), Bucket(b)) => (a == b).then(|| p.clone()),
        (SymbolSet(a), SymbolSet(b)) => Some(SymbolSet(a.union(b).cloned().collect())),
        (Interval(a), Interval(b)) => {
            let hull = a.hull(b);
            (hull.width() <= cap).then_some(Interval(hull))
        }
        (PointSet(a), PointSet(b)) => {
            let mut pts: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
            pts.sort_by(|x, y| x.total_cmp(y));
            pts.dedup();
            let spread = pts[pts.len() - 1] - pts[0];
            (spread <= cap).then_some(PointSet(pts))
        }
        (IntervalSet(a), IntervalSet(b)) => Some(IntervalSet(a.union(b))),
        (Negated(e), Negated(f)) => {
            let common = e.intersection(f);
            (!common.is_empty()).then_some(Negated(common))
        }
        _ => return Err(kind_mismatch(feature, p, q)),
    })
}

/// Least upper bound of two values on one dimension; `None` when the values
/// have no common refinement.
pub(crate) fn prop_join(feature: &str, p: &Property, q: &Property) -> Result<Option<Property>> {
    use Property::*;
    Ok(match (p, q) {
        (Symbol(a), Symbol(b)) => (a == b).then(|| p.clone()),
        (Point(a), Point(b)) => (a == b).then(|| p.clone()),
        (Bucket(a), Bucket(b)) => (a == b).then(|| p.clone()),
        (SymbolSet(a), SymbolSet(b)) => {
            let common: std::collections::BTreeSet<String> = a.intersection(b).cloned().collect();
            (!common.is_empty()).then_some(SymbolSet(common))
        }
        (Interval(a), Interval(b)) => a.intersect(b).map(Interval),
        (PointSet(a), PointSet(b)) => {
            let common: Vec<f64> = a
                .iter()
                .copied()
                .filter(|x| b.binary_search_by(|y| y.total_cmp(x)).is_ok())
                .collect();
            (!common.is_empty()).then_some(PointSet(common))
        }
        (IntervalSet(a), IntervalSet(b)) => {
            let common = a.intersection(b);
            (!common.is_empty()).then_some(IntervalSet(common))
        }
        (Negated(e), Negated(f)) => {
            let excluded = e.union(f);
            (!excluded.is_everything()).then_some(Negated(excluded))
        }
        _ => return Err(kind_mismatch(feature, p, q)),
    })
}

fn check_schemas(c: &Concept, d: &Concept) -> Result<()> {
    if same_schema(&c.schema, &d.schema) {
        Ok(())
    } else {
        Err(Error::SchemaMismatch)
    }
}

/// `c <= d`: `dom c ⊆ dom d` and `c(f) <= d(f)` on every feature of `c`.
pub fn subsumes(c: &Concept, d: &Concept) -> Result<bool> {
    check_schemas(c, d)?;
    for (id, p) in &c.entries {
        let Some(q) = d.entries.get(id) else {
            return Ok(false);
        };
        let name = &c.schema.feature(*id)?.name;
        if !prop_leq_on(name, p, q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Generalisation (meet). Shared features keep the meet of their values when
/// one exists within the width cap; every other feature is dropped.
pub fn generalise(c: &Concept, d: &Concept) -> Result<Concept> {
    check_schemas(c, d)?;
    let mut out = BTreeMap::new();
    for (id, p) in &c.entries {
        if let Some(q) = d.entries.get(id) {
            let feature = c.schema.feature(*id)?;
            if let Some(m) = prop_meet(&feature.name, &feature.domain, p, q)? {
                out.insert(*id, m);
            }
        }
    }
    Ok(Concept::from_parts(c.schema.clone(), out))
}

/// Unification (join). Undefined when a shared feature has no common
/// refinement.
pub fn unify(c: &Concept, d: &Concept) -> Result<MeetJoinResult> {
    check_schemas(c, d)?;
    let mut out = c.entries.clone();
    for (id, q) in &d.entries {
        match c.entries.get(id) {
            None => {
                out.insert(*id, q.clone());
            }
            Some(p) => {
                let name = &c.schema.feature(*id)?.name;
                match prop_join(name, p, q)? {
                    Some(j) => {
                        out.insert(*id, j);
                    }
                    None => return Ok(MeetJoinResult::Undefined),
                }
            }
        }
    }
    Ok(MeetJoinResult::Defined(Concept::from_parts(
        c.schema.clone(),
        out,
    )))
}

/// `c \ d`: the complement of `c ⊓ d` relative to `c`, i.e. the entries of
/// `c` that do not survive identically into the meet.
pub fn concept_diff(c: &Concept, d: &Concept) -> Result<Concept> {
    let meet = generalise(c, d)?;
    let out = c
        .entries
        .iter()
        .filter(|(id, p)| meet.entries.get(id) != Some(p))
        .map(|(id, p)| (*id, p.clone()))
        .collect();
    Ok(Concept::from_parts(c.schema.clone(), out))
}

/// The maximal concept an instance denotes.
pub fn to_concept(instance: &Instance) -> Result<Concept> {
    let schema = &instance.schema;
    let mut out = BTreeMap::new();
    for (feature, &x) in schema.features().iter().zip(&instance.values) {
        let p = match &feature.domain {
            ValueDomain::Point => Property::Point(x + 0.0),
            ValueDomain::Interval { .. } => {
                Property::Interval(Closed::new(x, x).expect("finite point"))
            }
            ValueDomain::PointSet { .. } => Property::PointSet(vec![x + 0.0]),
            ValueDomain::Partition { cutoffs } => {
                Property::Bucket(ValueDomain::bucket_of(cutoffs, x))
            }
            ValueDomain::Discrete { .. } | ValueDomain::Disjunctive { .. } => {
                return Err(Error::SymbolDomainInInstance(feature.name.clone()))
            }
        };
        out.insert(feature.id, p);
    }
    Ok(Concept::from_parts(schema.clone(), out))
}

fn member(feature: &Feature, p: &Property, x: f64) -> Result<bool> {
    Ok(match (p, &feature.domain) {
        (Property::Point(a), _) => *a == x,
        (Property::Interval(iv), _) => iv.contains_point(x),
        (Property::IntervalSet(set), _) => set.contains_point(x),
        (Property::Negated(excluded), _) => !excluded.contains_point(x),
        (Property::PointSet(pts), _) => pts.contains(&x),
        (Property::Bucket(b), ValueDomain::Partition { cutoffs }) => {
            ValueDomain::bucket_of(cutoffs, x) == *b
        }
        _ => return Err(Error::SymbolDomainInInstance(feature.name.clone())),
    })
}

/// Instances of `pool` falling under `c`, in pool order.
///
/// An instance falls under `c` when each of its values lies in the region
/// `c` assigns to that feature. On base values this is the same as
/// `c <= to_concept(instance)`; it also covers disjunctive and negated
/// values.
pub fn extension<'a>(c: &Concept, pool: &'a [Instance]) -> Result<Vec<&'a Instance>> {
    let mut out = Vec::new();
    for inst in pool {
        if !same_schema(&c.schema, &inst.schema) {
            return Err(Error::SchemaMismatch);
        }
        let mut inside = true;
        for (id, p) in &c.entries {
            if !member(c.schema.feature(*id)?, p, inst.values[id.0])? {
                inside = false;
                break;
            }
        }
        if inside {
            out.push(inst);
        }
    }
    Ok(out)
}
