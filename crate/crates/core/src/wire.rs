//! JSON file formats for schemas, concepts, instances, posteriors and
//! reports.
//!
//! Output is byte-deterministic: object keys are sorted and floats are
//! rounded to 12 significant digits before being written in shortest
//! round-trip form.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::order::{Concept, Instance};
use crate::prob::{DimOutcome, PMeetResult, Posterior};
use crate::region::{Closed, IntervalSet};
use crate::schema::{FeatureSchema, Property, ValueDomain};
use crate::verify::{CheckReport, Verdict};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    features: Vec<FeatureSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FeatureSpec {
    name: String,
    domain: DomainSpec,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum DomainSpec {
    Discrete { symbols: Vec<String> },
    Disjunctive { symbols: Vec<String> },
    Point,
    Interval { epsilon: f64 },
    Pointset { epsilon: f64 },
    Partition { cutoffs: Vec<f64> },
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum PropertySpec {
    Symbol(String),
    Symbolset(Vec<String>),
    Point(f64),
    Interval((f64, f64)),
    Pointset(Vec<f64>),
    Intervalset(Vec<(f64, f64)>),
    Negated(Vec<(Option<f64>, Option<f64>)>),
    Bucket(usize),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConceptFile {
    entries: BTreeMap<String, PropertySpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    point: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PoolFile {
    instances: Vec<InstanceFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PosteriorFile {
    mean: Vec<f64>,
    stddev: Vec<f64>,
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_schema(text: &str) -> Result<FeatureSchema> {
    let file: SchemaFile = parse(text)?;
    FeatureSchema::new(file.features.into_iter().map(|f| {
        let domain = match f.domain {
            DomainSpec::Discrete { symbols } => ValueDomain::Discrete {
                symbols: symbols.into_iter().collect(),
            },
            DomainSpec::Disjunctive { symbols } => ValueDomain::Disjunctive {
                symbols: symbols.into_iter().collect(),
            },
            DomainSpec::Point => ValueDomain::Point,
            DomainSpec::Interval { epsilon } => ValueDomain::Interval { epsilon },
            DomainSpec::Pointset { epsilon } => ValueDomain::PointSet { epsilon },
            DomainSpec::Partition { cutoffs } => ValueDomain::Partition { cutoffs },
        };
        (f.name, domain)
    }))
}

pub fn schema_to_json(schema: &FeatureSchema) -> Value {
    let features: Vec<Value> = schema
        .features()
        .iter()
        .map(|f| {
            let domain = match &f.domain {
                ValueDomain::Discrete { symbols } => json!({"kind": "discrete", "symbols": symbols}),
                ValueDomain::Disjunctive { symbols } => json!({"kind": "disjunctive", "symbols": symbols}),
                ValueDomain::Point => json!({"kind": "point"}),
                ValueDomain::Interval { epsilon } => json!({"kind": "interval", "epsilon": num(*epsilon)}),
                ValueDomain::PointSet { epsilon } => json!({"kind": "pointset", "epsilon": num(*epsilon)}),
                ValueDomain::Partition { cutoffs } => {
                    json!({"kind": "partition", "cutoffs": cutoffs.iter().map(|c| num(*c)).collect::<Vec<_>>()})
                }
            };
            json!({"name": f.name, "domain": domain})
        })
        .collect();
    json!({ "features": features })
}

fn property_from_spec(spec: PropertySpec) -> Result<Property> {
    Ok(match spec {
        PropertySpec::Symbol(s) => Property::Symbol(s),
        PropertySpec::Symbolset(items) => Property::SymbolSet(items.into_iter().collect()),
        PropertySpec::Point(x) => Property::Point(x),
        PropertySpec::Interval((lo, hi)) => Property::interval(lo, hi)?,
        PropertySpec::Pointset(points) => Property::PointSet(points),
        PropertySpec::Intervalset(pairs) => Property::interval_set(&pairs)?,
        PropertySpec::Negated(pairs) => {
            let members = pairs
                .into_iter()
                .map(|(lo, hi)| {
                    let lo = lo.unwrap_or(f64::NEG_INFINITY);
                    let hi = hi.unwrap_or(f64::INFINITY);
                    Closed::new(lo, hi).ok_or_else(|| {
                        Error::Malformed(format!("excluded interval [{lo}, {hi}] has lo > hi"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Property::Negated(IntervalSet::from_intervals(members))
        }
        PropertySpec::Bucket(b) => Property::Bucket(b),
    })
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x + 0.0;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// JSON number rounded to 12 significant digits; infinities become null.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(round12(x))
    } else {
        Value::Null
    }
}

/// Next 12-significant-digit value from `round12(x)` towards `x`'s side.
fn round12_toward(x: f64, up: bool) -> f64 {
    let r = round12(x);
    if (up && r >= x) || (!up && r <= x) {
        return r;
    }
    let step = 10f64.powi(r.abs().log10().floor() as i32 - 11);
    round12(if up { r + step } else { r - step })
}

/// Rounded endpoints of `[lo, hi]` that never widen it, so capped values
/// stay within their cap when read back.
fn range12(lo: f64, hi: f64) -> (f64, f64) {
    let (a, b) = (round12(lo), round12(hi));
    if !(lo.is_finite() && hi.is_finite()) || b - a <= hi - lo {
        return (a, b);
    }
    let (a, b) = (round12_toward(lo, true), round12_toward(hi, false));
    if a <= b {
        (a, b)
    } else {
        (round12(lo), round12(lo))
    }
}

fn pair(iv: &Closed) -> Value {
    let (lo, hi) = range12(iv.lo, iv.hi);
    Value::Array(vec![num(lo), num(hi)])
}

fn point_set(pts: &[f64]) -> Value {
    let (lo, hi) = range12(pts[0], pts[pts.len() - 1]);
    Value::Array(pts.iter().map(|x| num(round12(*x).clamp(lo, hi))).collect())
}

pub fn property_to_json(p: &Property) -> Value {
    match p {
        Property::Symbol(s) => json!({ "symbol": s }),
        Property::SymbolSet(set) => json!({ "symbolset": set }),
        Property::Point(x) => json!({ "point": num(*x) }),
        Property::Interval(iv) => json!({ "interval": pair(iv) }),
        Property::PointSet(pts) => json!({ "pointset": point_set(pts) }),
        Property::IntervalSet(set) => {
            json!({ "intervalset": set.members().iter().map(pair).collect::<Vec<_>>() })
        }
        Property::Negated(set) => {
            json!({ "negated": set.members().iter().map(pair).collect::<Vec<_>>() })
        }
        Property::Bucket(b) => json!({ "bucket": b }),
    }
}

pub fn parse_property(text: &str) -> Result<Property> {
    property_from_spec(parse(text)?)
}

pub fn parse_concept(schema: &Arc<FeatureSchema>, text: &str) -> Result<Concept> {
    let file: ConceptFile = parse(text)?;
    let entries = file
        .entries
        .into_iter()
        .map(|(name, spec)| Ok((schema.id_of(&name)?, property_from_spec(spec)?)))
        .collect::<Result<Vec<_>>>()?;
    Concept::new(schema.clone(), entries)
}

pub fn concept_to_json(c: &Concept) -> Value {
    let mut entries = Map::new();
    for (id, p) in c.entries() {
        let name = c
            .schema()
            .feature(id)
            .map(|f| f.name.clone())
            .unwrap_or_else(|_| id.to_string());
        entries.insert(name, property_to_json(p));
    }
    json!({ "entries": Value::Object(entries) })
}

/// Compact serialized form, used as an identity key and for ordering.
pub fn concept_key(c: &Concept) -> String {
    concept_to_json(c).to_string()
}

fn short(p: &Property) -> String {
    let fmt = |x: f64| {
        if x.is_finite() {
            round12(x).to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    };
    let ivs = |set: &IntervalSet| {
        set.members()
            .iter()
            .map(|m| format!("[{},{}]", fmt(m.lo), fmt(m.hi)))
            .collect::<Vec<_>>()
            .join("|")
    };
    match p {
        Property::Symbol(s) => s.clone(),
        Property::SymbolSet(set) => {
            format!("{{{}}}", set.iter().cloned().collect::<Vec<_>>().join(","))
        }
        Property::Point(x) => fmt(*x),
        Property::Interval(iv) => format!("[{},{}]", fmt(iv.lo), fmt(iv.hi)),
        Property::PointSet(pts) => format!(
            "{{{}}}",
            pts.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(",")
        ),
        Property::IntervalSet(set) => ivs(set),
        Property::Negated(set) => format!("not {}", ivs(set)),
        Property::Bucket(b) => format!("#{b}"),
    }
}

/// Human-readable node label, e.g. `Color=Black, Shape=Circle`; `⊥` for the
/// universal concept.
pub fn concept_label(c: &Concept) -> String {
    if c.is_universal() {
        return "⊥".to_string();
    }
    c.entries()
        .map(|(id, p)| {
            let name = c
                .schema()
                .feature(id)
                .map(|f| f.name.as_str())
                .unwrap_or("?");
            format!("{name}={}", short(p))
        })
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn parse_instance(schema: &Arc<FeatureSchema>, text: &str) -> Result<Instance> {
    let file: InstanceFile = parse(text)?;
    Instance::new(schema.clone(), file.point)
}

/// Accepts either a single instance `{"point": [...]}` or a pool
/// `{"instances": [{"point": [...]}, ...]}`.
pub fn parse_instances(schema: &Arc<FeatureSchema>, text: &str) -> Result<Vec<Instance>> {
    let value: Value = parse(text)?;
    if value.get("instances").is_some() {
        let pool: PoolFile =
            serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        pool.instances
            .into_iter()
            .map(|i| Instance::new(schema.clone(), i.point))
            .collect()
    } else {
        Ok(vec![parse_instance(schema, text)?])
    }
}

pub fn instance_to_json(i: &Instance) -> Value {
    json!({ "point": i.values().iter().map(|x| num(*x)).collect::<Vec<_>>() })
}

pub fn parse_posterior(schema: &Arc<FeatureSchema>, text: &str) -> Result<Posterior> {
    let file: PosteriorFile = parse(text)?;
    Posterior::new(schema.clone(), file.mean, file.stddev)
}

fn verdict(v: &Verdict) -> Value {
    json!({
        "holds": v.holds,
        "counterexample": v.counterexample.as_ref().map(|w| w.iter().map(concept_to_json).collect::<Vec<_>>()),
    })
}

pub fn report_to_json(r: &CheckReport) -> Value {
    json!({
        "size": r.size,
        "reflexive": verdict(&r.reflexive),
        "antisymmetric": verdict(&r.antisymmetric),
        "transitive": verdict(&r.transitive),
        "is_meet_semilattice": verdict(&r.is_meet_semilattice),
        "has_bottom": r.has_bottom,
        "join_total": r.join_total,
        "maximal_elements": r.maximal_elements.iter().map(concept_to_json).collect::<Vec<_>>(),
        "maximal_are_total": r.maximal_are_total,
        "cpo_chain_check": verdict(&r.cpo_chain_check),
        "chains_checked": r.chains_checked,
        "chains_sampled": r.chains_sampled,
    })
}

pub fn pmeet_to_json(r: &PMeetResult) -> Value {
    let schema = r.concept.schema();
    let dims: Vec<Value> = r
        .dims
        .iter()
        .zip(schema.features())
        .map(|(o, f)| match o {
            DimOutcome::Found {
                interval,
                joint_mass,
            } => json!({
                "feature": f.name,
                "outcome": "found",
                "interval": pair(interval),
                "length": num(interval.width()),
                "joint_mass": num(*joint_mass),
            }),
            DimOutcome::Dropped { best_mass } => json!({
                "feature": f.name,
                "outcome": "dropped",
                "best_mass": num(*best_mass),
            }),
        })
        .collect();
    json!({ "dimensions": dims, "concept": concept_to_json(&r.concept) })
}
