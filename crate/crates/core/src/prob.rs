//! Propagating diagonal Gaussian posteriors into the interval space, and
//! probabilistic meets of two posteriors.
//!
//! The probability of a concept is the posterior mass of its extension. With
//! a diagonal covariance the dimensions factorize, so the mass is a product of
//! one-dimensional Gaussian masses over each specified property's region.
//!
//! A probabilistic meet looks, per dimension, for the shortest interval no
//! longer than `2ε` whose joint mass `m1([a,b]) * m2([a,b])` reaches a
//! threshold; dimensions where no such interval exists are dropped. For a
//! fixed length the joint mass is log-concave in the interval's position (each
//! factor is a log-concave density integrated over a sliding window), so a
//! grid scan followed by a local golden-section refinement finds the best
//! placement.

use std::sync::Arc;

use libm::erfc;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::order::{same_schema, Concept};
use crate::region::Closed;
use crate::schema::{FeatureId, FeatureSchema, Property, ValueDomain};

/// Standard normal lower tail `Φ(z)`.
pub fn std_normal_cdf(z: f64) -> f64 {
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    if z == f64::INFINITY {
        return 1.0;
    }
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal upper tail `1 - Φ(z)`, without cancellation.
pub fn std_normal_sf(z: f64) -> f64 {
    std_normal_cdf(-z)
}

/// One-dimensional Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub mean: f64,
    pub stddev: f64,
}

impl Gaussian {
    /// Mass of `[lo, hi]`; endpoints may be infinite.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
            return 0.0;
        }
        let a = (lo - self.mean) / self.stddev;
        let b = (hi - self.mean) / self.stddev;
        let m = if a >= 0.0 {
            std_normal_sf(a) - std_normal_sf(b)
        } else if b <= 0.0 {
            std_normal_cdf(b) - std_normal_cdf(a)
        } else {
            1.0 - std_normal_cdf(a) - std_normal_sf(b)
        };
        m.clamp(0.0, 1.0)
    }

    /// Mass of a property's region. Points and finite point sets carry none.
    pub fn region_mass(&self, p: &Property) -> Result<f64> {
        Ok(match p {
            Property::Point(_) | Property::PointSet(_) => 0.0,
            Property::Interval(iv) => self.mass(iv.lo, iv.hi),
            Property::IntervalSet(set) => set
                .members()
                .iter()
                .map(|m| self.mass(m.lo, m.hi))
                .sum::<f64>()
                .min(1.0),
            Property::Negated(excluded) => {
                let out: f64 = excluded
                    .members()
                    .iter()
                    .map(|m| self.mass(m.lo, m.hi))
                    .sum();
                (1.0 - out).clamp(0.0, 1.0)
            }
            other => {
                return Err(Error::DomainMismatch {
                    feature: String::new(),
                    detail: format!("{} property has no region on the real line", other.kind()),
                })
            }
        })
    }
}

/// Diagonal Gaussian posterior `p(z|x)` over a schema's dimensions.
#[derive(Debug, Clone)]
pub struct Posterior {
    schema: Arc<FeatureSchema>,
    dims: Vec<Gaussian>,
}

impl Posterior {
    pub fn new(schema: Arc<FeatureSchema>, mean: Vec<f64>, stddev: Vec<f64>) -> Result<Self> {
        if mean.len() != schema.len() {
            return Err(Error::DimensionMismatch {
                expected: schema.len(),
                got: mean.len(),
            });
        }
        if stddev.len() != schema.len() {
            return Err(Error::DimensionMismatch {
                expected: schema.len(),
                got: stddev.len(),
            });
        }
        if let Some(m) = mean.iter().find(|m| !m.is_finite()) {
            return Err(Error::Malformed(format!(
                "posterior mean {m} is not finite"
            )));
        }
        if let Some(s) = stddev.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::Malformed(format!(
                "posterior stddev {s} must be positive"
            )));
        }
        let dims = mean
            .into_iter()
            .zip(stddev)
            .map(|(mean, stddev)| Gaussian { mean, stddev })
            .collect();
        Ok(Posterior { schema, dims })
    }

    pub fn schema(&self) -> &Arc<FeatureSchema> {
        &self.schema
    }

    pub fn dims(&self) -> &[Gaussian] {
        &self.dims
    }

    pub fn dim(&self, i: usize) -> Gaussian {
        self.dims[i]
    }
}

/// `p(C|x)`: product over specified dimensions of the posterior mass of each
/// property's region. Buckets cover their cell between cutoffs. The universal
/// concept has probability 1.
pub fn concept_prob(c: &Concept, post: &Posterior) -> Result<f64> {
    if !same_schema(c.schema(), &post.schema) {
        return Err(Error::SchemaMismatch);
    }
    let mut p = 1.0;
    for (id, prop) in c.entries() {
        let feature = c.schema().feature(id)?;
        let name = &feature.name;
        let g = post.dims[id.0];
        if let (Property::Bucket(b), ValueDomain::Partition { cutoffs }) = (prop, &feature.domain) {
            let lo = if *b == 0 {
                f64::NEG_INFINITY
            } else {
                cutoffs[b - 1]
            };
            let hi = cutoffs.get(*b).copied().unwrap_or(f64::INFINITY);
            p *= g.mass(lo, hi);
            continue;
        }
        p *= g.region_mass(prop).map_err(|e| match e {
            Error::DomainMismatch { detail, .. } => Error::DomainMismatch {
                feature: name.clone(),
                detail,
            },
            e => e,
        })?;
    }
    Ok(p)
}

/// Joint mass `m1([lo,hi]) * m2([lo,hi])`.
pub fn joint_mass(g1: &Gaussian, g2: &Gaussian, lo: f64, hi: f64) -> f64 {
    g1.mass(lo, hi) * g2.mass(lo, hi)
}

/// Interval `[lo, lo + length]` whose width never exceeds `length` after
/// rounding.
fn placed(center: f64, length: f64) -> Closed {
    let lo = center - length / 2.0;
    let mut hi = lo + length;
    while hi - lo > length {
        hi = hi.next_down();
    }
    Closed { lo, hi: hi.max(lo) }
}

/// Best placement of an interval of the given length: maximal joint mass,
/// ties going to the smallest left endpoint.
pub fn best_placement(g1: &Gaussian, g2: &Gaussian, length: f64, resolution: f64) -> (Closed, f64) {
    let spread = g1.stddev.max(g2.stddev);
    let from = g1.mean.min(g2.mean) - 6.0 * spread;
    let to = g1.mean.max(g2.mean) + 6.0 * spread;
    let objective = |c: f64| {
        let iv = placed(c, length);
        joint_mass(g1, g2, iv.lo, iv.hi)
    };
    let steps = ((to - from) / resolution).ceil().max(1.0) as usize;
    let mut best_c = from;
    let mut best_m = objective(from);
    for k in 1..=steps {
        let c = from + k as f64 * resolution;
        let m = objective(c);
        if m > best_m {
            best_m = m;
            best_c = c;
        }
    }
    // golden-section refinement inside the bracketing grid cells
    let (mut a, mut b) = (
        (best_c - resolution).max(from),
        (best_c + resolution).min(to),
    );
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (objective(x1), objective(x2));
    for _ in 0..80 {
        if b - a <= resolution * 1e-9 {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        }
    }
    let (rc, rm) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if rm > best_m {
        best_c = rc;
        best_m = rm;
    }
    (placed(best_c, length), best_m)
}

/// Maximum-joint-mass interval of length exactly `2ε` on one dimension.
pub fn max_mass_interval(
    post1: &Posterior,
    post2: &Posterior,
    dim: usize,
    epsilon: f64,
) -> Result<(Closed, f64)> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Config(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let (g1, g2) = dims_at(post1, post2, dim)?;
    Ok(best_placement(&g1, &g2, 2.0 * epsilon, 1e-3 * epsilon))
}

fn dims_at(post1: &Posterior, post2: &Posterior, dim: usize) -> Result<(Gaussian, Gaussian)> {
    if !same_schema(&post1.schema, &post2.schema) {
        return Err(Error::SchemaMismatch);
    }
    match (post1.dims.get(dim), post2.dims.get(dim)) {
        (Some(a), Some(b)) => Ok((*a, *b)),
        _ => Err(Error::UnknownFeature(FeatureId(dim).to_string())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PMeetConfig {
    /// Minimum joint mass for a dimension to be kept, in `(0, 1)`.
    pub threshold: f64,
    /// Per-dimension half of the maximum interval length.
    pub epsilon: Vec<f64>,
    /// Grid step for the placement search; defaults to `1e-3 * ε` per dimension.
    pub resolution: Option<f64>,
    /// Slack allowed when comparing masses against the threshold.
    pub tolerance: f64,
}

impl PMeetConfig {
    pub const DEFAULT_THRESHOLD: f64 = 0.9;
    pub const DEFAULT_TOLERANCE: f64 = 1e-12;

    /// Threshold 0.9 with each dimension's ε taken from an interval schema.
    pub fn from_schema(schema: &FeatureSchema) -> Result<Self> {
        let epsilon = schema
            .features()
            .iter()
            .map(|f| match f.domain {
                ValueDomain::Interval { epsilon } => Ok(epsilon),
                _ => Err(Error::DomainMismatch {
                    feature: f.name.clone(),
                    detail: "probabilistic meets need interval domains".into(),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PMeetConfig {
            threshold: Self::DEFAULT_THRESHOLD,
            epsilon,
            resolution: None,
            tolerance: Self::DEFAULT_TOLERANCE,
        })
    }

    pub fn resolution_for(&self, dim: usize) -> f64 {
        self.resolution.unwrap_or(1e-3 * self.epsilon[dim])
    }

    fn validate(&self, schema: &FeatureSchema) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Config(format!(
                "threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        if let Some(r) = self.resolution {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::Config(format!(
                    "resolution must be positive, got {r}"
                )));
            }
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::Config(format!(
                "tolerance must be non-negative, got {}",
                self.tolerance
            )));
        }
        if self.epsilon.len() != schema.len() {
            return Err(Error::Config(format!(
                "{} epsilon values given for {} dimensions",
                self.epsilon.len(),
                schema.len()
            )));
        }
        for (f, &eps) in schema.features().iter().zip(&self.epsilon) {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::Config(format!(
                    "epsilon for `{}` must be positive, got {eps}",
                    f.name
                )));
            }
            match f.domain {
                ValueDomain::Interval { epsilon } if eps <= epsilon => {}
                ValueDomain::Interval { epsilon } => {
                    return Err(Error::Config(format!(
                        "epsilon {eps} for `{}` exceeds the schema cap {epsilon}",
                        f.name
                    )))
                }
                _ => {
                    return Err(Error::DomainMismatch {
                        feature: f.name.clone(),
                        detail: "probabilistic meets need interval domains".into(),
                    })
                }
            }
        }
        Ok(())
    }

    fn meets(&self, mass: f64) -> bool {
        mass >= self.threshold - self.tolerance
    }
}

/// Per-dimension result of a probabilistic meet.
#[derive(Debug, Clone, PartialEq)]
pub enum DimOutcome {
    Found {
        interval: Closed,
        joint_mass: f64,
    },
    /// No interval within `2ε` reaches the threshold; `best_mass` is what the
    /// full-length interval achieves.
    Dropped {
        best_mass: f64,
    },
}

impl DimOutcome {
    pub fn interval(&self) -> Option<Closed> {
        match self {
            DimOutcome::Found { interval, .. } => Some(*interval),
            DimOutcome::Dropped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PMeetResult {
    pub dims: Vec<DimOutcome>,
    /// Concept over the found dimensions; universal when all were dropped.
    pub concept: Concept,
}

/// Smallest threshold-reaching interval for one dimension.
pub fn pmeet_dimension(
    g1: &Gaussian,
    g2: &Gaussian,
    epsilon: f64,
    resolution: f64,
    config: &PMeetConfig,
) -> DimOutcome {
    let cap = 2.0 * epsilon;
    let (full, full_mass) = best_placement(g1, g2, cap, resolution);
    if !config.meets(full_mass) {
        return DimOutcome::Dropped {
            best_mass: full_mass,
        };
    }
    let (mut lo, mut hi) = (0.0, cap);
    let mut best = (full, full_mass);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        let candidate = best_placement(g1, g2, mid, resolution);
        if config.meets(candidate.1) {
            hi = mid;
            best = candidate;
        } else {
            lo = mid;
        }
    }
    DimOutcome::Found {
        interval: best.0,
        joint_mass: best.1,
    }
}

/// Probabilistic meet of two posteriors, dimension by dimension.
pub fn probabilistic_meet(
    post1: &Posterior,
    post2: &Posterior,
    config: &PMeetConfig,
) -> Result<PMeetResult> {
    if !same_schema(&post1.schema, &post2.schema) {
        return Err(Error::SchemaMismatch);
    }
    let schema = post1.schema.clone();
    config.validate(&schema)?;
    let dims: Vec<DimOutcome> = (0..schema.len())
        .into_par_iter()
        .map(|d| {
            pmeet_dimension(
                &post1.dims[d],
                &post2.dims[d],
                config.epsilon[d],
                config.resolution_for(d),
                config,
            )
        })
        .collect();
    let entries = dims.iter().enumerate().filter_map(|(d, o)| {
        o.interval()
            .map(|iv| (FeatureId(d), Property::Interval(iv)))
    });
    let concept = Concept::new(schema, entries)?;
    Ok(PMeetResult { dims, concept })
}
