//! Concept algebra over learned feature dimensions.
//!
//! Concepts are partial maps from feature dimensions to properties, ordered
//! by subsumption. The crate provides the order, generalisation (meet),
//! unification (join) and relative-complement difference over discrete,
//! disjunctive, point, interval, point-set and partition domains; a
//! brute-force verifier for finite spaces; and probabilistic meets of two
//! diagonal Gaussian posteriors.

pub mod cli;
pub mod continuous;
pub mod error;
pub mod fixtures;
pub mod order;
pub mod prob;
pub mod region;
pub mod schema;
pub mod verify;
pub mod wire;

pub use continuous::{
    disj_join, disj_meet, guard_base_meet, negate, region_subset, DisjunctiveProperty, MeetContext,
    NegatedProperty,
};
pub use error::{Error, Result};
pub use order::{
    concept_diff, extension, generalise, prop_leq, subsumes, to_concept, unify, Concept, Instance,
    MeetJoinResult,
};
pub use prob::{
    concept_prob, max_mass_interval, probabilistic_meet, DimOutcome, PMeetConfig, PMeetResult,
    Posterior,
};
pub use region::{Closed, IntervalSet};
pub use schema::{
    canonicalize, validate_property, FeatureId, FeatureSchema, Property, ValueDomain,
};
pub use verify::{CheckConfig, CheckReport, FiniteSpace};
