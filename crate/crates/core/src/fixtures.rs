//! Small reference schemas used by tests, the acceptance suite and the CLI
//! fixtures.

use std::collections::BTreeSet;

use crate::schema::{FeatureSchema, ValueDomain};

fn symbols(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Colour, shape, weight and position with the five/four/three/five valued
/// symbol sets of the running Cannonball example.
pub fn shapes_schema() -> FeatureSchema {
    FeatureSchema::new([
        (
            "Color",
            ValueDomain::Discrete {
                symbols: symbols(&["Red", "Blue", "Green", "Black", "White"]),
            },
        ),
        (
            "Shape",
            ValueDomain::Discrete {
                symbols: symbols(&["Circle", "Square", "Triangle", "Diamond"]),
            },
        ),
        (
            "Weight",
            ValueDomain::Discrete {
                symbols: symbols(&["Light", "Medium", "Heavy"]),
            },
        ),
        (
            "Position",
            ValueDomain::Discrete {
                symbols: symbols(&["Center", "TopLeft", "TopRight", "BottomLeft", "BottomRight"]),
            },
        ),
    ])
    .expect("valid schema")
}

/// Four features with two values each.
pub fn binary_schema() -> FeatureSchema {
    FeatureSchema::new([
        (
            "Color",
            ValueDomain::Discrete {
                symbols: symbols(&["Red", "Blue"]),
            },
        ),
        (
            "Shape",
            ValueDomain::Discrete {
                symbols: symbols(&["Circle", "Square"]),
            },
        ),
        (
            "Weight",
            ValueDomain::Discrete {
                symbols: symbols(&["Light", "Heavy"]),
            },
        ),
        (
            "Position",
            ValueDomain::Discrete {
                symbols: symbols(&["Top", "Bottom"]),
            },
        ),
    ])
    .expect("valid schema")
}

/// A single disjunctive colour feature over four colours.
pub fn color_disjunction_schema() -> FeatureSchema {
    FeatureSchema::new([(
        "Color",
        ValueDomain::Disjunctive {
            symbols: symbols(&["Black", "White", "Red", "Blue"]),
        },
    )])
    .expect("valid schema")
}

/// Three features each holding a single symbol; its space is the powerset
/// of the three features under inclusion.
pub fn powerset_schema() -> FeatureSchema {
    FeatureSchema::new(["a", "b", "c"].map(|name| {
        (
            name,
            ValueDomain::Discrete {
                symbols: symbols(&["on"]),
            },
        )
    }))
    .expect("valid schema")
}

/// Two partitioned dimensions: three buckets and two buckets.
pub fn partition_schema() -> FeatureSchema {
    FeatureSchema::new([
        (
            "hue",
            ValueDomain::Partition {
                cutoffs: vec![-1.0, 1.0],
            },
        ),
        ("size", ValueDomain::Partition { cutoffs: vec![0.0] }),
    ])
    .expect("valid schema")
}

/// `features` discrete dimensions with `values` symbols each (`v0`, `v1`, ...).
pub fn grid_schema(features: usize, values: usize) -> FeatureSchema {
    let syms: BTreeSet<String> = (0..values).map(|v| format!("v{v}")).collect();
    FeatureSchema::new((0..features).map(|f| {
        (
            format!("f{f}"),
            ValueDomain::Discrete {
                symbols: syms.clone(),
            },
        )
    }))
    .expect("valid schema")
}

/// Single colour dimension carrying the interval colours below.
pub fn color_line_schema() -> FeatureSchema {
    FeatureSchema::new([("Color", ValueDomain::Interval { epsilon: 1.0 })]).expect("valid schema")
}

/// Colour intervals on one dimension; all disjoint except `DARK_RED ⊂ RED`.
pub const BLUE: (f64, f64) = (0.0, 1.0);
pub const GREEN: (f64, f64) = (1.5, 2.5);
pub const RED: (f64, f64) = (3.0, 4.0);
pub const DARK_RED: (f64, f64) = (3.4, 3.8);
