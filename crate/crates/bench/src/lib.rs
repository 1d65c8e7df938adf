//! Shared inputs for the benchmarks.

use std::sync::Arc;

use hasse_core::{AlgebraDescriptor, BrauerClass, FieldLocalData, LocalBehavior, Place, PlaceSet, QuadraticProfile};

pub fn places() -> Arc<PlaceSet> {
    Arc::new(
        PlaceSet::new([
            Place::real("v1"),
            Place::real("v2"),
            Place::complex("w"),
            Place::finite("p1"),
            Place::finite("p2"),
            Place::finite("p3"),
        ])
        .expect("distinct ids"),
    )
}

/// The degree-6 algebra, field, and quadratic subfield of the standard example.
pub fn fixture() -> (AlgebraDescriptor, FieldLocalData, QuadraticProfile) {
    let raw = [("v1", "1/2"), ("v2", "1/2"), ("p1", "1/3"), ("p2", "2/3")];
    let class = BrauerClass::validate(raw.map(|(p, v)| (p, v.parse().expect("literal"))), places())
        .expect("valid class");
    let algebra = AlgebraDescriptor::new(class, 6).expect("order divides degree");
    let field = FieldLocalData::new(
        6,
        [
            ("v1", vec![2, 2, 2]),
            ("v2", vec![2, 2, 2]),
            ("w", vec![1; 6]),
            ("p1", vec![6]),
            ("p2", vec![3, 3]),
            ("p3", vec![1; 6]),
        ],
    );
    let quadratic = QuadraticProfile::new([
        ("v1", LocalBehavior::Ramified),
        ("v2", LocalBehavior::Ramified),
        ("p1", LocalBehavior::Inert),
        ("p2", LocalBehavior::Split),
        ("p3", LocalBehavior::Split),
    ]);
    (algebra, field, quadratic)
}
