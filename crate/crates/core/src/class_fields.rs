//! Local constraints on the spinor class field of the genus of maximal orders.
//!
//! The spinor class field `Σ₀` of an `n²`-dimensional algebra is the largest
//! abelian extension of exponent `n` that is unramified at every finite
//! place, unramified at the archimedean places where the algebra splits, and
//! whose inertia degree at a finite place `v` divides `n / e_v`. We never
//! build `Σ₀`; we only test whether a quadratic profile obeys these rules.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::brauer::AlgebraDescriptor;
use crate::fraction::{FractionError, ReducedFraction};
use crate::places::{LocalBehavior, PlaceKind, PlaceSet, QuadraticProfile};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinorConstraints {
    /// Exponent bound `n` of `Gal(Σ₀/K)`.
    pub exponent: u64,
    /// Archimedean places where the algebra is a matrix algebra.
    pub archimedean_unramified: BTreeSet<String>,
    /// `n / e_v` at finite ramified places; an absent place has bound `n`.
    pub finite_inertia_bound: BTreeMap<String, u64>,
    places: std::sync::Arc<PlaceSet>,
}

impl SpinorConstraints {
    pub fn inertia_bound(&self, id: &str) -> u64 {
        self.finite_inertia_bound.get(id).copied().unwrap_or(self.exponent)
    }

    pub fn places(&self) -> &PlaceSet {
        &self.places
    }
}

pub fn spinor_classfield_constraints(algebra: &AlgebraDescriptor) -> SpinorConstraints {
    let places = algebra.places();
    let archimedean_unramified = places
        .archimedean()
        .filter(|p| algebra.local_index_at(p) == 1)
        .map(|p| p.id().to_string())
        .collect();
    let finite_inertia_bound = algebra
        .class()
        .ramification_set(Some(PlaceKind::Finite))
        .into_iter()
        .map(|p| (p.id().to_string(), algebra.degree() / algebra.local_index_at(p)))
        .collect();
    SpinorConstraints {
        exponent: algebra.degree(),
        archimedean_unramified,
        finite_inertia_bound,
        places: std::sync::Arc::clone(places),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpinorFailure {
    /// A quadratic extension cannot live in an abelian extension of odd exponent.
    OddExponent(u64),
    FiniteRamification { place: String },
    /// `E` is inert where the inertia bound is odd.
    InertiaBound { place: String, bound: u64 },
    ArchimedeanRamification { place: String },
}

impl std::fmt::Display for SpinorFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::OddExponent(n) => write!(f, "exponent {n} is odd"),
            Self::FiniteRamification { place } => write!(f, "{place}: ramified at a finite place"),
            Self::InertiaBound { place, bound } => {
                write!(f, "{place}: inert, but the inertia degree must divide {bound}")
            }
            Self::ArchimedeanRamification { place } => {
                write!(f, "{place}: ramified at an archimedean place where the algebra splits")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpinorDecision {
    Within,
    NotWithin(SpinorFailure),
}

impl SpinorDecision {
    pub fn is_within(&self) -> bool {
        matches!(self, SpinorDecision::Within)
    }
}

/// Tests the local conditions for `E` to be a subextension of `Σ₀`.
pub fn quadratic_within_spinor(quadratic: &QuadraticProfile, constraints: &SpinorConstraints) -> SpinorDecision {
    if constraints.exponent % 2 != 0 {
        return SpinorDecision::NotWithin(SpinorFailure::OddExponent(constraints.exponent));
    }
    for place in constraints.places.iter() {
        let Some(behavior) = quadratic.behavior_at(place) else {
            continue;
        };
        let id = place.id().to_string();
        let failure = match (place.kind(), behavior) {
            (PlaceKind::Finite, LocalBehavior::Ramified) => Some(SpinorFailure::FiniteRamification { place: id }),
            (PlaceKind::Finite, LocalBehavior::Inert) => {
                let bound = constraints.inertia_bound(place.id());
                (bound % 2 != 0).then_some(SpinorFailure::InertiaBound { place: id, bound })
            }
            (_, LocalBehavior::Split) => None,
            (_, _) => constraints
                .archimedean_unramified
                .contains(place.id())
                .then_some(SpinorFailure::ArchimedeanRamification { place: id }),
        };
        if let Some(f) = failure {
            return SpinorDecision::NotWithin(f);
        }
    }
    SpinorDecision::Within
}

/// Whether strong approximation holds: the algebra is not a totally definite
/// quaternion algebra.
pub fn eichler_condition(algebra: &AlgebraDescriptor, places: &PlaceSet) -> bool {
    algebra.degree() != 2
        || places.of_kind(PlaceKind::Complex).next().is_some()
        || places.of_kind(PlaceKind::Real).any(|p| algebra.local_index(p.id()).ok() == Some(1))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("representation field degree must be positive")]
pub struct ZeroDegree;

/// Proportion `1/[F:K]` of conjugacy classes of maximal orders that contain
/// a copy of the order, given the degree of its representation field `F`.
pub fn selectivity_proportion(representation_degree: u64) -> Result<ReducedFraction, ZeroDegree> {
    ReducedFraction::unit(representation_degree).map_err(|e| match e {
        FractionError::ZeroDenominator | FractionError::Malformed(_) => ZeroDegree,
    })
}
