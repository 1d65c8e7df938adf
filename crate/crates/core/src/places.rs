//! Abstract places of a number field and local splitting data of extensions.
//!
//! Places are opaque tokens carrying only their kind. Nothing here factors
//! ideals or builds completions; an extension `L/K` is described by the
//! multiset of local degrees `[L_P : K_v]` over each place `v` it declares.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::has_subset_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceKind {
    Finite,
    Real,
    Complex,
}

impl PlaceKind {
    pub fn is_archimedean(self) -> bool {
        !matches!(self, PlaceKind::Finite)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PlaceKind::Finite => "finite",
            PlaceKind::Real => "real",
            PlaceKind::Complex => "complex",
        }
    }
}

impl fmt::Display for PlaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Place {
    id: String,
    kind: PlaceKind,
    label: Option<String>,
}

impl Place {
    pub fn new(id: impl Into<String>, kind: PlaceKind) -> Self {
        Self {
            id: id.into(),
            kind,
            label: None,
        }
    }

    pub fn finite(id: impl Into<String>) -> Self {
        Self::new(id, PlaceKind::Finite)
    }

    pub fn real(id: impl Into<String>) -> Self {
        Self::new(id, PlaceKind::Real)
    }

    pub fn complex(id: impl Into<String>) -> Self {
        Self::new(id, PlaceKind::Complex)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> PlaceKind {
        self.kind
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlaceError {
    #[error("duplicate place id {0:?}")]
    DuplicateId(String),
    #[error("unknown place {0:?}")]
    UnknownPlace(String),
}

/// The places of a field, in insertion order.
#[derive(Debug, Clone)]
pub struct PlaceSet {
    places: Vec<Place>,
    index: HashMap<String, usize>,
}

impl PartialEq for PlaceSet {
    fn eq(&self, other: &Self) -> bool {
        self.places == other.places
    }
}

impl Eq for PlaceSet {}

impl PlaceSet {
    pub fn new(places: impl IntoIterator<Item = Place>) -> Result<Self, PlaceError> {
        let places: Vec<Place> = places.into_iter().collect();
        let mut index = HashMap::with_capacity(places.len());
        for (i, p) in places.iter().enumerate() {
            if index.insert(p.id.clone(), i).is_some() {
                return Err(PlaceError::DuplicateId(p.id.clone()));
            }
        }
        Ok(Self { places, index })
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Place> {
        self.places.iter()
    }

    pub fn get(&self, id: &str) -> Option<&Place> {
        self.index.get(id).map(|&i| &self.places[i])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn at(&self, position: usize) -> &Place {
        &self.places[position]
    }

    pub fn require(&self, id: &str) -> Result<&Place, PlaceError> {
        self.get(id).ok_or_else(|| PlaceError::UnknownPlace(id.to_string()))
    }

    pub fn of_kind(&self, kind: PlaceKind) -> impl Iterator<Item = &Place> {
        self.places.iter().filter(move |p| p.kind == kind)
    }

    pub fn archimedean(&self) -> impl Iterator<Item = &Place> {
        self.places.iter().filter(|p| p.kind.is_archimedean())
    }
}

impl<'a> IntoIterator for &'a PlaceSet {
    type Item = &'a Place;
    type IntoIter = std::slice::Iter<'a, Place>;

    fn into_iter(self) -> Self::IntoIter {
        self.places.iter()
    }
}

/// Local degrees of a finite extension `L/K` of degree `degree`, declared on
/// a subset of the places of `K`.
///
/// Each partition is kept sorted in non-increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldLocalData {
    degree: u64,
    splittings: BTreeMap<String, Vec<u64>>,
}

impl FieldLocalData {
    pub fn new<I, S, P>(degree: u64, splittings: I) -> Self
    where
        I: IntoIterator<Item = (S, P)>,
        S: Into<String>,
        P: Into<Vec<u64>>,
    {
        let splittings = splittings
            .into_iter()
            .map(|(id, parts)| (id.into(), canonical_partition(parts.into())))
            .collect();
        Self { degree, splittings }
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn parts_at(&self, id: &str) -> Option<&[u64]> {
        self.splittings.get(id).map(Vec::as_slice)
    }

    pub fn covers(&self, id: &str) -> bool {
        self.splittings.contains_key(id)
    }

    /// Declared place ids, sorted.
    pub fn coverage(&self) -> impl Iterator<Item = &str> {
        self.splittings.keys().map(String::as_str)
    }

    pub fn splittings(&self) -> &BTreeMap<String, Vec<u64>> {
        &self.splittings
    }
}

/// Sorts parts into non-increasing order.
pub fn canonical_partition(mut parts: Vec<u64>) -> Vec<u64> {
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalDataViolation {
    NonPositiveDegree,
    EmptyPartition { place: String },
    ZeroPart { place: String },
    SumMismatch { place: String, sum: u64, degree: u64 },
    RealPartTooLarge { place: String, part: u64 },
    ComplexNotSplit { place: String },
}

impl fmt::Display for LocalDataViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveDegree => write!(f, "degree must be positive"),
            Self::EmptyPartition { place } => write!(f, "{place}: empty partition"),
            Self::ZeroPart { place } => write!(f, "{place}: local degrees must be positive"),
            Self::SumMismatch { place, sum, degree } => {
                write!(f, "{place}: partition sums to {sum} ≠ {degree}")
            }
            Self::RealPartTooLarge { place, part } => {
                write!(f, "{place}: real place admits local degrees 1 or 2, found {part}")
            }
            Self::ComplexNotSplit { place } => {
                write!(f, "{place}: complex place must split completely")
            }
        }
    }
}

/// Checks every declared partition against the kind of its place.
///
/// An undeclared place id is a hard error rather than a violation.
pub fn validate_field_local_data(
    data: &FieldLocalData,
    places: &PlaceSet,
) -> Result<Vec<LocalDataViolation>, PlaceError> {
    let mut violations = Vec::new();
    if data.degree == 0 {
        violations.push(LocalDataViolation::NonPositiveDegree);
    }
    for id in data.splittings.keys() {
        places.require(id)?;
    }
    // report in place order
    for place in places {
        let Some(parts) = data.parts_at(place.id()) else {
            continue;
        };
        let id = place.id().to_string();
        if parts.is_empty() {
            violations.push(LocalDataViolation::EmptyPartition { place: id.clone() });
        }
        if parts.contains(&0) {
            violations.push(LocalDataViolation::ZeroPart { place: id.clone() });
        }
        let sum: u64 = parts.iter().sum();
        if sum != data.degree {
            violations.push(LocalDataViolation::SumMismatch {
                place: id.clone(),
                sum,
                degree: data.degree,
            });
        }
        match place.kind() {
            PlaceKind::Real => {
                if let Some(&part) = parts.iter().find(|&&p| p > 2) {
                    violations.push(LocalDataViolation::RealPartTooLarge { place: id, part });
                }
            }
            PlaceKind::Complex => {
                if parts.iter().any(|&p| p != 1) {
                    violations.push(LocalDataViolation::ComplexNotSplit { place: id });
                }
            }
            PlaceKind::Finite => {}
        }
    }
    Ok(violations)
}

/// Behaviour of a quadratic extension `E/K` at one place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalBehavior {
    Split,
    Inert,
    Ramified,
}

impl LocalBehavior {
    pub const ALL: [LocalBehavior; 3] = [LocalBehavior::Split, LocalBehavior::Inert, LocalBehavior::Ramified];

    pub fn as_str(self) -> &'static str {
        match self {
            LocalBehavior::Split => "split",
            LocalBehavior::Inert => "inert",
            LocalBehavior::Ramified => "ramified",
        }
    }

    /// Behaviours a quadratic extension can have at a place of this kind.
    pub fn admissible(kind: PlaceKind) -> &'static [LocalBehavior] {
        match kind {
            PlaceKind::Finite => &Self::ALL,
            PlaceKind::Real => &[LocalBehavior::Split, LocalBehavior::Ramified],
            PlaceKind::Complex => &[LocalBehavior::Split],
        }
    }

    /// Local degree `[E_Q : K_v]` of each place of `E` above `v`.
    pub fn local_degree(self) -> u64 {
        match self {
            LocalBehavior::Split => 1,
            LocalBehavior::Inert | LocalBehavior::Ramified => 2,
        }
    }
}

impl fmt::Display for LocalBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LocalBehavior {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "split" => Ok(LocalBehavior::Split),
            "inert" => Ok(LocalBehavior::Inert),
            "ramified" => Ok(LocalBehavior::Ramified),
            other => Err(format!("unknown local behaviour {other:?}")),
        }
    }
}

/// Split/inert/ramified profile of a quadratic extension `E/K`.
///
/// At a real place `ramified` means `E` is complex there. Complex places are
/// always split and need not be declared.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadraticProfile {
    behavior: BTreeMap<String, LocalBehavior>,
}

impl QuadraticProfile {
    pub fn new<I, S>(behavior: I) -> Self
    where
        I: IntoIterator<Item = (S, LocalBehavior)>,
        S: Into<String>,
    {
        Self {
            behavior: behavior.into_iter().map(|(id, b)| (id.into(), b)).collect(),
        }
    }

    /// Split at every listed place.
    pub fn all_split<'a>(ids: impl IntoIterator<Item = &'a str>) -> Self {
        Self::new(ids.into_iter().map(|id| (id, LocalBehavior::Split)))
    }

    pub fn declared(&self, id: &str) -> Option<LocalBehavior> {
        self.behavior.get(id).copied()
    }

    /// Declared behaviour, with complex places implicitly split.
    pub fn behavior_at(&self, place: &Place) -> Option<LocalBehavior> {
        match place.kind() {
            PlaceKind::Complex => Some(LocalBehavior::Split),
            _ => self.declared(place.id()),
        }
    }

    pub fn covers(&self, id: &str) -> bool {
        self.behavior.contains_key(id)
    }

    pub fn coverage(&self) -> impl Iterator<Item = &str> {
        self.behavior.keys().map(String::as_str)
    }

    pub fn entries(&self) -> &BTreeMap<String, LocalBehavior> {
        &self.behavior
    }

    pub fn without(&self, id: &str) -> Self {
        let mut out = self.clone();
        out.behavior.remove(id);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProfileViolation {
    InertAtReal { place: String },
    NonSplitAtComplex { place: String, behavior: LocalBehavior },
}

impl fmt::Display for ProfileViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InertAtReal { place } => write!(f, "{place}: a real place cannot be inert"),
            Self::NonSplitAtComplex { place, behavior } => {
                write!(f, "{place}: a complex place splits, found {behavior}")
            }
        }
    }
}

pub fn validate_quadratic_profile(
    profile: &QuadraticProfile,
    places: &PlaceSet,
) -> Result<Vec<ProfileViolation>, PlaceError> {
    for id in profile.behavior.keys() {
        places.require(id)?;
    }
    let mut violations = Vec::new();
    for place in places {
        let Some(b) = profile.declared(place.id()) else {
            continue;
        };
        match (place.kind(), b) {
            (PlaceKind::Real, LocalBehavior::Inert) => violations.push(ProfileViolation::InertAtReal {
                place: place.id().to_string(),
            }),
            (PlaceKind::Complex, b) if b != LocalBehavior::Split => {
                violations.push(ProfileViolation::NonSplitAtComplex {
                    place: place.id().to_string(),
                    behavior: b,
                })
            }
            _ => {}
        }
    }
    Ok(violations)
}

/// Whether `E` with behaviour `behavior` at `v` can sit inside an extension
/// whose local degrees over `v` are `parts` (summing to `degree`).
///
/// Over a split place the places of `L` must be shared out between the two
/// places of `E`, each receiving total degree `degree/2`. Over an inert or
/// ramified place every local degree must be even.
pub fn locally_contains(parts: &[u64], degree: u64, behavior: LocalBehavior) -> bool {
    if degree % 2 != 0 {
        return false;
    }
    match behavior {
        LocalBehavior::Split => has_subset_sum(parts, degree / 2),
        LocalBehavior::Inert | LocalBehavior::Ramified => parts.iter().all(|p| p % 2 == 0),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalCompatibility {
    Compatible,
    /// Some local degree of `L` is odd, so no quadratic local field fits inside.
    OddLocalDegree { behavior: LocalBehavior, part: u64 },
    /// `E` splits but the local degrees of `L` cannot be halved.
    NoBalancedSplit,
    /// Declared in only one of `L`, `E`.
    Unchecked,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityReport {
    pub entries: Vec<(String, LocalCompatibility)>,
}

impl CompatibilityReport {
    pub fn is_compatible(&self) -> bool {
        self.witness().is_none()
    }

    /// First incompatible place in place order.
    pub fn witness(&self) -> Option<(&str, &LocalCompatibility)> {
        self.entries
            .iter()
            .find(|(_, c)| !matches!(c, LocalCompatibility::Compatible | LocalCompatibility::Unchecked))
            .map(|(id, c)| (id.as_str(), c))
    }

    pub fn unchecked(&self) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter(|(_, c)| *c == LocalCompatibility::Unchecked)
            .map(|(id, _)| id.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompatibilityError {
    #[error("[L:K] = {0} is odd, so L has no quadratic subfield")]
    OddDegree(u64),
    #[error(transparent)]
    Place(#[from] PlaceError),
}

/// Local test for `E ⊆ L`, place by place, composing
/// `[L_P : K_v] = [L_P : E_Q]·[E_Q : K_v]`.
pub fn quadratic_compatible_with(
    field: &FieldLocalData,
    quadratic: &QuadraticProfile,
    places: &PlaceSet,
) -> Result<CompatibilityReport, CompatibilityError> {
    if field.degree % 2 != 0 {
        return Err(CompatibilityError::OddDegree(field.degree));
    }
    for id in field.coverage().chain(quadratic.coverage()) {
        places.require(id)?;
    }
    let mut entries = Vec::new();
    for place in places {
        let parts = field.parts_at(place.id());
        let behavior = quadratic.behavior_at(place);
        let status = match (parts, behavior) {
            (None, None) => continue,
            (Some(parts), Some(b)) => check_local(parts, field.degree, b),
            _ => {
                // complex places are implicitly split, so only report them when L declares them
                if parts.is_none() && place.kind() == PlaceKind::Complex {
                    continue;
                }
                LocalCompatibility::Unchecked
            }
        };
        entries.push((place.id().to_string(), status));
    }
    Ok(CompatibilityReport { entries })
}

fn check_local(parts: &[u64], degree: u64, behavior: LocalBehavior) -> LocalCompatibility {
    if locally_contains(parts, degree, behavior) {
        return LocalCompatibility::Compatible;
    }
    match behavior {
        LocalBehavior::Split => LocalCompatibility::NoBalancedSplit,
        b => LocalCompatibility::OddLocalDegree {
            behavior: b,
            part: parts.iter().copied().find(|p| p % 2 != 0).unwrap_or(0),
        },
    }
}
