//! Selectivity of the maximal order of a maximal subfield `L` in a central
//! division algebra `B`.
//!
//! `𝒪_L` can only be selective when `n = deg B` is twice an odd number and
//! every finite local index of `B` is odd. Then `B = B₁ ⊗ B₂` with `B₁` the
//! quaternion algebra ramified exactly at the real places `T` where `B`
//! ramifies, and `B₂` of odd degree `n/2` carrying the finite invariants.
//! Selectivity then holds exactly when `L` contains a quadratic `E/K` that is
//! selective for `B₁`, in which case `𝒪_L` embeds in half of the conjugacy
//! classes of maximal orders.
//!
//! The representation field `F ⊆ L ∩ Σ` is never built; the engine only
//! decides between `[F:K] = 1` and `[F:K] = 2`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::arith::{prime_divisors, valuation};
use crate::brauer::{AlgebraDescriptor, BrauerClass, BrauerError};
use crate::class_fields::{
    eichler_condition, quadratic_within_spinor, selectivity_proportion, spinor_classfield_constraints,
    SpinorDecision,
};
use crate::embeddings::{
    embeds_as_maximal_subfield, quadratic_embeds_in_quaternion, EmbeddingDecision, EmbeddingError,
    QuadraticEmbedding,
};
use crate::fraction::{QMod1, ReducedFraction};
use crate::places::{
    locally_contains, quadratic_compatible_with, validate_field_local_data, validate_quadratic_profile,
    CompatibilityError, FieldLocalData, LocalBehavior, LocalCompatibility, LocalDataViolation, PlaceError,
    PlaceKind, ProfileViolation, QuadraticProfile,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("algebra of degree {degree} has class order {order}; a division algebra is required")]
    NotDivision { degree: u64, order: u64 },
    #[error("{} failed: {}", .0.kind.condition(), .0.narrative)]
    ConditionFailed(Obstruction),
    #[error("the field does not embed in the algebra")]
    NotEmbedded,
    #[error("invalid field data: {}", join(.0))]
    InvalidField(Vec<LocalDataViolation>),
    #[error("invalid quadratic profile: {}", join(.0))]
    InvalidProfile(Vec<ProfileViolation>),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Brauer(#[from] BrauerError),
    #[error(transparent)]
    Place(#[from] PlaceError),
    #[error(transparent)]
    Compatibility(#[from] CompatibilityError),
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObstructionKind {
    DegreeNotTwiceOdd,
    EvenFiniteRamification,
    NoEmbedding,
    NoSelectiveQuadratic,
}

impl ObstructionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObstructionKind::DegreeNotTwiceOdd => "degree_not_twice_odd",
            ObstructionKind::EvenFiniteRamification => "even_finite_ramification",
            ObstructionKind::NoEmbedding => "no_embedding",
            ObstructionKind::NoSelectiveQuadratic => "no_selective_quadratic",
        }
    }

    /// Short name of the condition this obstruction violates.
    pub fn condition(self) -> &'static str {
        match self {
            ObstructionKind::DegreeNotTwiceOdd => "degree condition",
            ObstructionKind::EvenFiniteRamification => "finite-odd condition",
            ObstructionKind::NoEmbedding => "embedding condition",
            ObstructionKind::NoSelectiveQuadratic => "quadratic subfield condition",
        }
    }
}

impl fmt::Display for ObstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub place: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    pub kind: ObstructionKind,
    pub witness: Option<Witness>,
    pub narrative: String,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.narrative)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Holds,
    Fails(Obstruction),
}

impl Condition {
    pub fn holds(&self) -> bool {
        matches!(self, Condition::Holds)
    }

    pub fn obstruction(&self) -> Option<&Obstruction> {
        match self {
            Condition::Holds => None,
            Condition::Fails(o) => Some(o),
        }
    }
}

fn require_division(algebra: &AlgebraDescriptor) -> Result<(), EngineError> {
    if algebra.is_division() {
        Ok(())
    } else {
        Err(EngineError::NotDivision {
            degree: algebra.degree(),
            order: algebra.class_order(),
        })
    }
}

/// Condition (1): `n` is twice an odd number, i.e. `v₂(n) = 1`.
pub fn check_degree_condition(algebra: &AlgebraDescriptor) -> Result<Condition, EngineError> {
    require_division(algebra)?;
    let n = algebra.degree();
    if valuation(n, 2) == 1 {
        return Ok(Condition::Holds);
    }
    let narrative = if n % 2 == 1 {
        format!("degree {n} is odd")
    } else {
        format!("4 divides the degree {n}")
    };
    Ok(Condition::Fails(Obstruction {
        kind: ObstructionKind::DegreeNotTwiceOdd,
        witness: None,
        narrative,
    }))
}

/// Condition (2): every finite local index is odd.
pub fn check_finite_odd_condition(algebra: &AlgebraDescriptor) -> Condition {
    let offending = algebra
        .class()
        .support()
        .find(|(p, v)| p.kind() == PlaceKind::Finite && v.order_u64().map_or(true, |e| e % 2 == 0));
    match offending {
        None => Condition::Holds,
        Some((place, value)) => Condition::Fails(Obstruction {
            kind: ObstructionKind::EvenFiniteRamification,
            witness: Some(Witness {
                place: place.id().to_string(),
                value: value.to_string(),
            }),
            narrative: format!(
                "local index {} at finite place {} is even",
                value.order(),
                place.id()
            ),
        }),
    }
}

/// The local argument at a finite place `v` whose local index is divisible
/// by `p^t`, `t = v_p(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDivisibility {
    pub place: String,
    pub local_index: u64,
    /// `n / e_v`, which bounds the inertia degree of `Σ` (and of `F`) at `v`.
    pub inertia_bound: u64,
    /// Local degrees `[L_P : K_v]`, each divisible by `p^t`.
    pub local_degrees: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleConclusion {
    /// `p ∤ [F:K]`.
    PrimeExcluded,
    /// Every `p`-primary witness is archimedean; nothing follows.
    Inconclusive,
}

/// Certificate for the divisibility argument excluding `p` from `[F:K]`.
///
/// At a finite place `v` with `p^t | e_v`, the inertia degree of the
/// representation field is prime to `p` and `F/K` is unramified, while every
/// `[L_P : K_v]` is divisible by `e_v`. Hence `p^t | [L_P : F_w]` for every
/// `P | w | v`, so `p^t` divides `[L:F] = Σ_{P|w} [L_P : F_w]`, and since
/// `v_p(n) = t` the prime `p` cannot divide `[F:K]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityCertificate {
    pub prime: u64,
    pub exponent: u32,
    pub prime_power: u64,
    /// First `p`-primary witness in place order, archimedean or not.
    pub witness: String,
    pub local: Option<LocalDivisibility>,
    pub conclusion: OracleConclusion,
}

pub fn divisibility_obstruction_oracle(
    algebra: &AlgebraDescriptor,
    field: &FieldLocalData,
    p: u64,
) -> Result<DivisibilityCertificate, EngineError> {
    let witnesses = algebra.p_primary_witnesses(p)?;
    if !embeds_as_maximal_subfield(field, algebra)?.embeds() {
        return Err(EngineError::NotEmbedded);
    }
    let n = algebra.degree();
    let exponent = valuation(n, p);
    let prime_power = p.pow(exponent);
    let witness = witnesses[0].id().to_string();
    let finite = witnesses.iter().find(|w| w.kind() == PlaceKind::Finite);
    let Some(place) = finite else {
        return Ok(DivisibilityCertificate {
            prime: p,
            exponent,
            prime_power,
            witness,
            local: None,
            conclusion: OracleConclusion::Inconclusive,
        });
    };
    let local_index = algebra.local_index_at(place);
    let inertia_bound = n / local_index;
    let local_degrees = field
        .parts_at(place.id())
        .ok_or_else(|| EmbeddingError::MissingCoverage(place.id().to_string()))?
        .to_vec();
    debug_assert_eq!(local_index % prime_power, 0);
    debug_assert_ne!(inertia_bound % p, 0);
    debug_assert!(local_degrees.iter().all(|d| d % prime_power == 0));
    Ok(DivisibilityCertificate {
        prime: p,
        exponent,
        prime_power,
        witness,
        local: Some(LocalDivisibility {
            place: place.id().to_string(),
            local_index,
            inertia_bound,
            local_degrees,
        }),
        conclusion: OracleConclusion::PrimeExcluded,
    })
}

/// `B = B₁ ⊗ B₂` with `B₁` quaternion and `B₂` of odd degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub quaternion_part: AlgebraDescriptor,
    pub odd_part: AlgebraDescriptor,
    /// Real places where `B` ramifies, in place order.
    pub real_ramified: Vec<String>,
}

impl Decomposition {
    /// `B` itself is a quaternion algebra.
    pub fn is_quaternion_case(&self) -> bool {
        self.odd_part.degree() == 1
    }
}

pub fn decompose(algebra: &AlgebraDescriptor) -> Result<Decomposition, EngineError> {
    if let Condition::Fails(o) = check_degree_condition(algebra)? {
        return Err(EngineError::ConditionFailed(o));
    }
    if let Condition::Fails(o) = check_finite_odd_condition(algebra) {
        return Err(EngineError::ConditionFailed(o));
    }
    let class = algebra.class();
    let places = Arc::clone(class.places());
    let real_ramified: Vec<String> = class
        .ramification_set(Some(PlaceKind::Real))
        .into_iter()
        .map(|p| p.id().to_string())
        .collect();
    // The finite invariants have odd order, so the 2-torsion part of the
    // invariant sum is |T|/2 and must vanish on its own.
    assert!(real_ramified.len() % 2 == 0, "odd number of real ramified places in {class}");

    let quaternion_class =
        BrauerClass::validate(real_ramified.iter().map(|id| (id, QMod1::half())), Arc::clone(&places))?;
    let odd_class = class.restrict_unchecked(|p| p.kind() == PlaceKind::Finite);
    debug_assert!(odd_class.sum().is_zero());

    let n = algebra.degree();
    let quaternion_part = AlgebraDescriptor::new(quaternion_class, 2)?;
    let odd_part = AlgebraDescriptor::new(odd_class, n / 2)?;
    debug_assert_eq!(quaternion_part.class().tensor(odd_part.class())?, *class);
    debug_assert!(odd_part.is_division());
    Ok(Decomposition {
        quaternion_part,
        odd_part,
        real_ramified,
    })
}

/// A subset of {split, inert, ramified}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BehaviorSet(u8);

impl BehaviorSet {
    pub const EMPTY: BehaviorSet = BehaviorSet(0);

    fn bit(b: LocalBehavior) -> u8 {
        match b {
            LocalBehavior::Split => 1,
            LocalBehavior::Inert => 2,
            LocalBehavior::Ramified => 4,
        }
    }

    pub fn of(behaviors: &[LocalBehavior]) -> Self {
        BehaviorSet(behaviors.iter().fold(0, |acc, &b| acc | Self::bit(b)))
    }

    pub fn contains(self, b: LocalBehavior) -> bool {
        self.0 & Self::bit(b) != 0
    }

    pub fn intersect(self, other: Self) -> Self {
        BehaviorSet(self.0 & other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = LocalBehavior> {
        LocalBehavior::ALL.into_iter().filter(move |&b| self.contains(b))
    }
}

/// Named form of a per-place constraint on `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Requirement {
    Unconstrained,
    MustSplit,
    MustBeUnramified,
    MustBeInert,
    MustRamify,
    MustNotSplit,
    MustNotBeInert,
    Unsatisfiable,
}

impl Requirement {
    fn classify(allowed: BehaviorSet, kind: PlaceKind) -> Self {
        use LocalBehavior::*;
        if allowed.is_empty() {
            return Requirement::Unsatisfiable;
        }
        if allowed == BehaviorSet::of(LocalBehavior::admissible(kind)) {
            return Requirement::Unconstrained;
        }
        match allowed {
            a if a == BehaviorSet::of(&[Split]) => Requirement::MustSplit,
            a if a == BehaviorSet::of(&[Ramified]) => Requirement::MustRamify,
            a if a == BehaviorSet::of(&[Inert]) => Requirement::MustBeInert,
            a if a == BehaviorSet::of(&[Split, Inert]) => Requirement::MustBeUnramified,
            a if a == BehaviorSet::of(&[Inert, Ramified]) => Requirement::MustNotSplit,
            _ => Requirement::MustNotBeInert,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Requirement::Unconstrained => "unconstrained",
            Requirement::MustSplit => "must_split",
            Requirement::MustBeUnramified => "must_be_unramified",
            Requirement::MustBeInert => "must_be_inert",
            Requirement::MustRamify => "must_ramify",
            Requirement::MustNotSplit => "must_not_split",
            Requirement::MustNotBeInert => "must_not_be_inert",
            Requirement::Unsatisfiable => "unsatisfiable",
        }
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintEntry {
    pub place: String,
    pub kind: PlaceKind,
    pub allowed: BehaviorSet,
    pub requirement: Requirement,
    /// Why each narrowing of `allowed` happened, in the order applied.
    pub provenance: Vec<String>,
    /// `E` must declare its behaviour here.
    pub coverage_required: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub place: String,
    pub first: String,
    pub second: String,
}

/// Per-place behaviour a selective quadratic subfield `E ⊆ L` must have.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticConstraintTable {
    pub entries: Vec<ConstraintEntry>,
    pub conflicts: Vec<Conflict>,
    /// Whether `B₁` satisfies the Eichler condition.
    pub eichler: bool,
}

impl QuadraticConstraintTable {
    pub fn is_satisfiable(&self) -> bool {
        self.conflicts.is_empty() && self.eichler
    }

    pub fn entry(&self, id: &str) -> Option<&ConstraintEntry> {
        self.entries.iter().find(|e| e.place == id)
    }

    /// Whether a profile meets every local requirement.
    pub fn admits(&self, quadratic: &QuadraticProfile) -> bool {
        self.eichler
            && self.entries.iter().all(|e| {
                let declared = match e.kind {
                    PlaceKind::Complex => Some(LocalBehavior::Split),
                    _ => quadratic.declared(&e.place),
                };
                match declared {
                    Some(b) => e.allowed.contains(b),
                    None => !e.coverage_required,
                }
            })
    }
}

struct EntryBuilder {
    allowed: BehaviorSet,
    provenance: Vec<String>,
    conflict: Option<(String, String)>,
}

impl EntryBuilder {
    fn narrow(&mut self, to: BehaviorSet, why: String) {
        let next = self.allowed.intersect(to);
        if next == self.allowed {
            return;
        }
        if next.is_empty() && self.conflict.is_none() {
            let first = self.provenance.last().cloned().unwrap_or_else(|| "admissible behaviours".into());
            self.conflict = Some((first, why.clone()));
        }
        self.allowed = next;
        self.provenance.push(why);
    }
}

fn check_field(algebra: &AlgebraDescriptor, field: &FieldLocalData) -> Result<(), EngineError> {
    let violations = validate_field_local_data(field, algebra.places())?;
    if !violations.is_empty() {
        return Err(EngineError::InvalidField(violations));
    }
    if field.degree() != algebra.degree() {
        return Err(EmbeddingError::DegreeMismatch {
            field: field.degree(),
            algebra: algebra.degree(),
        }
        .into());
    }
    Ok(())
}

/// Derives the local constraints on a quadratic `E ⊆ L` selective for `B₁`.
///
/// The rules mirror [`check_candidate_e`] place by place: `E` ramifies at
/// every place of `T` (embedding in `B₁`), is unramified at finite places and
/// split at the remaining archimedean places (spinor class field of `B₁`),
/// and has local degrees compatible with those of `L`.
pub fn derive_quadratic_constraints(
    algebra: &AlgebraDescriptor,
    field: &FieldLocalData,
) -> Result<QuadraticConstraintTable, EngineError> {
    let decomposition = decompose(algebra)?;
    check_field(algebra, field)?;
    if !embeds_as_maximal_subfield(field, algebra)?.embeds() {
        return Err(EngineError::NotEmbedded);
    }
    let b1 = &decomposition.quaternion_part;
    let spinor = spinor_classfield_constraints(b1);
    let places = algebra.places();
    let n = field.degree();

    let mut entries = Vec::with_capacity(places.len());
    let mut conflicts = Vec::new();
    for place in places.iter() {
        let kind = place.kind();
        let mut b = EntryBuilder {
            allowed: BehaviorSet::of(LocalBehavior::admissible(kind)),
            provenance: Vec::new(),
            conflict: None,
        };
        let b1_ramified = b1.local_index_at(place) > 1;
        if b1_ramified {
            b.narrow(
                BehaviorSet::of(&[LocalBehavior::Inert, LocalBehavior::Ramified]),
                format!("B1 ramifies at {}: E must not split to embed in B1", place.id()),
            );
        }
        match kind {
            PlaceKind::Finite => {
                b.narrow(
                    BehaviorSet::of(&[LocalBehavior::Split, LocalBehavior::Inert]),
                    "spinor class field is unramified at finite places".into(),
                );
                let bound = spinor.inertia_bound(place.id());
                if bound % 2 != 0 {
                    b.narrow(
                        BehaviorSet::of(&[LocalBehavior::Split]),
                        format!("inertia degree must divide {bound}"),
                    );
                }
            }
            _ if spinor.archimedean_unramified.contains(place.id()) => {
                b.narrow(
                    BehaviorSet::of(&[LocalBehavior::Split]),
                    "B1 splits here, so the spinor class field is unramified".into(),
                );
            }
            _ => {}
        }
        if let Some(parts) = field.parts_at(place.id()) {
            let fits: Vec<LocalBehavior> = LocalBehavior::admissible(kind)
                .iter()
                .copied()
                .filter(|&beh| locally_contains(parts, n, beh))
                .collect();
            b.narrow(BehaviorSet::of(&fits), format!("E ⊆ L with local degrees {parts:?}"));
        }
        if let Some((first, second)) = b.conflict {
            conflicts.push(Conflict {
                place: place.id().to_string(),
                first,
                second,
            });
        }
        entries.push(ConstraintEntry {
            place: place.id().to_string(),
            kind,
            allowed: b.allowed,
            requirement: Requirement::classify(b.allowed, kind),
            provenance: b.provenance,
            coverage_required: b1_ramified,
        });
    }
    Ok(QuadraticConstraintTable {
        entries,
        conflicts,
        eichler: eichler_condition(b1, places),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidateCheck {
    /// `E` fits inside `L` locally.
    InsideField,
    EmbedsInQuaternionPart,
    WithinSpinorConstraints,
    EichlerCondition,
}

impl CandidateCheck {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateCheck::InsideField => "contained in L",
            CandidateCheck::EmbedsInQuaternionPart => "embeds into B1",
            CandidateCheck::WithinSpinorConstraints => "within spinor constraints",
            CandidateCheck::EichlerCondition => "Eichler condition for B1",
        }
    }
}

impl fmt::Display for CandidateCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubCheck {
    pub check: CandidateCheck,
    pub passed: bool,
    pub witness: Option<String>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateReport {
    pub checks: Vec<SubCheck>,
}

impl CandidateReport {
    pub fn accepted(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&SubCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Checks whether `E` is a quadratic subfield of `L` selective for `B₁`.
pub fn check_candidate_e(
    quadratic: &QuadraticProfile,
    algebra: &AlgebraDescriptor,
    field: &FieldLocalData,
) -> Result<CandidateReport, EngineError> {
    let decomposition = decompose(algebra)?;
    check_field(algebra, field)?;
    check_candidate_with(quadratic, &decomposition, algebra, field)
}

fn check_candidate_with(
    quadratic: &QuadraticProfile,
    decomposition: &Decomposition,
    algebra: &AlgebraDescriptor,
    field: &FieldLocalData,
) -> Result<CandidateReport, EngineError> {
    let places = algebra.places();
    let violations = validate_quadratic_profile(quadratic, places)?;
    if !violations.is_empty() {
        return Err(EngineError::InvalidProfile(violations));
    }
    let b1 = &decomposition.quaternion_part;
    let mut checks = Vec::with_capacity(4);

    let inside = quadratic_compatible_with(field, quadratic, places)?;
    checks.push(match inside.witness() {
        None => {
            let unchecked: Vec<&str> = inside.unchecked().collect();
            let detail = if unchecked.is_empty() {
                "local degrees compatible at every place".to_string()
            } else {
                format!("compatible; unchecked at {}", unchecked.join(", "))
            };
            SubCheck { check: CandidateCheck::InsideField, passed: true, witness: None, detail }
        }
        Some((place, why)) => SubCheck {
            check: CandidateCheck::InsideField,
            passed: false,
            witness: Some(place.to_string()),
            detail: match why {
                LocalCompatibility::NoBalancedSplit => {
                    format!("{place}: E splits but the local degrees of L cannot be halved")
                }
                LocalCompatibility::OddLocalDegree { behavior, part } => {
                    format!("{place}: E is {behavior} but L has odd local degree {part}")
                }
                _ => unreachable!("witness is never compatible"),
            },
        },
    });

    checks.push(match quadratic_embeds_in_quaternion(quadratic, b1) {
        Ok(QuadraticEmbedding::Embeds) => SubCheck {
            check: CandidateCheck::EmbedsInQuaternionPart,
            passed: true,
            witness: None,
            detail: "E is non-split at every ramified place of B1".into(),
        },
        Ok(QuadraticEmbedding::Fails { place, .. }) => SubCheck {
            check: CandidateCheck::EmbedsInQuaternionPart,
            passed: false,
            detail: format!("{place}: E splits where B1 ramifies"),
            witness: Some(place),
        },
        Err(EmbeddingError::MissingCoverage(place)) => SubCheck {
            check: CandidateCheck::EmbedsInQuaternionPart,
            passed: false,
            detail: format!("{place}: E is undeclared where B1 ramifies"),
            witness: Some(place),
        },
        Err(e) => return Err(e.into()),
    });

    checks.push(match quadratic_within_spinor(quadratic, &spinor_classfield_constraints(b1)) {
        SpinorDecision::Within => SubCheck {
            check: CandidateCheck::WithinSpinorConstraints,
            passed: true,
            witness: None,
            detail: "unramified at finite places, split where B1 splits".into(),
        },
        SpinorDecision::NotWithin(f) => {
            use crate::class_fields::SpinorFailure::*;
            let witness = match &f {
                OddExponent(_) => None,
                FiniteRamification { place } | InertiaBound { place, .. } | ArchimedeanRamification { place } => {
                    Some(place.clone())
                }
            };
            SubCheck {
                check: CandidateCheck::WithinSpinorConstraints,
                passed: false,
                witness,
                detail: f.to_string(),
            }
        }
    });

    let eichler = eichler_condition(b1, places);
    checks.push(SubCheck {
        check: CandidateCheck::EichlerCondition,
        passed: eichler,
        witness: None,
        detail: if eichler {
            "B1 is not totally definite".into()
        } else {
            "B1 is a totally definite quaternion algebra".into()
        },
    });
    Ok(CandidateReport { checks })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    NotSelective,
    Selective,
    ConditionallySelective,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::NotSelective => "NotSelective",
            Status::Selective => "Selective",
            Status::ConditionallySelective => "ConditionallySelective",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChosenCandidate {
    /// Position in the candidate list.
    pub index: usize,
    pub profile: QuadraticProfile,
    pub report: CandidateReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectivityVerdict {
    NotSelective {
        obstruction: Obstruction,
        /// Reports for every rejected candidate, in input order.
        candidate_failures: Vec<CandidateReport>,
        /// False when only the supplied candidates were ruled out.
        unconditional: bool,
    },
    Selective {
        decomposition: Decomposition,
        chosen: ChosenCandidate,
    },
    ConditionallySelective {
        decomposition: Decomposition,
        constraints: QuadraticConstraintTable,
    },
}

impl SelectivityVerdict {
    pub fn status(&self) -> Status {
        match self {
            SelectivityVerdict::NotSelective { .. } => Status::NotSelective,
            SelectivityVerdict::Selective { .. } => Status::Selective,
            SelectivityVerdict::ConditionallySelective { .. } => Status::ConditionallySelective,
        }
    }

    /// `[F:K]` for the representation field, when it is determined.
    pub fn representation_degree(&self) -> Option<u64> {
        match self {
            SelectivityVerdict::NotSelective { .. } => Some(1),
            SelectivityVerdict::Selective { .. } => Some(2),
            SelectivityVerdict::ConditionallySelective { .. } => None,
        }
    }

    /// Proportion of conjugacy classes of maximal orders containing `𝒪_L`.
    pub fn rate(&self) -> Option<ReducedFraction> {
        self.representation_degree()
            .map(|d| selectivity_proportion(d).expect("degree is positive"))
    }

    pub fn obstruction(&self) -> Option<&Obstruction> {
        match self {
            SelectivityVerdict::NotSelective { obstruction, .. } => Some(obstruction),
            _ => None,
        }
    }

    pub fn decomposition(&self) -> Option<&Decomposition> {
        match self {
            SelectivityVerdict::NotSelective { .. } => None,
            SelectivityVerdict::Selective { decomposition, .. }
            | SelectivityVerdict::ConditionallySelective { decomposition, .. } => Some(decomposition),
        }
    }

    pub fn chosen(&self) -> Option<&ChosenCandidate> {
        match self {
            SelectivityVerdict::Selective { chosen, .. } => Some(chosen),
            _ => None,
        }
    }

    pub fn constraint_table(&self) -> Option<&QuadraticConstraintTable> {
        match self {
            SelectivityVerdict::ConditionallySelective { constraints, .. } => Some(constraints),
            _ => None,
        }
    }

    pub fn is_quaternion_case(&self) -> bool {
        self.decomposition().is_some_and(Decomposition::is_quaternion_case)
    }
}

fn not_selective(obstruction: Obstruction) -> SelectivityVerdict {
    SelectivityVerdict::NotSelective {
        obstruction,
        candidate_failures: Vec::new(),
        unconditional: true,
    }
}

/// Decides whether `𝒪_L` is selective in `B`.
///
/// The first accepted candidate, in input order, is reported. With no
/// candidates the verdict is conditional on the global existence of a
/// quadratic field meeting the derived local constraints.
pub fn decide_selectivity(
    algebra: &AlgebraDescriptor,
    field: &FieldLocalData,
    candidates: &[QuadraticProfile],
) -> Result<SelectivityVerdict, EngineError> {
    check_field(algebra, field)?;
    if let Condition::Fails(o) = check_degree_condition(algebra)? {
        return Ok(not_selective(o));
    }
    if let Condition::Fails(o) = check_finite_odd_condition(algebra) {
        return Ok(not_selective(o));
    }
    if let EmbeddingDecision::Fails(w) = embeds_as_maximal_subfield(field, algebra)? {
        return Ok(not_selective(Obstruction {
            kind: ObstructionKind::NoEmbedding,
            narrative: format!(
                "local degree {} at {} is not divisible by the local index {}",
                w.part, w.place, w.index
            ),
            witness: Some(Witness {
                place: w.place,
                value: w.part.to_string(),
            }),
        }));
    }
    let decomposition = decompose(algebra)?;

    if candidates.is_empty() {
        let constraints = derive_quadratic_constraints(algebra, field)?;
        return Ok(SelectivityVerdict::ConditionallySelective {
            decomposition,
            constraints,
        });
    }

    let mut failures = Vec::new();
    for (index, profile) in candidates.iter().enumerate() {
        let report = check_candidate_with(profile, &decomposition, algebra, field)?;
        if report.accepted() {
            return Ok(SelectivityVerdict::Selective {
                decomposition,
                chosen: ChosenCandidate {
                    index,
                    profile: profile.clone(),
                    report,
                },
            });
        }
        failures.push(report);
    }
    let constraints = derive_quadratic_constraints(algebra, field)?;
    let unconditional = !constraints.is_satisfiable();
    let narrative = if unconditional {
        "no quadratic subfield of L can be selective for B1".to_string()
    } else {
        format!(
            "none of the {} candidates is selective for B1 (candidates exhausted, not proven exhaustive)",
            candidates.len()
        )
    };
    Ok(SelectivityVerdict::NotSelective {
        obstruction: Obstruction {
            kind: ObstructionKind::NoSelectiveQuadratic,
            witness: None,
            narrative,
        },
        candidate_failures: failures,
        unconditional,
    })
}

/// Primes dividing the degree, for iterating the divisibility oracle.
pub fn degree_primes(algebra: &AlgebraDescriptor) -> Vec<u64> {
    prime_divisors(algebra.degree())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brauer::BrauerClass;
    use crate::places::{Place, PlaceSet};
    use LocalBehavior::*;

    fn places() -> Arc<PlaceSet> {
        Arc::new(
            PlaceSet::new([
                Place::real("v1"),
                Place::real("v2"),
                Place::complex("w"),
                Place::finite("p1"),
                Place::finite("p2"),
                Place::finite("p3"),
            ])
            .unwrap(),
        )
    }

    fn algebra(ps: &Arc<PlaceSet>, raw: &[(&str, &str)], degree: u64) -> AlgebraDescriptor {
        let class =
            BrauerClass::validate(raw.iter().map(|(p, v)| (*p, v.parse().unwrap())), Arc::clone(ps)).unwrap();
        AlgebraDescriptor::new(class, degree).unwrap()
    }

    fn b6(ps: &Arc<PlaceSet>) -> AlgebraDescriptor {
        algebra(ps, &[("v1", "1/2"), ("v2", "1/2"), ("p1", "1/3"), ("p2", "2/3")], 6)
    }

    fn b3(ps: &Arc<PlaceSet>) -> AlgebraDescriptor {
        algebra(ps, &[("p1", "1/3"), ("p2", "2/3")], 3)
    }

    fn l6_with(overrides: &[(&str, Vec<u64>)]) -> FieldLocalData {
        let mut base: std::collections::BTreeMap<&str, Vec<u64>> = [
            ("v1", vec![2, 2, 2]),
            ("v2", vec![2, 2, 2]),
            ("w", vec![1; 6]),
            ("p1", vec![6]),
            ("p2", vec![3, 3]),
            ("p3", vec![1; 6]),
        ]
        .into_iter()
        .collect();
        for (k, v) in overrides {
            base.insert(k, v.clone());
        }
        FieldLocalData::new(6, base)
    }

    fn l3() -> FieldLocalData {
        FieldLocalData::new(
            3,
            [
                ("v1", vec![1, 1, 1]),
                ("v2", vec![1, 1, 1]),
                ("w", vec![1, 1, 1]),
                ("p1", vec![3]),
                ("p2", vec![3]),
            ],
        )
    }

    fn fixture_e() -> QuadraticProfile {
        QuadraticProfile::new([
            ("v1", Ramified),
            ("v2", Ramified),
            ("p1", Inert),
            ("p2", Split),
            ("p3", Split),
        ])
    }

    fn with(e: &QuadraticProfile, id: &str, b: LocalBehavior) -> QuadraticProfile {
        let mut entries = e.entries().clone();
        entries.insert(id.to_string(), b);
        QuadraticProfile::new(entries)
    }

    #[test]
    fn degree_condition() {
        let ps = places();
        assert!(check_degree_condition(&b6(&ps)).unwrap().holds());
        let c = check_degree_condition(&b3(&ps)).unwrap();
        assert_eq!(c.obstruction().unwrap().kind, ObstructionKind::DegreeNotTwiceOdd);
        let b4 = algebra(&ps, &[("p1", "1/4"), ("p2", "3/4")], 4);
        let c = check_degree_condition(&b4).unwrap();
        assert_eq!(c.obstruction().unwrap().kind, ObstructionKind::DegreeNotTwiceOdd);
        assert_eq!(c.obstruction().unwrap().narrative, "4 divides the degree 4");

        let matrix = algebra(&ps, &[("p1", "1/3"), ("p2", "2/3")], 6);
        assert_eq!(
            check_degree_condition(&matrix),
            Err(EngineError::NotDivision { degree: 6, order: 3 })
        );
    }

    #[test]
    fn finite_odd_condition() {
        let ps = places();
        assert!(check_finite_odd_condition(&b6(&ps)).holds());

        let b = algebra(&ps, &[("p1", "1/6"), ("p2", "5/6")], 6);
        let o = check_finite_odd_condition(&b).obstruction().cloned().unwrap();
        assert_eq!(o.kind, ObstructionKind::EvenFiniteRamification);
        assert_eq!(o.witness.unwrap(), Witness { place: "p1".into(), value: "1/6".into() });

        let b = algebra(&ps, &[("p1", "1/2"), ("p2", "1/2"), ("v1", "1/2"), ("v2", "1/2")], 2);
        let o = check_finite_odd_condition(&b).obstruction().cloned().unwrap();
        assert_eq!(o.witness.unwrap().place, "p1");
    }

    #[test]
    fn oracle_certificates() {
        let ps = places();
        let c = divisibility_obstruction_oracle(&b3(&ps), &l3(), 3).unwrap();
        assert_eq!(c.conclusion, OracleConclusion::PrimeExcluded);
        assert_eq!((c.prime_power, c.witness.as_str()), (3, "p1"));
        let local = c.local.unwrap();
        assert_eq!((local.local_index, local.inertia_bound, local.local_degrees), (3, 1, vec![3]));

        let c = divisibility_obstruction_oracle(&b6(&ps), &l6_with(&[]), 3).unwrap();
        assert_eq!(c.conclusion, OracleConclusion::PrimeExcluded);
        assert_eq!(c.local.unwrap().place, "p1");

        // Only real places carry the 2-part of B6.
        let c = divisibility_obstruction_oracle(&b6(&ps), &l6_with(&[]), 2).unwrap();
        assert_eq!((c.witness.as_str(), c.conclusion), ("v1", OracleConclusion::Inconclusive));

        let err = divisibility_obstruction_oracle(&b6(&ps), &l6_with(&[]), 5).unwrap_err();
        assert_eq!(err.to_string(), "5 ∤ 6");

        let err = divisibility_obstruction_oracle(&b6(&ps), &l6_with(&[("p1", vec![1; 6])]), 3).unwrap_err();
        assert_eq!(err, EngineError::NotEmbedded);
    }

    #[test]
    fn oracle_on_even_finite_ramification() {
        let ps = places();
        let b = algebra(&ps, &[("p1", "1/2"), ("p2", "1/2"), ("v1", "1/2"), ("v2", "1/2")], 2);
        let l = FieldLocalData::new(2, [("v1", vec![2]), ("v2", vec![2]), ("w", vec![1, 1]), ("p1", vec![2]), ("p2", vec![2])]);
        let c = divisibility_obstruction_oracle(&b, &l, 2).unwrap();
        assert_eq!(c.witness, "v1");
        assert_eq!(c.conclusion, OracleConclusion::PrimeExcluded);
        assert_eq!(c.local.unwrap().place, "p1");
    }

    #[test]
    fn decompose_examples() {
        let ps = places();
        let d = decompose(&b6(&ps)).unwrap();
        assert_eq!(d.quaternion_part.class().to_string(), "{v1:1/2, v2:1/2}");
        assert_eq!(d.quaternion_part.degree(), 2);
        assert_eq!(d.odd_part.class().to_string(), "{p1:1/3, p2:2/3}");
        assert_eq!(d.odd_part.degree(), 3);
        assert_eq!(d.real_ramified, ["v1", "v2"]);
        assert!(!d.is_quaternion_case());

        let h = algebra(&ps, &[("v1", "1/2"), ("v2", "1/2")], 2);
        let d = decompose(&h).unwrap();
        assert_eq!(d.quaternion_part, h);
        assert!(d.odd_part.class().is_trivial());
        assert_eq!(d.odd_part.degree(), 1);
        assert!(d.is_quaternion_case());

        let err = decompose(&b3(&ps)).unwrap_err();
        assert!(err.to_string().starts_with("degree condition failed"), "{err}");
    }

    #[test]
    fn constraint_table_for_fixture() {
        let ps = places();
        let t = derive_quadratic_constraints(&b6(&ps), &l6_with(&[])).unwrap();
        let got: Vec<(&str, Requirement)> = t.entries.iter().map(|e| (e.place.as_str(), e.requirement)).collect();
        assert_eq!(
            got,
            [
                ("v1", Requirement::MustRamify),
                ("v2", Requirement::MustRamify),
                ("w", Requirement::Unconstrained),
                ("p1", Requirement::MustBeInert),
                ("p2", Requirement::MustSplit),
                ("p3", Requirement::MustSplit),
            ]
        );
        assert!(t.is_satisfiable());
        assert!(t.entry("v1").unwrap().coverage_required);
        assert!(!t.entry("p1").unwrap().coverage_required);
        assert!(t.admits(&fixture_e()));
    }

    #[test]
    fn even_parts_forbid_split_in_twice_odd_degree() {
        let ps = places();
        let l = l6_with(&[("p1", vec![6]), ("p2", vec![6]), ("p3", vec![4, 2])]);
        let t = derive_quadratic_constraints(&b6(&ps), &l).unwrap();
        for id in ["p1", "p2", "p3"] {
            assert_eq!(t.entry(id).unwrap().requirement, Requirement::MustBeInert, "{id}");
        }
    }

    #[test]
    fn repeated_forcing_merges() {
        let ps = places();
        let t = derive_quadratic_constraints(&b6(&ps), &l6_with(&[("p3", vec![3, 1, 1, 1])])).unwrap();
        let e = t.entry("p3").unwrap();
        assert_eq!(e.requirement, Requirement::MustSplit);
        assert!(t.conflicts.is_empty());
    }

    #[test]
    fn conflicts_are_reported() {
        let ps = places();
        let t = derive_quadratic_constraints(&b6(&ps), &l6_with(&[("p3", vec![5, 1])])).unwrap();
        assert_eq!(t.entry("p3").unwrap().requirement, Requirement::Unsatisfiable);
        assert_eq!(t.conflicts.len(), 1);
        assert_eq!(t.conflicts[0].place, "p3");
        assert_eq!(t.conflicts[0].first, "spinor class field is unramified at finite places");
        assert!(!t.is_satisfiable());

        let v = decide_selectivity(&b6(&ps), &l6_with(&[("p3", vec![5, 1])]), &[fixture_e()]).unwrap();
        match v {
            SelectivityVerdict::NotSelective { unconditional, ref obstruction, .. } => {
                assert!(unconditional);
                assert_eq!(obstruction.kind, ObstructionKind::NoSelectiveQuadratic);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn totally_definite_quaternion_part() {
        let ps = Arc::new(
            PlaceSet::new([Place::real("v1"), Place::real("v2"), Place::finite("p1"), Place::finite("p2")]).unwrap(),
        );
        let b = algebra(&ps, &[("v1", "1/2"), ("v2", "1/2"), ("p1", "1/3"), ("p2", "2/3")], 6);
        let l = FieldLocalData::new(
            6,
            [("v1", vec![2, 2, 2]), ("v2", vec![2, 2, 2]), ("p1", vec![6]), ("p2", vec![3, 3])],
        );
        let t = derive_quadratic_constraints(&b, &l).unwrap();
        assert!(t.conflicts.is_empty());
        assert!(!t.eichler);
        assert!(!t.is_satisfiable());

        let e = QuadraticProfile::new([("v1", Ramified), ("v2", Ramified), ("p1", Inert), ("p2", Split)]);
        let r = check_candidate_e(&e, &b, &l).unwrap();
        assert_eq!(r.first_failure().unwrap().check, CandidateCheck::EichlerCondition);
    }

    #[test]
    fn candidate_reports() {
        let ps = places();
        let (b, l) = (b6(&ps), l6_with(&[]));
        let r = check_candidate_e(&fixture_e(), &b, &l).unwrap();
        assert!(r.accepted());
        assert_eq!(r.checks.len(), 4);

        let r = check_candidate_e(&with(&fixture_e(), "v1", Split), &b, &l).unwrap();
        assert!(!r.accepted());
        let sub = r.checks.iter().find(|c| c.check == CandidateCheck::EmbedsInQuaternionPart).unwrap();
        assert!(!sub.passed);
        assert_eq!(sub.check.as_str(), "embeds into B1");
        assert_eq!(sub.witness.as_deref(), Some("v1"));

        let r = check_candidate_e(&with(&fixture_e(), "p1", Ramified), &b, &l).unwrap();
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].check.as_str(), "within spinor constraints");
        assert_eq!(failed[0].witness.as_deref(), Some("p1"));

        let r = check_candidate_e(&fixture_e().without("v2"), &b, &l).unwrap();
        assert_eq!(r.first_failure().unwrap().witness.as_deref(), Some("v2"));
    }

    #[test]
    fn fixture_is_selective() {
        let ps = places();
        let v = decide_selectivity(&b6(&ps), &l6_with(&[]), &[fixture_e()]).unwrap();
        assert_eq!(v.status(), Status::Selective);
        assert_eq!(v.rate().unwrap().to_string(), "1/2");
        assert_eq!(v.chosen().unwrap().index, 0);
        assert!(v.obstruction().is_none());
        assert!(v.decomposition().is_some());
        assert!(v.constraint_table().is_none());
    }

    #[test]
    fn first_accepted_candidate_wins() {
        let ps = places();
        let bad = with(&fixture_e(), "p3", Inert);
        let v = decide_selectivity(&b6(&ps), &l6_with(&[]), &[bad, fixture_e(), fixture_e()]).unwrap();
        assert_eq!(v.chosen().unwrap().index, 1);
    }

    #[test]
    fn exhausted_candidates_are_conditional_on_the_list() {
        let ps = places();
        let bad = with(&fixture_e(), "p3", Inert);
        let v = decide_selectivity(&b6(&ps), &l6_with(&[]), &[bad]).unwrap();
        match v {
            SelectivityVerdict::NotSelective { unconditional, candidate_failures, obstruction } => {
                assert!(!unconditional);
                assert_eq!(candidate_failures.len(), 1);
                assert!(obstruction.narrative.contains("not proven exhaustive"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn no_candidates_is_conditional() {
        let ps = places();
        let v = decide_selectivity(&b6(&ps), &l6_with(&[]), &[]).unwrap();
        assert_eq!(v.status(), Status::ConditionallySelective);
        assert_eq!(v.rate(), None);
        assert!(v.constraint_table().unwrap().is_satisfiable());
    }

    #[test]
    fn necessary_conditions_come_first() {
        let ps = places();
        let v = decide_selectivity(&b3(&ps), &l3(), &[fixture_e()]).unwrap();
        assert_eq!(v.obstruction().unwrap().kind, ObstructionKind::DegreeNotTwiceOdd);
        assert_eq!(v.rate().unwrap(), ReducedFraction::one());

        // The field does not embed here, but the finite-odd condition is reported.
        let b = algebra(&ps, &[("p1", "1/6"), ("p2", "5/6")], 6);
        let v = decide_selectivity(&b, &l6_with(&[("p1", vec![3, 3])]), &[]).unwrap();
        let o = v.obstruction().unwrap();
        assert_eq!(o.kind, ObstructionKind::EvenFiniteRamification);
        assert_eq!(o.witness.as_ref().unwrap().place, "p1");

        let v = decide_selectivity(&b6(&ps), &l6_with(&[("p1", vec![1; 6])]), &[]).unwrap();
        let o = v.obstruction().unwrap();
        assert_eq!(o.kind, ObstructionKind::NoEmbedding);
        assert_eq!(o.witness.as_ref().unwrap(), &Witness { place: "p1".into(), value: "1".into() });
    }

    #[test]
    fn quaternion_case_is_flagged() {
        let ps = places();
        let h = algebra(&ps, &[("v1", "1/2"), ("v2", "1/2")], 2);
        let l = FieldLocalData::new(2, [("v1", vec![2]), ("v2", vec![2]), ("w", vec![1, 1])]);
        let e = QuadraticProfile::new([("v1", Ramified), ("v2", Ramified)]);
        let v = decide_selectivity(&h, &l, &[e]).unwrap();
        assert_eq!(v.status(), Status::Selective);
        assert!(v.is_quaternion_case());
    }

    #[test]
    fn invalid_inputs() {
        let ps = places();
        let bad = FieldLocalData::new(6, [("v1", vec![2, 2, 1])]);
        assert!(matches!(decide_selectivity(&b6(&ps), &bad, &[]), Err(EngineError::InvalidField(_))));
        let e = with(&fixture_e(), "v1", Inert);
        assert!(matches!(
            decide_selectivity(&b6(&ps), &l6_with(&[]), &[e]),
            Err(EngineError::InvalidProfile(_))
        ));
        assert_eq!(degree_primes(&b6(&ps)), [2, 3]);
    }
}
