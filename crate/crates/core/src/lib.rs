//! Exact arithmetic on Brauer classes of number fields and a decision
//! procedure for selectivity of maximal orders of maximal subfields.
//!
//! Number fields are described only through local data: places of the base
//! field `K`, local invariants of a central simple algebra, the local degrees
//! of a degree-`n` extension `L`, and the local behavior of quadratic
//! extensions. No global arithmetic is ever performed.

pub mod arith;
pub mod brauer;
pub mod class_fields;
pub mod embeddings;
pub mod enumeration;
pub mod fraction;
pub mod places;
pub mod problem;
pub mod selectivity;

pub use brauer::{AlgebraDescriptor, BrauerClass, BrauerError, ClassViolation};
pub use class_fields::{
    eichler_condition, quadratic_within_spinor, selectivity_proportion, spinor_classfield_constraints,
    SpinorConstraints, SpinorDecision, SpinorFailure,
};
pub use embeddings::{
    embeds_as_maximal_subfield, quadratic_embeds_in_quaternion, EmbeddingDecision, EmbeddingError,
    EmbeddingWitness, QuadraticEmbedding,
};
pub use enumeration::{enumerate_classes, theorem_consistency_sweep, EnumerationSpec, SweepReport};
pub use fraction::{FractionError, QMod1, ReducedFraction};
pub use places::{
    quadratic_compatible_with, validate_field_local_data, validate_quadratic_profile, FieldLocalData,
    LocalBehavior, Place, PlaceError, PlaceKind, PlaceSet, QuadraticProfile,
};
pub use problem::{parse_problem_file, Diagnostic, DiagnosticCode, ProblemFile, Query, QueryCommand};
pub use selectivity::{
    check_candidate_e, check_degree_condition, check_finite_odd_condition, decide_selectivity, decompose,
    derive_quadratic_constraints, divisibility_obstruction_oracle, Decomposition, EngineError, Obstruction,
    ObstructionKind, QuadraticConstraintTable, Requirement, SelectivityVerdict, Status,
};
