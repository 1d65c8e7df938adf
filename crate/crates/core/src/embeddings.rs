//! Local-global embedding tests for maximal subfields.
//!
//! A field `L` of degree `n` embeds in an `n²`-dimensional central simple
//! algebra `B` exactly when every local degree `[L_P : K_v]` is divisible by
//! the local index `e_v(B)`. Only places where `B` ramifies can fail.

use thiserror::Error;

use crate::brauer::AlgebraDescriptor;
use crate::places::{FieldLocalData, LocalBehavior, PlaceError, PlaceKind, QuadraticProfile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("[L:K] = {field} but the algebra has degree {algebra}")]
    DegreeMismatch { field: u64, algebra: u64 },
    #[error("no local data at {0}, which must be declared")]
    MissingCoverage(String),
    #[error("quaternion algebra expected, found degree {0}")]
    NotQuaternion(u64),
    #[error(transparent)]
    Place(#[from] PlaceError),
}

/// The place, local degree, and local index that block an embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingWitness {
    pub place: String,
    pub part: u64,
    pub index: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingDecision {
    Embeds,
    Fails(EmbeddingWitness),
}

impl EmbeddingDecision {
    pub fn embeds(&self) -> bool {
        matches!(self, EmbeddingDecision::Embeds)
    }

    pub fn witness(&self) -> Option<&EmbeddingWitness> {
        match self {
            EmbeddingDecision::Embeds => None,
            EmbeddingDecision::Fails(w) => Some(w),
        }
    }
}

/// Decides whether `L` embeds in `B` as a maximal subfield.
///
/// `L` must be declared at every archimedean place and every place where `B`
/// ramifies. Other places have local index 1 and are vacuous.
pub fn embeds_as_maximal_subfield(
    field: &FieldLocalData,
    algebra: &AlgebraDescriptor,
) -> Result<EmbeddingDecision, EmbeddingError> {
    if field.degree() != algebra.degree() {
        return Err(EmbeddingError::DegreeMismatch {
            field: field.degree(),
            algebra: algebra.degree(),
        });
    }
    let places = algebra.places();
    for id in field.coverage() {
        places.require(id)?;
    }
    let ramified: Vec<&str> = algebra.class().ramification_set(None).iter().map(|p| p.id()).collect();
    for place in places.iter() {
        let required = place.kind().is_archimedean() || ramified.contains(&place.id());
        if required && !field.covers(place.id()) {
            return Err(EmbeddingError::MissingCoverage(place.id().to_string()));
        }
    }
    for place in places.iter() {
        let Some(parts) = field.parts_at(place.id()) else {
            continue;
        };
        let index = algebra.local_index_at(place);
        if let Some(&part) = parts.iter().find(|&&part| part % index != 0) {
            return Ok(EmbeddingDecision::Fails(EmbeddingWitness {
                place: place.id().to_string(),
                part,
                index,
            }));
        }
    }
    Ok(EmbeddingDecision::Embeds)
}

/// Whether the quadratic extension with profile `E` embeds in the quaternion
/// algebra `B1`: `E` may not split at any place where `B1` ramifies.
pub fn quadratic_embeds_in_quaternion(
    quadratic: &QuadraticProfile,
    quaternion: &AlgebraDescriptor,
) -> Result<QuadraticEmbedding, EmbeddingError> {
    if quaternion.degree() != 2 {
        return Err(EmbeddingError::NotQuaternion(quaternion.degree()));
    }
    for id in quadratic.coverage() {
        quaternion.places().require(id)?;
    }
    for place in quaternion.class().ramification_set(None) {
        match quadratic.behavior_at(place) {
            None => return Err(EmbeddingError::MissingCoverage(place.id().to_string())),
            Some(LocalBehavior::Split) => {
                return Ok(QuadraticEmbedding::Fails {
                    place: place.id().to_string(),
                    kind: place.kind(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(QuadraticEmbedding::Embeds)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadraticEmbedding {
    Embeds,
    /// `E` splits at a place where the quaternion algebra ramifies.
    Fails { place: String, kind: PlaceKind },
}

impl QuadraticEmbedding {
    pub fn embeds(&self) -> bool {
        matches!(self, QuadraticEmbedding::Embeds)
    }
}
