//! Brauer classes of a number field as finite-support maps from places to
//! Hasse invariants in ℚ/ℤ.
//!
//! A family of local invariants is a global class exactly when it is zero
//! at complex places, lies in `{0, 1/2}` at real places, has finite support,
//! and sums to zero. Classes keep no explicit zeros, so equality of classes is
//! structural equality of their invariant maps.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{is_prime, valuation};
use crate::fraction::QMod1;
use crate::places::{Place, PlaceError, PlaceKind, PlaceSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassViolation {
    RealInvariant { place: String, value: QMod1 },
    ComplexInvariant { place: String, value: QMod1 },
    NonZeroSum { sum: QMod1 },
    DuplicateEntry { place: String },
}

impl fmt::Display for ClassViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RealInvariant { place, value } => {
                write!(f, "{place}: real place invariant must be 0 or 1/2, found {value}")
            }
            Self::ComplexInvariant { place, value } => {
                write!(f, "{place}: complex place invariant must be 0, found {value}")
            }
            Self::NonZeroSum { sum } => write!(f, "sum = {sum} ≢ 0"),
            Self::DuplicateEntry { place } => write!(f, "{place}: invariant given twice"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BrauerError {
    #[error(transparent)]
    Place(#[from] PlaceError),
    #[error("invalid Brauer class: {}", join(.0))]
    Invalid(Vec<ClassViolation>),
    #[error("classes live over different place sets")]
    PlaceSetMismatch,
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("class order {order} does not divide degree {degree}")]
    OrderDoesNotDivideDegree { order: BigUint, degree: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{p} ∤ {degree}")]
    PrimeDoesNotDivide { p: u64, degree: u64 },
    #[error("algebra of degree {degree} and class order {order} is not a division algebra")]
    NotDivision { degree: u64, order: BigUint },
}

fn join(v: &[ClassViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// A class in `Br(K)`, keyed by place position in its [`PlaceSet`].
#[derive(Debug, Clone)]
pub struct BrauerClass {
    places: Arc<PlaceSet>,
    invariants: BTreeMap<usize, QMod1>,
}

impl PartialEq for BrauerClass {
    fn eq(&self, other: &Self) -> bool {
        self.invariants == other.invariants
            && (Arc::ptr_eq(&self.places, &other.places) || self.places == other.places)
    }
}

impl Eq for BrauerClass {}

impl BrauerClass {
    /// Validates a raw invariant map and canonicalizes it.
    ///
    /// Unknown place ids are reported as [`BrauerError::Place`]; every other
    /// defect is collected into [`BrauerError::Invalid`].
    pub fn validate<I, S>(raw: I, places: Arc<PlaceSet>) -> Result<Self, BrauerError>
    where
        I: IntoIterator<Item = (S, QMod1)>,
        S: AsRef<str>,
    {
        let mut violations = Vec::new();
        let mut invariants = BTreeMap::new();
        let mut seen = std::collections::HashSet::new();
        for (id, value) in raw {
            let id = id.as_ref();
            let pos = places.position(id).ok_or_else(|| PlaceError::UnknownPlace(id.to_string()))?;
            if !seen.insert(pos) {
                violations.push(ClassViolation::DuplicateEntry { place: id.to_string() });
                continue;
            }
            match places.at(pos).kind() {
                PlaceKind::Real if !(value.is_zero() || value == QMod1::half()) => {
                    violations.push(ClassViolation::RealInvariant { place: id.to_string(), value });
                    continue;
                }
                PlaceKind::Complex if !value.is_zero() => {
                    violations.push(ClassViolation::ComplexInvariant { place: id.to_string(), value });
                    continue;
                }
                _ => {}
            }
            if !value.is_zero() {
                invariants.insert(pos, value);
            }
        }
        let sum = invariants.values().fold(QMod1::zero(), |acc, v| &acc + v);
        if !sum.is_zero() && violations.is_empty() {
            violations.push(ClassViolation::NonZeroSum { sum });
        }
        if !violations.is_empty() {
            return Err(BrauerError::Invalid(violations));
        }
        Ok(Self { places, invariants })
    }

    pub fn trivial(places: Arc<PlaceSet>) -> Self {
        Self {
            places,
            invariants: BTreeMap::new(),
        }
    }

    pub fn places(&self) -> &Arc<PlaceSet> {
        &self.places
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    /// Hasse invariant at `id`; zero off the support.
    pub fn invariant(&self, id: &str) -> Result<QMod1, PlaceError> {
        let pos = self.places.position(id).ok_or_else(|| PlaceError::UnknownPlace(id.to_string()))?;
        Ok(self.invariants.get(&pos).cloned().unwrap_or_else(QMod1::zero))
    }

    /// Nonzero invariants in place order.
    pub fn support(&self) -> impl Iterator<Item = (&Place, &QMod1)> {
        self.invariants.iter().map(|(&pos, v)| (self.places.at(pos), v))
    }

    fn same_places(&self, other: &Self) -> Result<(), BrauerError> {
        if Arc::ptr_eq(&self.places, &other.places) || self.places == other.places {
            Ok(())
        } else {
            Err(BrauerError::PlaceSetMismatch)
        }
    }

    /// Class of the tensor product: pointwise sum of invariants.
    pub fn tensor(&self, other: &Self) -> Result<Self, BrauerError> {
        self.same_places(other)?;
        let mut invariants = self.invariants.clone();
        for (&pos, v) in &other.invariants {
            let sum = match invariants.get(&pos) {
                Some(u) => u + v,
                None => v.clone(),
            };
            if sum.is_zero() {
                invariants.remove(&pos);
            } else {
                invariants.insert(pos, sum);
            }
        }
        Ok(Self {
            places: Arc::clone(&self.places),
            invariants,
        })
    }

    /// Class of the opposite algebra: pointwise negation.
    pub fn opposite(&self) -> Self {
        Self {
            places: Arc::clone(&self.places),
            invariants: self.invariants.iter().map(|(&p, v)| (p, -v)).collect(),
        }
    }

    /// `k`-fold tensor power.
    pub fn power(&self, k: u64) -> Self {
        Self {
            places: Arc::clone(&self.places),
            invariants: self
                .invariants
                .iter()
                .map(|(&p, v)| (p, v.times(k)))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    /// Order in `Br(K)`: lcm of the local orders.
    pub fn order(&self) -> BigUint {
        self.invariants
            .values()
            .fold(BigUint::one(), |acc, v| acc.lcm(v.order()))
    }

    /// Local index `e_v`, the denominator of the invariant at `id`.
    pub fn local_index(&self, id: &str) -> Result<BigUint, PlaceError> {
        Ok(self.invariant(id)?.order().clone())
    }

    /// Places with nonzero invariant, optionally restricted to one kind.
    pub fn ramification_set(&self, kind: Option<PlaceKind>) -> Vec<&Place> {
        self.support()
            .map(|(p, _)| p)
            .filter(|p| kind.map_or(true, |k| p.kind() == k))
            .collect()
    }

    /// `(place id, "a/b")` pairs of the support, in place order.
    pub fn to_raw(&self) -> Vec<(String, QMod1)> {
        self.support().map(|(p, v)| (p.id().to_string(), v.clone())).collect()
    }

    /// Keeps the invariants at places accepted by `keep`. The result need not
    /// sum to zero; callers check that themselves.
    pub(crate) fn restrict_unchecked(&self, keep: impl Fn(&Place) -> bool) -> Self {
        Self {
            places: Arc::clone(&self.places),
            invariants: self
                .invariants
                .iter()
                .filter(|(&pos, _)| keep(self.places.at(pos)))
                .map(|(&p, v)| (p, v.clone()))
                .collect(),
        }
    }

    pub(crate) fn sum(&self) -> QMod1 {
        self.invariants.values().fold(QMod1::zero(), |acc, v| &acc + v)
    }
}

impl fmt::Display for BrauerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (p, v)) in self.support().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", p.id(), v)?;
        }
        f.write_str("}")
    }
}

/// An `n²`-dimensional central simple algebra: a Brauer class plus the degree `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraDescriptor {
    class: BrauerClass,
    degree: u64,
}

impl AlgebraDescriptor {
    pub fn new(class: BrauerClass, degree: u64) -> Result<Self, BrauerError> {
        if degree == 0 {
            return Err(BrauerError::ZeroDegree);
        }
        let order = class.order();
        if !(BigUint::from(degree) % &order).is_zero() {
            return Err(BrauerError::OrderDoesNotDivideDegree { order, degree });
        }
        Ok(Self { class, degree })
    }

    pub fn class(&self) -> &BrauerClass {
        &self.class
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn places(&self) -> &Arc<PlaceSet> {
        self.class.places()
    }

    /// Order of the class, which divides the degree and so fits in a `u64`.
    pub fn class_order(&self) -> u64 {
        self.class.order().to_u64().expect("class order divides the degree")
    }

    pub fn is_division(&self) -> bool {
        self.class_order() == self.degree
    }

    /// Size `m` of the matrix ring `M_m(D)` over the underlying division algebra.
    pub fn matrix_size(&self) -> u64 {
        self.degree / self.class_order()
    }

    pub fn local_index(&self, id: &str) -> Result<u64, PlaceError> {
        Ok(self
            .class
            .local_index(id)?
            .to_u64()
            .expect("local index divides the degree"))
    }

    pub(crate) fn local_index_at(&self, place: &Place) -> u64 {
        self.local_index(place.id()).expect("place belongs to the algebra's place set")
    }

    /// A place `v` with `p^{v_p(n)} | e_v`, first in place order.
    ///
    /// One always exists for a division algebra, because the global index is
    /// the lcm of the local ones.
    pub fn p_primary_witness(&self, p: u64) -> Result<&Place, BrauerError> {
        self.p_primary_witnesses(p).map(|mut w| w.remove(0))
    }

    /// Every place satisfying the witness condition, in place order.
    pub fn p_primary_witnesses(&self, p: u64) -> Result<Vec<&Place>, BrauerError> {
        if !is_prime(p) {
            return Err(BrauerError::NotPrime(p));
        }
        if self.degree % p != 0 {
            return Err(BrauerError::PrimeDoesNotDivide { p, degree: self.degree });
        }
        if !self.is_division() {
            return Err(BrauerError::NotDivision {
                degree: self.degree,
                order: self.class.order(),
            });
        }
        let pp = p.pow(valuation(self.degree, p));
        let found: Vec<&Place> = self
            .class
            .support()
            .filter(|(_, v)| v.order_u64().is_some_and(|e| e % pp == 0))
            .map(|(place, _)| place)
            .collect();
        assert!(!found.is_empty(), "a division algebra has a p-primary witness");
        Ok(found)
    }
}

impl fmt::Display for AlgebraDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (degree {})", self.class, self.degree)
    }
}
