//! Exact non-negative rationals and their classes in ℚ/ℤ.

use std::fmt;
use std::ops::{Add, Neg};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FractionError {
    #[error("denominator must be positive")]
    ZeroDenominator,
    #[error("malformed fraction {0:?}, expected \"a/b\"")]
    Malformed(String),
}

/// A non-negative rational number kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedFraction {
    numer: BigUint,
    denom: BigUint,
}

impl ReducedFraction {
    pub fn new(numer: impl Into<BigUint>, denom: impl Into<BigUint>) -> Result<Self, FractionError> {
        let numer = numer.into();
        let denom = denom.into();
        if denom.is_zero() {
            return Err(FractionError::ZeroDenominator);
        }
        let g = numer.gcd(&denom);
        if numer.is_zero() {
            return Ok(Self::zero());
        }
        Ok(Self {
            numer: numer / &g,
            denom: denom / g,
        })
    }

    pub fn zero() -> Self {
        Self {
            numer: BigUint::zero(),
            denom: BigUint::one(),
        }
    }

    pub fn one() -> Self {
        Self {
            numer: BigUint::one(),
            denom: BigUint::one(),
        }
    }

    /// `1/n`.
    pub fn unit(n: u64) -> Result<Self, FractionError> {
        Self::new(1u32, n)
    }

    pub fn numer(&self) -> &BigUint {
        &self.numer
    }

    pub fn denom(&self) -> &BigUint {
        &self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }
}

impl fmt::Display for ReducedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

/// An element of ℚ/ℤ, stored as its unique representative in `[0, 1)`.
///
/// Zero is `0/1`. The denominator of the representative is the additive
/// order of the element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QMod1(ReducedFraction);

impl QMod1 {
    /// Reduces `numer/denom` modulo 1. Negative numerators are allowed.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigUint>) -> Result<Self, FractionError> {
        let numer: BigInt = numer.into();
        let denom: BigUint = denom.into();
        if denom.is_zero() {
            return Err(FractionError::ZeroDenominator);
        }
        let d = BigInt::from_biguint(Sign::Plus, denom.clone());
        let r = numer.mod_floor(&d);
        let r = r.to_biguint().expect("mod_floor by a positive modulus is non-negative");
        Ok(Self(ReducedFraction::new(r, denom)?))
    }

    pub fn zero() -> Self {
        Self(ReducedFraction::zero())
    }

    pub fn half() -> Self {
        Self(ReducedFraction {
            numer: BigUint::one(),
            denom: BigUint::from(2u32),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numer(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigUint {
        self.0.denom()
    }

    /// Additive order in ℚ/ℤ.
    pub fn order(&self) -> &BigUint {
        self.0.denom()
    }

    /// The denominator as a machine integer, when it fits.
    pub fn order_u64(&self) -> Option<u64> {
        self.0.denom().to_u64()
    }

    pub fn as_fraction(&self) -> &ReducedFraction {
        &self.0
    }

    /// `k·self` in ℚ/ℤ.
    pub fn times(&self, k: u64) -> Self {
        let n = self.numer() * BigUint::from(k);
        Self::new(BigInt::from(n), self.denom().clone()).expect("denominator is positive")
    }
}

impl Add for &QMod1 {
    type Output = QMod1;

    fn add(self, rhs: &QMod1) -> QMod1 {
        let numer = self.numer() * rhs.denom() + rhs.numer() * self.denom();
        let denom = self.denom() * rhs.denom();
        QMod1::new(BigInt::from(numer), denom).expect("product of positive denominators")
    }
}

impl Add for QMod1 {
    type Output = QMod1;

    fn add(self, rhs: QMod1) -> QMod1 {
        &self + &rhs
    }
}

impl Neg for &QMod1 {
    type Output = QMod1;

    fn neg(self) -> QMod1 {
        QMod1::new(-BigInt::from(self.numer().clone()), self.denom().clone())
            .expect("denominator is positive")
    }
}

impl Neg for QMod1 {
    type Output = QMod1;

    fn neg(self) -> QMod1 {
        -&self
    }
}

impl fmt::Display for QMod1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Accepts `"a/b"` or a bare integer `"a"`; `a` may be negative. The value is
/// reduced modulo 1.
impl FromStr for QMod1 {
    type Err = FractionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || FractionError::Malformed(s.to_string());
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        if n.is_empty() || d.is_empty() || d.starts_with(['+', '-']) {
            return Err(malformed());
        }
        let numer: BigInt = n.parse().map_err(|_| malformed())?;
        let denom: BigInt = d.parse().map_err(|_| malformed())?;
        if denom.is_zero() {
            return Err(FractionError::ZeroDenominator);
        }
        if denom.is_negative() {
            return Err(malformed());
        }
        QMod1::new(numer, denom.to_biguint().expect("checked non-negative"))
    }
}
