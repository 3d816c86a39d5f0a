//! The two supported complete MV-chains: the real interval `[0,k]` and the
//! finite chain `{0..k}`.
//!
//! The algebra is a context object; bulk operations take bare scalars and
//! assume they were validated against it. [`MvValue`] is the checked form.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraKind {
    RealInterval,
    FiniteChain,
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgebraKind::RealInterval => "real",
            AlgebraKind::FiniteChain => "chain",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MvError {
    #[error("algebra mismatch: {left} vs {right}")]
    AlgebraMismatch { left: String, right: String },
    #[error("value {value} is outside {algebra}")]
    OutOfRange { value: String, algebra: String },
    #[error("scale must be a positive integer, got {0}")]
    InvalidScale(u64),
    #[error("the real interval needs a scalar type with exact division")]
    NeedsField,
}

/// An MV-chain with bottom 0 and top `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MvAlgebra<T> {
    kind: AlgebraKind,
    scale: u64,
    top: T,
}

impl<T: Scalar> MvAlgebra<T> {
    pub fn new(kind: AlgebraKind, k: u64) -> Result<Self, MvError> {
        if k == 0 {
            return Err(MvError::InvalidScale(k));
        }
        if kind == AlgebraKind::RealInterval && !T::is_field() {
            return Err(MvError::NeedsField);
        }
        Ok(MvAlgebra { kind, scale: k, top: T::from_count(k) })
    }

    pub fn real(k: u64) -> Result<Self, MvError> {
        Self::new(AlgebraKind::RealInterval, k)
    }

    pub fn chain(k: u64) -> Result<Self, MvError> {
        Self::new(AlgebraKind::FiniteChain, k)
    }

    /// `[0,1]`, the algebra of probabilities and distances.
    pub fn unit_interval() -> Self {
        Self::real(1).expect("unit interval over a field")
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn top(&self) -> T {
        self.top.clone()
    }

    pub fn bottom(&self) -> T {
        T::zero()
    }

    pub fn is_unit_interval(&self) -> bool {
        self.kind == AlgebraKind::RealInterval && self.scale == 1
    }

    pub fn contains(&self, x: &T) -> bool {
        !x.is_negative()
            && *x <= self.top
            && (self.kind == AlgebraKind::RealInterval || x.is_integral())
    }

    pub fn check(&self, x: &T) -> Result<(), MvError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(MvError::OutOfRange { value: x.to_fraction_string(), algebra: self.to_string() })
        }
    }

    /// Converts an exact rational into a checked element.
    pub fn element(&self, r: &BigRational) -> Result<T, MvError> {
        let out_of_range =
            || MvError::OutOfRange { value: fraction(r), algebra: self.to_string() };
        let x = T::from_ratio(r).ok_or_else(out_of_range)?;
        self.check(&x)?;
        Ok(x)
    }

    pub fn value(&self, x: T) -> Result<MvValue<T>, MvError> {
        self.check(&x)?;
        Ok(MvValue { algebra: self.clone(), value: x })
    }

    /// `min(x + y, k)`.
    pub fn oplus(&self, x: &T, y: &T) -> T {
        let s = x.clone() + y.clone();
        if s > self.top {
            self.top.clone()
        } else {
            s
        }
    }

    /// `max(0, x - y)`.
    pub fn ominus(&self, x: &T, y: &T) -> T {
        if y >= x {
            T::zero()
        } else {
            x.clone() - y.clone()
        }
    }

    /// `k - x`.
    pub fn complement(&self, x: &T) -> T {
        self.top.clone() - x.clone()
    }

    /// `(x ⊖ y) ⊕ y`, which is the maximum on a chain.
    pub fn join(&self, x: &T, y: &T) -> T {
        self.oplus(&self.ominus(x, y), y)
    }

    /// `x ⊖ (x ⊖ y)`, which is the minimum on a chain.
    pub fn meet(&self, x: &T, y: &T) -> T {
        self.ominus(x, &self.ominus(x, y))
    }

    pub fn leq(&self, x: &T, y: &T) -> bool {
        x <= y
    }

    /// Every element of a finite chain, bottom first.
    pub fn chain_elements(&self) -> Option<Vec<T>> {
        (self.kind == AlgebraKind::FiniteChain)
            .then(|| (0..=self.scale).map(T::from_count).collect())
    }
}

fn fraction(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl<T> fmt::Display for MvAlgebra<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AlgebraKind::RealInterval => write!(f, "[0,{}]", self.scale),
            AlgebraKind::FiniteChain => write!(f, "{{0..{}}}", self.scale),
        }
    }
}

/// A value tagged with the algebra it lives in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MvValue<T> {
    algebra: MvAlgebra<T>,
    value: T,
}

impl<T: Scalar> MvValue<T> {
    pub fn algebra(&self) -> &MvAlgebra<T> {
        &self.algebra
    }

    pub fn get(&self) -> &T {
        &self.value
    }

    pub fn into_inner(self) -> T {
        self.value
    }

    fn same_algebra(&self, other: &Self) -> Result<(), MvError> {
        if self.algebra == other.algebra {
            Ok(())
        } else {
            Err(MvError::AlgebraMismatch {
                left: self.algebra.to_string(),
                right: other.algebra.to_string(),
            })
        }
    }

    fn lift(&self, value: T) -> Self {
        MvValue { algebra: self.algebra.clone(), value }
    }

    pub fn oplus(&self, other: &Self) -> Result<Self, MvError> {
        self.same_algebra(other)?;
        Ok(self.lift(self.algebra.oplus(&self.value, &other.value)))
    }

    pub fn ominus(&self, other: &Self) -> Result<Self, MvError> {
        self.same_algebra(other)?;
        Ok(self.lift(self.algebra.ominus(&self.value, &other.value)))
    }

    pub fn complement(&self) -> Self {
        self.lift(self.algebra.complement(&self.value))
    }

    pub fn join(&self, other: &Self) -> Result<Self, MvError> {
        self.same_algebra(other)?;
        Ok(self.lift(self.algebra.join(&self.value, &other.value)))
    }

    pub fn meet(&self, other: &Self) -> Result<Self, MvError> {
        self.same_algebra(other)?;
        Ok(self.lift(self.algebra.meet(&self.value, &other.value)))
    }

    pub fn leq(&self, other: &Self) -> Result<bool, MvError> {
        self.same_algebra(other)?;
        Ok(self.value <= other.value)
    }
}

impl<T: Scalar> fmt::Display for MvValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value.to_fraction_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    type Q = BigRational;

    fn unit() -> MvAlgebra<Q> {
        MvAlgebra::unit_interval()
    }

    #[test]
    fn truncated_sum() {
        let m = unit();
        assert_eq!(m.oplus(&ratio(1, 2), &ratio(7, 10)), ratio(1, 1));
        assert_eq!(m.oplus(&ratio(1, 3), &ratio(0, 1)), ratio(1, 3));
        let c = MvAlgebra::<i64>::chain(5).unwrap();
        assert_eq!(c.oplus(&3, &4), 5);
    }

    #[test]
    fn truncated_difference() {
        let m = unit();
        assert_eq!(m.ominus(&ratio(3, 10), &ratio(1, 2)), ratio(0, 1));
        assert_eq!(m.ominus(&ratio(3, 10), &ratio(0, 1)), ratio(3, 10));
        let c = MvAlgebra::<i64>::chain(5).unwrap();
        assert_eq!(c.ominus(&4, &1), 3);
    }

    #[test]
    fn complement_is_involutive() {
        let m = unit();
        assert_eq!(m.complement(&ratio(0, 1)), ratio(1, 1));
        assert_eq!(m.complement(&ratio(1, 3)), ratio(2, 3));
        assert_eq!(m.complement(&m.complement(&ratio(2, 7))), ratio(2, 7));
    }

    #[test]
    fn lattice_operations_are_max_and_min() {
        let c = MvAlgebra::<i64>::chain(4).unwrap();
        for x in 0..=4 {
            for y in 0..=4 {
                assert_eq!(c.join(&x, &y), x.max(y));
                assert_eq!(c.meet(&x, &y), x.min(y));
            }
        }
    }

    #[test]
    fn membership() {
        let c = MvAlgebra::<Q>::chain(3).unwrap();
        assert!(c.contains(&ratio(2, 1)));
        assert!(!c.contains(&ratio(1, 2)));
        assert!(!c.contains(&ratio(4, 1)));
        assert!(unit().contains(&ratio(1, 2)));
        assert!(!unit().contains(&ratio(-1, 2)));
        assert!(c.element(&ratio(7, 2)).is_err());
        assert_eq!(MvAlgebra::<i64>::real(1), Err(MvError::NeedsField));
        assert_eq!(MvAlgebra::<i64>::chain(0), Err(MvError::InvalidScale(0)));
    }

    #[test]
    fn checked_values_reject_mixed_algebras() {
        let a = unit().value(ratio(1, 2)).unwrap();
        let b = MvAlgebra::<Q>::real(2).unwrap().value(ratio(1, 2)).unwrap();
        assert!(matches!(a.oplus(&b), Err(MvError::AlgebraMismatch { .. })));
        assert_eq!(a.oplus(&a).unwrap().get(), &ratio(1, 1));
        assert_eq!(a.complement().to_string(), "1/2");
        assert!(a.leq(&a).unwrap());
    }

    #[test]
    fn chain_elements_enumerate() {
        let c = MvAlgebra::<i64>::chain(3).unwrap();
        assert_eq!(c.chain_elements(), Some(vec![0, 1, 2, 3]));
        assert_eq!(unit().chain_elements(), None);
    }
}
