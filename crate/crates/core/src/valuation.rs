//! Total valuations `Y → M` and subsets of a carrier.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::mv::{MvAlgebra, MvError};
use crate::scalar::Scalar;
use crate::set::{Carrier, Element, FiniteSet, SetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValuationError {
    #[error("domain mismatch: expected {expected}, found {found}")]
    DomainMismatch { expected: String, found: String },
    #[error("expected {expected} values, found {found}")]
    Length { expected: usize, found: usize },
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Mv(#[from] MvError),
}

fn mismatch(expected: &FiniteSet, found: &FiniteSet) -> ValuationError {
    ValuationError::DomainMismatch { expected: expected.to_string(), found: found.to_string() }
}

/// A subset of a carrier, stored as positions.
#[derive(Clone, PartialEq, Eq)]
pub struct Subset {
    domain: Carrier,
    members: BTreeSet<usize>,
}

impl Subset {
    pub fn empty(domain: &Carrier) -> Self {
        Subset { domain: domain.clone(), members: BTreeSet::new() }
    }

    pub fn full(domain: &Carrier) -> Self {
        Subset { domain: domain.clone(), members: (0..domain.len()).collect() }
    }

    /// Panics on out-of-range positions.
    pub fn from_indices(domain: &Carrier, indices: impl IntoIterator<Item = usize>) -> Self {
        let members: BTreeSet<usize> = indices.into_iter().collect();
        assert!(members.iter().all(|&i| i < domain.len()), "subset position out of range");
        Subset { domain: domain.clone(), members }
    }

    pub fn from_elements<'e>(
        domain: &Carrier,
        elements: impl IntoIterator<Item = &'e Element>,
    ) -> Result<Self, SetError> {
        let members = elements.into_iter().map(|e| domain.require(e)).collect::<Result<_, _>>()?;
        Ok(Subset { domain: domain.clone(), members })
    }

    pub fn domain(&self) -> &Carrier {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.members.contains(&i)
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.domain.position(e).is_some_and(|i| self.members.contains(&i))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> + '_ {
        self.members.iter().map(|&i| self.domain.get(i))
    }

    pub fn insert(&mut self, i: usize) -> bool {
        assert!(i < self.domain.len(), "subset position out of range");
        self.members.insert(i)
    }

    pub fn union(&self, other: &Subset) -> Subset {
        self.same_domain(other);
        Subset { domain: self.domain.clone(), members: &self.members | &other.members }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        self.same_domain(other);
        Subset { domain: self.domain.clone(), members: &self.members & &other.members }
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        self.same_domain(other);
        Subset { domain: self.domain.clone(), members: &self.members - &other.members }
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.same_domain(other);
        self.members.is_subset(&other.members)
    }

    fn same_domain(&self, other: &Subset) {
        debug_assert!(
            Arc::ptr_eq(&self.domain, &other.domain) || *self.domain == *other.domain,
            "subsets over different carriers"
        );
    }

    /// The same elements over a set-equal carrier.
    pub fn reorder_to(&self, target: &Carrier) -> Result<Subset, ValuationError> {
        if Arc::ptr_eq(&self.domain, target) || *self.domain == **target {
            return Ok(Subset { domain: target.clone(), members: self.members.clone() });
        }
        if !self.domain.same_elements(target) {
            return Err(mismatch(target, &self.domain));
        }
        Ok(Subset::from_elements(target, self.elements()).expect("set-equal carriers"))
    }

    /// Members lying in the window `[offset, offset + len)`, shifted to zero.
    pub(crate) fn window(&self, offset: usize, domain: &Carrier) -> Subset {
        let end = offset + domain.len();
        Subset {
            domain: domain.clone(),
            members: self.members.range(offset..end).map(|i| i - offset).collect(),
        }
    }

    pub(crate) fn concat(left: &Subset, right: &Subset, domain: &Carrier) -> Subset {
        let shift = left.domain.len();
        debug_assert_eq!(shift + right.domain.len(), domain.len());
        Subset {
            domain: domain.clone(),
            members: left.members.iter().copied().chain(right.members.iter().map(|i| i + shift)).collect(),
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A total map from a carrier into the scalar type.
#[derive(Clone, PartialEq, Eq)]
pub struct Valuation<T> {
    domain: Carrier,
    values: Vec<T>,
}

impl<T: Scalar> Valuation<T> {
    pub fn new(domain: &Carrier, values: Vec<T>) -> Result<Self, ValuationError> {
        if values.len() != domain.len() {
            return Err(ValuationError::Length { expected: domain.len(), found: values.len() });
        }
        Ok(Valuation { domain: domain.clone(), values })
    }

    pub fn constant(domain: &Carrier, value: T) -> Self {
        Valuation { domain: domain.clone(), values: vec![value; domain.len()] }
    }

    pub fn zero(domain: &Carrier) -> Self {
        Self::constant(domain, T::zero())
    }

    /// Missing entries take `default`.
    pub fn from_entries(
        domain: &Carrier,
        entries: impl IntoIterator<Item = (Element, T)>,
        default: T,
    ) -> Result<Self, ValuationError> {
        let mut values = vec![default; domain.len()];
        for (e, v) in entries {
            values[domain.require(&e)?] = v;
        }
        Ok(Valuation { domain: domain.clone(), values })
    }

    pub fn from_fn(domain: &Carrier, f: impl FnMut(&Element) -> T) -> Self {
        Valuation { domain: domain.clone(), values: domain.elements().iter().map(f).collect() }
    }

    pub fn domain(&self) -> &Carrier {
        &self.domain
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn at(&self, i: usize) -> &T {
        &self.values[i]
    }

    pub fn get(&self, e: &Element) -> Option<&T> {
        self.domain.position(e).map(|i| &self.values[i])
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Element, &T)> + '_ {
        self.domain.elements().iter().zip(&self.values)
    }

    pub fn check_in(&self, alg: &MvAlgebra<T>) -> Result<(), ValuationError> {
        self.values.iter().try_for_each(|v| alg.check(v)).map_err(Into::into)
    }

    /// The largest value; `0` on the empty carrier.
    pub fn norm(&self) -> T {
        self.values.iter().max().cloned().unwrap_or_else(T::zero)
    }

    /// `[Y]^a`: positions with a nonzero value.
    pub fn support_nonzero(&self) -> Subset {
        Subset::from_indices(
            &self.domain,
            self.values.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, _)| i),
        )
    }

    /// `δ` on `s`, `0` elsewhere.
    pub fn delta_on(delta: &T, s: &Subset) -> Self {
        let mut values = vec![T::zero(); s.domain().len()];
        for i in s.indices() {
            values[i] = delta.clone();
        }
        Valuation { domain: s.domain().clone(), values }
    }

    fn zip_with(
        &self,
        other: &Valuation<T>,
        f: impl Fn(&T, &T) -> T,
    ) -> Result<Valuation<T>, ValuationError> {
        self.require_domain(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| f(x, y)).collect();
        Ok(Valuation { domain: self.domain.clone(), values })
    }

    pub fn oplus(&self, other: &Valuation<T>, alg: &MvAlgebra<T>) -> Result<Self, ValuationError> {
        self.zip_with(other, |x, y| alg.oplus(x, y))
    }

    pub fn ominus(&self, other: &Valuation<T>, alg: &MvAlgebra<T>) -> Result<Self, ValuationError> {
        self.zip_with(other, |x, y| alg.ominus(x, y))
    }

    pub fn complement(&self, alg: &MvAlgebra<T>) -> Self {
        self.map(|x| alg.complement(x))
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Valuation { domain: self.domain.clone(), values: self.values.iter().map(f).collect() }
    }

    /// Pointwise order.
    pub fn leq(&self, other: &Valuation<T>) -> Result<bool, ValuationError> {
        self.require_domain(other)?;
        Ok(self.values.iter().zip(&other.values).all(|(x, y)| x <= y))
    }

    /// `{y | a(y) = b(y)}`.
    pub fn agreement_set(&self, other: &Valuation<T>) -> Result<Subset, ValuationError> {
        self.require_domain(other)?;
        Ok(Subset::from_indices(
            &self.domain,
            (0..self.values.len()).filter(|&i| self.values[i] == other.values[i]),
        ))
    }

    /// `{y | a(y) ≠ b(y)}`.
    pub fn disagreement_set(&self, other: &Valuation<T>) -> Result<Subset, ValuationError> {
        let agree = self.agreement_set(other)?;
        Ok(Subset::full(&self.domain).difference(&agree))
    }

    pub(crate) fn require_domain(&self, other: &Valuation<T>) -> Result<(), ValuationError> {
        if Arc::ptr_eq(&self.domain, &other.domain) || *self.domain == *other.domain {
            Ok(())
        } else {
            Err(mismatch(&self.domain, &other.domain))
        }
    }

    /// The same map over a set-equal carrier.
    pub fn reorder_to(&self, target: &Carrier) -> Result<Self, ValuationError> {
        if Arc::ptr_eq(&self.domain, target) || *self.domain == **target {
            return Ok(Valuation { domain: target.clone(), values: self.values.clone() });
        }
        let perm = self.domain.permutation_to(target).ok_or_else(|| mismatch(target, &self.domain))?;
        Ok(Valuation { domain: target.clone(), values: perm.iter().map(|&i| self.values[i].clone()).collect() })
    }

    pub(crate) fn window(&self, offset: usize, domain: &Carrier) -> Self {
        Valuation {
            domain: domain.clone(),
            values: self.values[offset..offset + domain.len()].to_vec(),
        }
    }

    pub(crate) fn concat(left: &Self, right: &Self, domain: &Carrier) -> Self {
        debug_assert_eq!(left.values.len() + right.values.len(), domain.len());
        Valuation {
            domain: domain.clone(),
            values: left.values.iter().chain(&right.values).cloned().collect(),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Valuation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (e, v)) in self.domain.elements().iter().zip(&self.values).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}: {v}")?;
        }
        f.write_str("}")
    }
}

impl<T: fmt::Display> fmt::Debug for Valuation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    type Q = BigRational;

    fn xyuz() -> Carrier {
        FiniteSet::atoms(["x", "y", "u", "z"]).unwrap()
    }

    fn val(values: &[(i64, i64)]) -> Valuation<Q> {
        Valuation::new(&xyuz(), values.iter().map(|&(p, q)| ratio(p, q)).collect()).unwrap()
    }

    #[test]
    fn norm_is_the_maximum() {
        let s = FiniteSet::atoms(["x", "y"]).unwrap();
        let a = Valuation::new(&s, vec![ratio(1, 5), ratio(7, 10)]).unwrap();
        assert_eq!(a.norm(), ratio(7, 10));
        assert_eq!(Valuation::<Q>::zero(&s).norm(), ratio(0, 1));
        assert_eq!(Valuation::<Q>::zero(&FiniteSet::empty()).norm(), ratio(0, 1));
        let p = FiniteSet::atoms(["p", "q"]).unwrap();
        assert_eq!(Valuation::new(&p, vec![2i64, 5]).unwrap().norm(), 5);
    }

    #[test]
    fn support_of_least_termination_fixpoint() {
        let mu = val(&[(1, 2), (0, 1), (1, 1), (0, 1)]);
        assert_eq!(mu.support_nonzero().to_string(), "{x, u}");
        assert_eq!(val(&[(1, 1); 4]).support_nonzero().len(), 4);
        assert!(val(&[(0, 1); 4]).support_nonzero().is_empty());
    }

    #[test]
    fn delta_on_a_subset() {
        let d = xyuz();
        let s = Subset::from_elements(&d, &[Element::atom("y"), Element::atom("z")]).unwrap();
        let v = Valuation::delta_on(&ratio(1, 4), &s);
        assert_eq!(v, val(&[(0, 1), (1, 4), (0, 1), (1, 4)]));
        assert_eq!(Valuation::delta_on(&ratio(1, 4), &Subset::empty(&d)), Valuation::zero(&d));
        assert_eq!(
            Valuation::delta_on(&ratio(1, 1), &Subset::full(&d)),
            Valuation::constant(&d, ratio(1, 1))
        );
    }

    #[test]
    fn pointwise_operations() {
        let m = crate::mv::MvAlgebra::unit_interval();
        let a = val(&[(1, 2), (1, 1), (0, 1), (1, 3)]);
        let b = val(&[(1, 2), (1, 2), (1, 2), (1, 2)]);
        assert_eq!(a.oplus(&b, &m).unwrap(), val(&[(1, 1), (1, 1), (1, 2), (5, 6)]));
        assert_eq!(a.ominus(&b, &m).unwrap(), val(&[(0, 1), (1, 2), (0, 1), (0, 1)]));
        assert!(!a.leq(&b).unwrap());
        assert_eq!(a.agreement_set(&b).unwrap().to_string(), "{x}");
        assert_eq!(a.disagreement_set(&b).unwrap().to_string(), "{y, u, z}");
        assert_eq!(b.ominus(&a, &m).unwrap().norm(), ratio(1, 2));
    }

    #[test]
    fn reordering_follows_elements() {
        let a = val(&[(1, 2), (1, 1), (0, 1), (1, 3)]);
        let other = FiniteSet::atoms(["z", "u", "y", "x"]).unwrap();
        let r = a.reorder_to(&other).unwrap();
        assert_eq!(r.values(), &[ratio(1, 3), ratio(0, 1), ratio(1, 1), ratio(1, 2)]);
        assert_eq!(r.get(&Element::atom("x")), Some(&ratio(1, 2)));
        let wrong = FiniteSet::atoms(["x"]).unwrap();
        assert!(a.reorder_to(&wrong).is_err());
    }

    #[test]
    fn domain_mismatch_is_reported() {
        let a = val(&[(1, 2), (1, 1), (0, 1), (1, 3)]);
        let b = Valuation::<Q>::zero(&FiniteSet::atoms(["x"]).unwrap());
        assert!(matches!(a.leq(&b), Err(ValuationError::DomainMismatch { .. })));
    }

    #[test]
    fn windows_and_concatenation() {
        let l = FiniteSet::atoms(["a"]).unwrap();
        let r = FiniteSet::atoms(["b", "c"]).unwrap();
        let lr = FiniteSet::sum(&l, &r).unwrap();
        let s = Subset::from_indices(&lr, [0, 2]);
        assert_eq!(s.window(1, &r).to_string(), "{c}");
        assert_eq!(Subset::concat(&s.window(0, &l), &s.window(1, &r), &lr), s);
    }
}
