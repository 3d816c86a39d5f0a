//! Finitely supported probability distributions with exact weights.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;
use crate::set::{Carrier, Element, SetError};
use crate::valuation::{Subset, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistributionError {
    #[error("weights sum to {0}, not 1")]
    Sum(String),
    #[error("negative weight {weight} at `{element}`")]
    Negative { element: Element, weight: String },
    #[error("`{0}` is weighted twice")]
    Repeated(Element),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Invariant: positive weights, sorted by position, summing to exactly 1.
#[derive(Clone, PartialEq, Eq)]
pub struct Distribution<T> {
    base: Carrier,
    weights: Vec<(usize, T)>,
}

impl<T: Scalar> Distribution<T> {
    pub fn new(
        base: &Carrier,
        weights: impl IntoIterator<Item = (usize, T)>,
    ) -> Result<Self, DistributionError> {
        let mut ws: Vec<(usize, T)> = Vec::new();
        for (i, w) in weights {
            assert!(i < base.len(), "distribution position out of range");
            if w.is_negative() {
                return Err(DistributionError::Negative {
                    element: base.get(i).clone(),
                    weight: w.to_fraction_string(),
                });
            }
            ws.push((i, w));
        }
        ws.sort_by_key(|(i, _)| *i);
        if let Some(w) = ws.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(DistributionError::Repeated(base.get(w[0].0).clone()));
        }
        ws.retain(|(_, w)| !w.is_zero());
        let total = ws.iter().fold(T::zero(), |acc, (_, w)| acc + w.clone());
        if !total.is_one() {
            return Err(DistributionError::Sum(total.to_fraction_string()));
        }
        Ok(Distribution { base: base.clone(), weights: ws })
    }

    pub fn from_elements(
        base: &Carrier,
        weights: impl IntoIterator<Item = (Element, T)>,
    ) -> Result<Self, DistributionError> {
        let ws = weights
            .into_iter()
            .map(|(e, w)| Ok((base.require(&e)?, w)))
            .collect::<Result<Vec<_>, DistributionError>>()?;
        Self::new(base, ws)
    }

    pub fn point(base: &Carrier, i: usize) -> Self {
        Self::new(base, [(i, T::one())]).expect("a point mass is a distribution")
    }

    pub fn base(&self) -> &Carrier {
        &self.base
    }

    /// `(position, weight)` pairs with positive weight, by position.
    pub fn weights(&self) -> &[(usize, T)] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> T {
        self.weights
            .binary_search_by_key(&i, |(j, _)| *j)
            .map(|k| self.weights[k].1.clone())
            .unwrap_or_else(|_| T::zero())
    }

    pub fn support(&self) -> Subset {
        Subset::from_indices(&self.base, self.weights.iter().map(|(i, _)| *i))
    }

    /// `Σ p(y)·a(y)`; `a` must live on the base.
    pub fn expectation(&self, a: &Valuation<T>) -> T {
        debug_assert_eq!(a.domain().len(), self.base.len());
        self.weights
            .iter()
            .fold(T::zero(), |acc, (i, w)| acc + w.clone() * a.at(*i).clone())
    }

    pub fn reorder_to(&self, target: &Carrier) -> Result<Self, DistributionError> {
        let ws = self
            .weights
            .iter()
            .map(|(i, w)| Ok((target.require(self.base.get(*i))?, w.clone())))
            .collect::<Result<Vec<_>, DistributionError>>()?;
        Self::new(target, ws)
    }
}

impl<T: fmt::Display> fmt::Display for Distribution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (i, w)) in self.weights.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}: {w}", self.base.get(*i))?;
        }
        f.write_str("}")
    }
}

impl<T: fmt::Display> fmt::Debug for Distribution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
