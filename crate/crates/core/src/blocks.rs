//! Basic non-expansive functions `M^Y → M^Z` and their approximations.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::distribution::{Distribution, DistributionError};
use crate::mv::MvAlgebra;
use crate::scalar::Scalar;
use crate::set::{Carrier, Element, SetError};
use crate::valuation::{Subset, Valuation, ValuationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlockError {
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("expectation needs the unit interval, found {0}")]
    ExpectAlgebra(String),
    #[error("{0}")]
    Malformed(String),
    #[error("subset {subset} is not contained in the support {support}")]
    OutsideSupport { subset: String, support: String },
}

/// `R ⊆ input × output`, indexed by output.
#[derive(Clone, PartialEq, Eq)]
pub struct Relation {
    input: Carrier,
    output: Carrier,
    pairs: BTreeSet<(usize, usize)>,
    preimage: Vec<Vec<usize>>,
}

impl Relation {
    pub fn new(
        input: &Carrier,
        output: &Carrier,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let pairs: BTreeSet<(usize, usize)> = pairs.into_iter().collect();
        let mut preimage = vec![Vec::new(); output.len()];
        for &(y, z) in &pairs {
            assert!(y < input.len() && z < output.len(), "relation position out of range");
            preimage[z].push(y);
        }
        for p in &mut preimage {
            p.sort_unstable();
        }
        Relation { input: input.clone(), output: output.clone(), pairs, preimage }
    }

    pub fn from_elements(
        input: &Carrier,
        output: &Carrier,
        pairs: impl IntoIterator<Item = (Element, Element)>,
    ) -> Result<Self, SetError> {
        let pairs = pairs
            .into_iter()
            .map(|(y, z)| Ok((input.require(&y)?, output.require(&z)?)))
            .collect::<Result<Vec<_>, SetError>>()?;
        Ok(Self::new(input, output, pairs))
    }

    pub fn input(&self) -> &Carrier {
        &self.input
    }

    pub fn output(&self) -> &Carrier {
        &self.output
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn preimage(&self, z: usize) -> &[usize] {
        &self.preimage[z]
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (y, z)) in self.pairs.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({},{})", self.input.get(*y), self.output.get(*z))?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, PartialEq, Eq)]
pub enum BlockKind<T> {
    /// Constant `k`, a valuation on the output.
    Const(Valuation<T>),
    /// `a ∘ g`, with `g[z]` the input position read by output `z`.
    Reindex(Vec<usize>),
    /// Minimum over predecessors; `top` when there are none.
    MinRel(Relation),
    /// Maximum over predecessors; `0` when there are none.
    MaxRel(Relation),
    /// Expectation under each output distribution.
    Expect(Vec<Distribution<T>>),
    Add(Valuation<T>),
    Sub(Valuation<T>),
}

impl<T> BlockKind<T> {
    pub fn tag(&self) -> &'static str {
        match self {
            BlockKind::Const(_) => "const",
            BlockKind::Reindex(_) => "reindex",
            BlockKind::MinRel(_) => "minrel",
            BlockKind::MaxRel(_) => "maxrel",
            BlockKind::Expect(_) => "expect",
            BlockKind::Add(_) => "add",
            BlockKind::Sub(_) => "sub",
        }
    }
}

impl<T: fmt::Display> fmt::Debug for BlockKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockKind::Const(k) => write!(f, "const {k}"),
            BlockKind::Reindex(g) => write!(f, "reindex {g:?}"),
            BlockKind::MinRel(r) => write!(f, "minrel {r:?}"),
            BlockKind::MaxRel(r) => write!(f, "maxrel {r:?}"),
            BlockKind::Expect(ps) => write!(f, "expect {ps:?}"),
            BlockKind::Add(w) => write!(f, "add {w}"),
            BlockKind::Sub(w) => write!(f, "sub {w}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Block<T> {
    kind: BlockKind<T>,
    input: Carrier,
    output: Carrier,
    name: Option<Arc<str>>,
}

impl<T: Scalar> Block<T> {
    pub fn constant(input: &Carrier, k: Valuation<T>) -> Self {
        Block { output: k.domain().clone(), input: input.clone(), kind: BlockKind::Const(k), name: None }
    }

    pub fn reindex(input: &Carrier, output: &Carrier, g: Vec<usize>) -> Result<Self, BlockError> {
        if g.len() != output.len() {
            return Err(BlockError::Malformed(format!(
                "reindexing map has {} entries for {} outputs",
                g.len(),
                output.len()
            )));
        }
        if let Some(bad) = g.iter().find(|&&y| y >= input.len()) {
            return Err(BlockError::Malformed(format!("reindexing target {bad} out of range")));
        }
        Ok(Block { kind: BlockKind::Reindex(g), input: input.clone(), output: output.clone(), name: None })
    }

    /// `g` maps each output element to the input element it reads.
    pub fn reindex_by(
        input: &Carrier,
        output: &Carrier,
        g: impl Fn(&Element) -> Element,
    ) -> Result<Self, BlockError> {
        let g = output.elements().iter().map(|z| input.require(&g(z))).collect::<Result<_, _>>()?;
        Self::reindex(input, output, g)
    }

    pub fn min_rel(rel: Relation) -> Self {
        Block { input: rel.input.clone(), output: rel.output.clone(), kind: BlockKind::MinRel(rel), name: None }
    }

    pub fn max_rel(rel: Relation) -> Self {
        Block { input: rel.input.clone(), output: rel.output.clone(), kind: BlockKind::MaxRel(rel), name: None }
    }

    /// One distribution per output element, each on `input`.
    pub fn expect(
        input: &Carrier,
        output: &Carrier,
        dists: Vec<Distribution<T>>,
    ) -> Result<Self, BlockError> {
        if dists.len() != output.len() {
            return Err(BlockError::Malformed(format!(
                "{} distributions for {} outputs",
                dists.len(),
                output.len()
            )));
        }
        let dists = dists.iter().map(|p| p.reorder_to(input)).collect::<Result<_, _>>()?;
        Ok(Block { kind: BlockKind::Expect(dists), input: input.clone(), output: output.clone(), name: None })
    }

    pub fn add(w: Valuation<T>) -> Self {
        Block { input: w.domain().clone(), output: w.domain().clone(), kind: BlockKind::Add(w), name: None }
    }

    pub fn sub(w: Valuation<T>) -> Self {
        Block { input: w.domain().clone(), output: w.domain().clone(), kind: BlockKind::Sub(w), name: None }
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(Arc::from(name));
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn kind(&self) -> &BlockKind<T> {
        &self.kind
    }

    pub fn input(&self) -> &Carrier {
        &self.input
    }

    pub fn output(&self) -> &Carrier {
        &self.output
    }

    /// Checks that every parameter lies in `alg`.
    pub fn check_in(&self, alg: &MvAlgebra<T>) -> Result<(), BlockError> {
        match &self.kind {
            BlockKind::Const(k) => k.check_in(alg)?,
            BlockKind::Add(w) | BlockKind::Sub(w) => w.check_in(alg)?,
            BlockKind::Expect(_) if !alg.is_unit_interval() => {
                return Err(BlockError::ExpectAlgebra(alg.to_string()))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn apply(&self, a: &Valuation<T>, alg: &MvAlgebra<T>) -> Result<Valuation<T>, BlockError> {
        let a = a.reorder_to(&self.input)?;
        let out = &self.output;
        Ok(match &self.kind {
            BlockKind::Const(k) => k.clone(),
            BlockKind::Reindex(g) => {
                Valuation::new(out, g.iter().map(|&y| a.at(y).clone()).collect())?
            }
            BlockKind::MinRel(r) => Valuation::new(
                out,
                (0..out.len())
                    .map(|z| r.preimage(z).iter().map(|&y| a.at(y)).min().cloned().unwrap_or_else(|| alg.top()))
                    .collect(),
            )?,
            BlockKind::MaxRel(r) => Valuation::new(
                out,
                (0..out.len())
                    .map(|z| r.preimage(z).iter().map(|&y| a.at(y)).max().cloned().unwrap_or_else(T::zero))
                    .collect(),
            )?,
            BlockKind::Expect(ps) => {
                if !alg.is_unit_interval() {
                    return Err(BlockError::ExpectAlgebra(alg.to_string()));
                }
                Valuation::new(out, ps.iter().map(|p| p.expectation(&a)).collect())?
            }
            BlockKind::Add(w) => a.oplus(w, alg)?,
            BlockKind::Sub(w) => a.ominus(w, alg)?,
        })
    }

    /// The a-approximation applied to `yprime`.
    pub fn approx(
        &self,
        a: &Valuation<T>,
        yprime: &Subset,
        alg: &MvAlgebra<T>,
    ) -> Result<Subset, BlockError> {
        let a = a.reorder_to(&self.input)?;
        let fa = self.apply(&a, alg)?;
        let yprime = yprime.reorder_to(&self.input)?;
        let support = a.support_nonzero();
        if !yprime.is_subset(&support) {
            return Err(BlockError::OutsideSupport {
                subset: yprime.to_string(),
                support: support.to_string(),
            });
        }
        Ok(self.approx_at(&a, &fa, &yprime, alg))
    }

    /// Closed-form approximation; `a`, `fa` and `yprime` are already aligned
    /// with the interfaces and `yprime ⊆ [Y]^a`.
    pub(crate) fn approx_at(
        &self,
        a: &Valuation<T>,
        fa: &Valuation<T>,
        yprime: &Subset,
        alg: &MvAlgebra<T>,
    ) -> Subset {
        let out = &self.output;
        let live = |z: usize| !fa.at(z).is_zero();
        let select = |keep: &dyn Fn(usize) -> bool| {
            Subset::from_indices(out, (0..out.len()).filter(|&z| live(z) && keep(z)))
        };
        match &self.kind {
            BlockKind::Const(_) => Subset::empty(out),
            BlockKind::Reindex(g) => {
                Subset::from_indices(out, (0..out.len()).filter(|&z| yprime.contains_index(g[z])))
            }
            BlockKind::MinRel(r) => select(&|z| {
                let pre = r.preimage(z);
                pre.iter().any(|&y| a.at(y) == fa.at(z) && yprime.contains_index(y))
            }),
            BlockKind::MaxRel(r) => select(&|z| {
                let pre = r.preimage(z);
                pre.iter().all(|&y| a.at(y) != fa.at(z) || yprime.contains_index(y))
            }),
            BlockKind::Expect(ps) => {
                select(&|z| ps[z].weights().iter().all(|(y, _)| yprime.contains_index(*y)))
            }
            BlockKind::Add(w) => Subset::from_indices(
                out,
                yprime.indices().filter(|&y| a.at(y).clone() + w.at(y).clone() <= alg.top()),
            ),
            BlockKind::Sub(w) => Subset::from_indices(out, yprime.indices().filter(|&y| a.at(y) > w.at(y))),
        }
    }

    /// The block denoting `¬ ∘ f ∘ ¬`.
    pub fn conjugate(&self, alg: &MvAlgebra<T>) -> Self {
        let kind = match &self.kind {
            BlockKind::Const(k) => BlockKind::Const(k.complement(alg)),
            BlockKind::Reindex(g) => BlockKind::Reindex(g.clone()),
            BlockKind::MinRel(r) => BlockKind::MaxRel(r.clone()),
            BlockKind::MaxRel(r) => BlockKind::MinRel(r.clone()),
            BlockKind::Expect(ps) => BlockKind::Expect(ps.clone()),
            BlockKind::Add(w) => BlockKind::Sub(w.clone()),
            BlockKind::Sub(w) => BlockKind::Add(w.clone()),
        };
        Block { kind, input: self.input.clone(), output: self.output.clone(), name: self.name.clone() }
    }
}

impl<T> fmt::Debug for Block<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            Some(n) => write!(f, "{n}:{}", self.kind.tag()),
            None => f.write_str(self.kind.tag()),
        }
    }
}
