//! gs-monoidal diagrams over blocks: typed composition, evaluation, the
//! structural approximation, and complement conjugation.
//!
//! Carriers of tensors and wires are occurrence-tagged sums (see
//! [`crate::set`]), so a value on `Y + Z` is a value on `Y` followed by a
//! value on `Z`. Sequential composition only requires set equality of the
//! interface and realigns wires by element.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::blocks::{Block, BlockError};
use crate::mv::MvAlgebra;
use crate::scalar::Scalar;
use crate::set::{Carrier, FiniteSet, SetError};
use crate::valuation::{Subset, Valuation, ValuationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("at {path}: output {left} does not match input {right}")]
    Interface { path: String, left: String, right: String },
    #[error("at {path}: {source}")]
    Set { path: String, source: SetError },
    #[error("in block {block}: {source}")]
    Block { block: String, source: BlockError },
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error("diagram is not an endofunction: {input} -> {output}")]
    NotEndo { input: String, output: String },
    #[error("subset {subset} is not contained in the support {support}")]
    OutsideSupport { subset: String, support: String },
}

#[derive(Clone, PartialEq, Eq)]
pub enum Node<T> {
    Block(Arc<Block<T>>),
    Id(Carrier),
    /// `S + T → T + S`.
    Sym(Carrier, Carrier),
    /// `S → S + S`.
    Dup(Carrier),
    /// `S → ∅`.
    Disch(Carrier),
    /// First the left diagram, then the right.
    Seq(Arc<Diagram<T>>, Arc<Diagram<T>>),
    Tensor(Arc<Diagram<T>>, Arc<Diagram<T>>),
}

/// A well-typed diagram. Invariant: `input`/`output` are the interfaces the
/// node denotes, and every `Seq` joins set-equal interfaces.
#[derive(Clone, PartialEq, Eq)]
pub struct Diagram<T> {
    node: Node<T>,
    input: Carrier,
    output: Carrier,
}

fn set_error(path: &str, source: SetError) -> DiagramError {
    DiagramError::Set { path: path.to_string(), source }
}

impl<T: Scalar> Diagram<T> {
    pub fn block(b: Block<T>) -> Self {
        Diagram { input: b.input().clone(), output: b.output().clone(), node: Node::Block(Arc::new(b)) }
    }

    pub fn id(s: &Carrier) -> Self {
        Diagram { node: Node::Id(s.clone()), input: s.clone(), output: s.clone() }
    }

    pub fn sym(s: &Carrier, t: &Carrier) -> Result<Self, DiagramError> {
        let input = FiniteSet::sum(s, t).map_err(|e| set_error("sym", e))?;
        let output = FiniteSet::sum(t, s).map_err(|e| set_error("sym", e))?;
        Ok(Diagram { node: Node::Sym(s.clone(), t.clone()), input, output })
    }

    pub fn dup(s: &Carrier) -> Result<Self, DiagramError> {
        let output = FiniteSet::sum(s, s).map_err(|e| set_error("dup", e))?;
        Ok(Diagram { node: Node::Dup(s.clone()), input: s.clone(), output })
    }

    pub fn disch(s: &Carrier) -> Self {
        Diagram { node: Node::Disch(s.clone()), input: s.clone(), output: FiniteSet::empty() }
    }

    pub fn seq(first: Diagram<T>, then: Diagram<T>) -> Result<Self, DiagramError> {
        if !first.output.same_elements(&then.input) {
            return Err(DiagramError::Interface {
                path: "seq".into(),
                left: first.output.to_string(),
                right: then.input.to_string(),
            });
        }
        Ok(Diagram {
            input: first.input.clone(),
            output: then.output.clone(),
            node: Node::Seq(Arc::new(first), Arc::new(then)),
        })
    }

    pub fn tensor(left: Diagram<T>, right: Diagram<T>) -> Result<Self, DiagramError> {
        let input = FiniteSet::sum(&left.input, &right.input).map_err(|e| set_error("tensor", e))?;
        let output = FiniteSet::sum(&left.output, &right.output).map_err(|e| set_error("tensor", e))?;
        Ok(Diagram { input, output, node: Node::Tensor(Arc::new(left), Arc::new(right)) })
    }

    /// Left-to-right composition of a nonempty chain.
    pub fn chain(parts: impl IntoIterator<Item = Diagram<T>>) -> Result<Self, DiagramError> {
        let mut parts = parts.into_iter();
        let first = parts.next().expect("nonempty composition chain");
        parts.try_fold(first, Diagram::seq)
    }

    pub fn node(&self) -> &Node<T> {
        &self.node
    }

    pub fn input(&self) -> &Carrier {
        &self.input
    }

    pub fn output(&self) -> &Carrier {
        &self.output
    }

    pub fn is_endo(&self) -> bool {
        self.input.same_elements(&self.output)
    }

    pub fn require_endo(&self) -> Result<(), DiagramError> {
        if self.is_endo() {
            Ok(())
        } else {
            Err(DiagramError::NotEndo { input: self.input.to_string(), output: self.output.to_string() })
        }
    }

    pub fn blocks(&self) -> Vec<&Block<T>> {
        let mut out = Vec::new();
        self.collect_blocks(&mut out);
        out
    }

    fn collect_blocks<'a>(&'a self, out: &mut Vec<&'a Block<T>>) {
        match &self.node {
            Node::Block(b) => out.push(b),
            Node::Seq(l, r) | Node::Tensor(l, r) => {
                l.collect_blocks(out);
                r.collect_blocks(out);
            }
            _ => {}
        }
    }

    pub fn check_in(&self, alg: &MvAlgebra<T>) -> Result<(), DiagramError> {
        for b in self.blocks() {
            b.check_in(alg).map_err(|source| block_error(b, source))?;
        }
        Ok(())
    }

    pub fn evaluate(&self, a: &Valuation<T>, alg: &MvAlgebra<T>) -> Result<Valuation<T>, DiagramError> {
        let a = a.reorder_to(&self.input)?;
        self.eval_at(&a, alg, &mut None)
    }

    /// Evaluates an endo diagram and realigns the result with the input.
    pub fn step(&self, a: &Valuation<T>, alg: &MvAlgebra<T>) -> Result<Valuation<T>, DiagramError> {
        Ok(self.evaluate(a, alg)?.reorder_to(&self.input)?)
    }

    /// Evaluates and keeps the valuation on every internal wire.
    pub fn trace(&self, a: &Valuation<T>, alg: &MvAlgebra<T>) -> Result<Evaluation<'_, T>, DiagramError> {
        let a = a.reorder_to(&self.input)?;
        let mut log = Some(Vec::new());
        let output = self.eval_at(&a, alg, &mut log)?;
        let wires = log.unwrap_or_default();
        Ok(Evaluation { diagram: self, algebra: alg.clone(), input: a, output, wires })
    }

    /// `log` collects wire valuations in pre-order when present.
    fn eval_at(
        &self,
        a: &Valuation<T>,
        alg: &MvAlgebra<T>,
        log: &mut Option<Vec<Valuation<T>>>,
    ) -> Result<Valuation<T>, DiagramError> {
        if let Some(log) = log {
            log.push(a.clone());
        }
        Ok(match &self.node {
            Node::Block(b) => {
                let out = b.apply(a, alg).map_err(|source| block_error(b, source))?;
                if let Some(log) = log {
                    log.push(out.clone());
                }
                out
            }
            Node::Id(_) => a.clone(),
            Node::Sym(s, t) => {
                let ls = a.window(0, s);
                let rt = a.window(s.len(), t);
                Valuation::concat(&rt, &ls, &self.output)
            }
            Node::Dup(_) => Valuation::concat(a, a, &self.output),
            Node::Disch(_) => Valuation::zero(&self.output),
            Node::Seq(f, g) => {
                let mid = f.eval_at(a, alg, log)?;
                let mid = mid.reorder_to(&g.input)?;
                g.eval_at(&mid, alg, log)?
            }
            Node::Tensor(f, g) => {
                let l = f.eval_at(&a.window(0, &f.input), alg, log)?;
                let r = g.eval_at(&a.window(f.input.len(), &g.input), alg, log)?;
                Valuation::concat(&l, &r, &self.output)
            }
        })
    }

    /// The composite approximation `f_#^a(Y′)`.
    pub fn approximate(
        &self,
        a: &Valuation<T>,
        yprime: &Subset,
        alg: &MvAlgebra<T>,
    ) -> Result<Subset, DiagramError> {
        self.trace(a, alg)?.approximate(yprime)
    }

    /// Walks the wire log recorded by `eval_at` in the same pre-order.
    fn approx_at(&self, u: &Subset, alg: &MvAlgebra<T>, wires: &mut std::slice::Iter<'_, Valuation<T>>) -> Subset {
        let a = wires.next().expect("wire log matches the diagram");
        match &self.node {
            Node::Block(b) => {
                let fa = wires.next().expect("block output is logged");
                b.approx_at(a, fa, u, alg)
            }
            Node::Id(_) => u.clone(),
            Node::Sym(s, t) => {
                let ls = u.window(0, s);
                let rt = u.window(s.len(), t);
                Subset::concat(&rt, &ls, &self.output)
            }
            Node::Dup(_) => Subset::concat(u, u, &self.output),
            Node::Disch(_) => Subset::empty(&self.output),
            Node::Seq(f, g) => {
                let mid = f.approx_at(u, alg, wires);
                let mid = mid.reorder_to(&g.input).expect("interfaces are set-equal");
                g.approx_at(&mid, alg, wires)
            }
            Node::Tensor(f, g) => {
                let l = f.approx_at(&u.window(0, &f.input), alg, wires);
                let r = g.approx_at(&u.window(f.input.len(), &g.input), alg, wires);
                Subset::concat(&l, &r, &self.output)
            }
        }
    }

    /// The diagram denoting `¬ ∘ f ∘ ¬`.
    pub fn conjugate(&self, alg: &MvAlgebra<T>) -> Self {
        let node = match &self.node {
            Node::Block(b) => Node::Block(Arc::new(b.conjugate(alg))),
            Node::Seq(f, g) => Node::Seq(Arc::new(f.conjugate(alg)), Arc::new(g.conjugate(alg))),
            Node::Tensor(f, g) => Node::Tensor(Arc::new(f.conjugate(alg)), Arc::new(g.conjugate(alg))),
            structural => structural.clone(),
        };
        Diagram { node, input: self.input.clone(), output: self.output.clone() }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match &self.node {
            Node::Seq(l, r) | Node::Tensor(l, r) => 1 + l.size() + r.size(),
            _ => 1,
        }
    }
}

fn block_error<T: Scalar>(b: &Block<T>, source: BlockError) -> DiagramError {
    DiagramError::Block { block: format!("{b:?}"), source }
}

/// A diagram together with the valuations on all of its wires at one input.
pub struct Evaluation<'d, T> {
    diagram: &'d Diagram<T>,
    algebra: MvAlgebra<T>,
    input: Valuation<T>,
    output: Valuation<T>,
    wires: Vec<Valuation<T>>,
}

impl<T: Scalar> Evaluation<'_, T> {
    pub fn input(&self) -> &Valuation<T> {
        &self.input
    }

    pub fn output(&self) -> &Valuation<T> {
        &self.output
    }

    /// Every recorded wire valuation, in pre-order.
    pub fn wires(&self) -> &[Valuation<T>] {
        &self.wires
    }

    /// `f_#^a(Y′)` for the traced `a`; requires `Y′ ⊆ [Y]^a`.
    pub fn approximate(&self, yprime: &Subset) -> Result<Subset, DiagramError> {
        let u = yprime.reorder_to(self.diagram.input())?;
        let support = self.input.support_nonzero();
        if !u.is_subset(&support) {
            return Err(DiagramError::OutsideSupport { subset: u.to_string(), support: support.to_string() });
        }
        Ok(self.approximate_unchecked(&u))
    }

    /// As [`Self::approximate`] with `u` already aligned and inside the support.
    pub(crate) fn approximate_unchecked(&self, u: &Subset) -> Subset {
        let mut wires = self.wires.iter();
        let out = self.diagram.approx_at(u, &self.algebra, &mut wires);
        debug_assert!(wires.next().is_none());
        out
    }
}

/// An untyped diagram expression, checked by [`Term::typecheck`].
#[derive(Clone)]
pub enum Term<T> {
    Block(Arc<Block<T>>),
    Id(Carrier),
    Sym(Carrier, Carrier),
    Dup(Carrier),
    Disch(Carrier),
    Seq(Box<Term<T>>, Box<Term<T>>),
    Tensor(Box<Term<T>>, Box<Term<T>>),
    /// A named sub-term; its name labels error paths.
    Named(Arc<str>, Box<Term<T>>),
}

impl<T: Scalar> Term<T> {
    pub fn seq(l: Term<T>, r: Term<T>) -> Self {
        Term::Seq(Box::new(l), Box::new(r))
    }

    pub fn tensor(l: Term<T>, r: Term<T>) -> Self {
        Term::Tensor(Box::new(l), Box::new(r))
    }

    pub fn named(name: &str, t: Term<T>) -> Self {
        Term::Named(Arc::from(name), Box::new(t))
    }

    /// The interface, or the first mismatch with its sub-term path.
    pub fn typecheck(&self) -> Result<(Carrier, Carrier), DiagramError> {
        let d = self.build()?;
        Ok((d.input.clone(), d.output.clone()))
    }

    pub fn build(&self) -> Result<Diagram<T>, DiagramError> {
        self.build_at("")
    }

    fn build_at(&self, path: &str) -> Result<Diagram<T>, DiagramError> {
        let here = |seg: &str| if path.is_empty() { seg.to_string() } else { format!("{path}/{seg}") };
        let relabel = |e: DiagramError, p: String| match e {
            DiagramError::Interface { left, right, .. } => DiagramError::Interface { path: p, left, right },
            DiagramError::Set { source, .. } => DiagramError::Set { path: p, source },
            other => other,
        };
        match self {
            Term::Block(b) => Ok(Diagram::block((**b).clone())),
            Term::Id(s) => Ok(Diagram::id(s)),
            Term::Sym(s, t) => Diagram::sym(s, t).map_err(|e| relabel(e, here("sym"))),
            Term::Dup(s) => Diagram::dup(s).map_err(|e| relabel(e, here("dup"))),
            Term::Disch(s) => Ok(Diagram::disch(s)),
            Term::Seq(l, r) => {
                let p = here("seq");
                let l = l.build_at(&format!("{p}.0"))?;
                let r = r.build_at(&format!("{p}.1"))?;
                Diagram::seq(l, r).map_err(|e| relabel(e, if path.is_empty() { "<root>".into() } else { path.into() }))
            }
            Term::Tensor(l, r) => {
                let p = here("tensor");
                let l = l.build_at(&format!("{p}.0"))?;
                let r = r.build_at(&format!("{p}.1"))?;
                Diagram::tensor(l, r).map_err(|e| relabel(e, p))
            }
            Term::Named(name, t) => t.build_at(&here(name)),
        }
    }
}

impl<T: Scalar> fmt::Display for Diagram<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Node::Block(b) => match b.name() {
                Some(n) => f.write_str(n),
                None => write!(f, "<{}>", b.kind().tag()),
            },
            Node::Id(s) => write!(f, "id {s}"),
            Node::Sym(s, t) => write!(f, "sym {s} {t}"),
            Node::Dup(s) => write!(f, "dup {s}"),
            Node::Disch(s) => write!(f, "end {s}"),
            Node::Seq(l, r) => write!(f, "{l} ; {r}"),
            Node::Tensor(l, r) => {
                let wrap = |d: &Diagram<T>| match d.node {
                    Node::Seq(..) => format!("({d})"),
                    _ => d.to_string(),
                };
                write!(f, "{} | {}", wrap(l), wrap(r))
            }
        }
    }
}

impl<T: Scalar> fmt::Debug for Diagram<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} : {} -> {}", self.input, self.output)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::Relation;
    use crate::distribution::Distribution;
    use crate::scalar::ratio;
    use crate::set::Element;
    use num_rational::BigRational;

    type Q = BigRational;

    fn el(s: &str) -> Element {
        Element::atom(s)
    }

    /// Termination function of the four-state chain, as `(η* ∘ D̃) ⊗ c_1`.
    fn termination() -> (Carrier, Diagram<Q>) {
        let s = FiniteSet::atoms(["x", "y", "u", "z"]).unwrap();
        let t = FiniteSet::atoms(["u"]).unwrap();
        let nt = FiniteSet::difference(&s, &t);
        let d = FiniteSet::atoms(["p_x", "p_y", "p_z"]).unwrap();
        let px = Distribution::from_elements(&s, [(el("y"), ratio(1, 2)), (el("u"), ratio(1, 2))]).unwrap();
        let py = Distribution::from_elements(&s, [(el("z"), ratio(1, 1))]).unwrap();
        let pz = Distribution::from_elements(&s, [(el("y"), ratio(1, 1))]).unwrap();
        let expect = Block::expect(&s, &d, vec![px, py, pz]).unwrap().named("D");
        let eta = Block::reindex(&d, &nt, vec![0, 1, 2]).unwrap().named("eta");
        let one = Block::constant(&FiniteSet::empty(), Valuation::constant(&t, ratio(1, 1))).named("k");
        let left = Diagram::seq(Diagram::block(expect), Diagram::block(eta)).unwrap();
        let whole = Diagram::tensor(left, Diagram::block(one)).unwrap();
        (s, whole)
    }

    fn on(s: &Carrier, v: &[(i64, i64)]) -> Valuation<Q> {
        Valuation::new(s, v.iter().map(|&(p, q)| ratio(p, q)).collect()).unwrap()
    }

    #[test]
    fn termination_interface_is_the_state_set() {
        let (s, d) = termination();
        assert!(d.input().same_elements(&s));
        assert!(d.output().same_elements(&s));
        assert!(d.is_endo());
    }

    #[test]
    fn termination_fixpoints() {
        let (s, d) = termination();
        let m = MvAlgebra::unit_interval();
        let ones = Valuation::constant(&s, ratio(1, 1));
        assert_eq!(d.evaluate(&ones, &m).unwrap().reorder_to(&s).unwrap(), ones);
        let mu = on(&s, &[(1, 2), (0, 1), (1, 1), (0, 1)]);
        assert_eq!(d.evaluate(&mu, &m).unwrap().reorder_to(&s).unwrap(), mu);
    }

    #[test]
    fn termination_approximation_keeps_the_cycle() {
        let (s, d) = termination();
        let m = MvAlgebra::unit_interval();
        let ones = Valuation::constant(&s, ratio(1, 1));
        let yz = Subset::from_elements(&s, &[el("y"), el("z")]).unwrap();
        let out = d.approximate(&ones, &yz, &m).unwrap().reorder_to(&s).unwrap();
        assert_eq!(out, yz);
        let none = d.approximate(&ones, &Subset::empty(&s), &m).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn mismatched_sequence_names_the_path() {
        let s = FiniteSet::atoms(["a"]).unwrap();
        let t = FiniteSet::atoms(["b"]).unwrap();
        let term: Term<Q> = Term::tensor(Term::Id(s.clone()), Term::seq(Term::Id(s), Term::Id(t)));
        match term.typecheck() {
            Err(DiagramError::Interface { path, left, right }) => {
                assert_eq!(path, "tensor.1");
                assert_eq!(left, "{a}");
                assert_eq!(right, "{b}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicator_interface() {
        let s = FiniteSet::atoms(["a", "b"]).unwrap();
        let (i, o) = Term::<Q>::Dup(s.clone()).typecheck().unwrap();
        assert_eq!(*i, *s);
        assert_eq!(o.to_string(), "{a, b, a@1, b@1}");
    }

    #[test]
    fn duplicate_then_discard_is_identity() {
        let s = FiniteSet::atoms(["a", "b"]).unwrap();
        let m = MvAlgebra::unit_interval();
        let lhs = Diagram::seq(
            Diagram::<Q>::dup(&s).unwrap(),
            Diagram::tensor(Diagram::disch(&s), Diagram::id(&s)).unwrap(),
        )
        .unwrap();
        let a = on(&s, &[(1, 3), (3, 4)]);
        assert_eq!(lhs.evaluate(&a, &m).unwrap().values(), a.values());
        let u = Subset::from_indices(&s, [1]);
        assert_eq!(lhs.approximate(&a, &u, &m).unwrap().reorder_to(&s).unwrap(), u);
    }

    #[test]
    fn symmetry_swaps_halves() {
        let s = FiniteSet::atoms(["a"]).unwrap();
        let t = FiniteSet::atoms(["b", "c"]).unwrap();
        let m = MvAlgebra::unit_interval();
        let d = Diagram::<Q>::sym(&s, &t).unwrap();
        let a = on(d.input(), &[(1, 2), (1, 3), (1, 4)]);
        let out = d.evaluate(&a, &m).unwrap();
        assert_eq!(out.domain().to_string(), "{b, c, a}");
        assert_eq!(out.values(), &[ratio(1, 3), ratio(1, 4), ratio(1, 2)]);
    }

    #[test]
    fn conjugation_is_an_involution() {
        let (_, d) = termination();
        let m = MvAlgebra::unit_interval();
        assert_ne!(d.conjugate(&m), d);
        assert_eq!(d.conjugate(&m).conjugate(&m), d);
    }

    #[test]
    fn conjugate_denotes_the_complemented_function() {
        let (s, d) = termination();
        let m = MvAlgebra::unit_interval();
        let a = on(&s, &[(1, 5), (2, 3), (0, 1), (1, 2)]);
        let lhs = d.conjugate(&m).evaluate(&a.complement(&m), &m).unwrap();
        let rhs = d.evaluate(&a, &m).unwrap().complement(&m);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn approximation_rejects_subsets_outside_the_support() {
        let (s, d) = termination();
        let m = MvAlgebra::unit_interval();
        let mu = on(&s, &[(1, 2), (0, 1), (1, 1), (0, 1)]);
        let y = Subset::from_elements(&s, &[el("y")]).unwrap();
        assert!(matches!(d.approximate(&mu, &y, &m), Err(DiagramError::OutsideSupport { .. })));
    }

    #[test]
    fn wires_are_recorded() {
        let (s, d) = termination();
        let m = MvAlgebra::unit_interval();
        let ev = d.trace(&Valuation::constant(&s, ratio(1, 1)), &m).unwrap();
        // tensor, seq, D in/out, eta in/out, k in/out
        assert_eq!(ev.wires().len(), 8);
        assert_eq!(ev.output(), &d.evaluate(ev.input(), &m).unwrap());
    }

    #[test]
    fn relational_blocks_compose() {
        let y = FiniteSet::atoms(["a", "b"]).unwrap();
        let z = FiniteSet::atoms(["m"]).unwrap();
        let r = Relation::new(&y, &z, [(0, 0), (1, 0)]);
        let m = MvAlgebra::unit_interval();
        let d = Diagram::seq(
            Diagram::<Q>::dup(&y).unwrap(),
            Diagram::tensor(Diagram::block(Block::min_rel(r.clone())), Diagram::block(Block::max_rel(r))).unwrap(),
        )
        .unwrap();
        let a = on(&y, &[(1, 4), (3, 4)]);
        assert_eq!(d.evaluate(&a, &m).unwrap().values(), &[ratio(1, 4), ratio(3, 4)]);
        assert_eq!(d.output().to_string(), "{m, m@1}");
        let all = d.approximate(&a, &Subset::full(&y), &m).unwrap();
        assert_eq!(all.to_string(), "{m, m@1}");
        let only_b = d.approximate(&a, &Subset::from_indices(&y, [1]), &m).unwrap();
        assert_eq!(only_b.to_string(), "{m@1}");
        assert_eq!(d.size(), 5);
        assert_eq!(format!("{d}"), "dup {a, b} ; <minrel> | <maxrel>");
    }
}
