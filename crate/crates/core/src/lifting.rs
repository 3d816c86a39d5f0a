//! Wasserstein liftings for the distribution and finite powerset functors,
//! their approximations, and the diagrams for termination probabilities and
//! behavioural metrics.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::blocks::{Block, BlockError, Relation};
use crate::diagram::{Diagram, DiagramError};
use crate::distribution::Distribution;
use crate::mv::MvAlgebra;
use crate::scalar::{Field, Scalar};
use crate::set::{Carrier, Element, FiniteSet, SetError};
use crate::systems::{LabelledMarkovChain, MarkovChain, NondetTS};
use crate::transport::{optimal_transport, pair_cost, transport_vertices, TransportError, TransportPlan, VertexLimits};
use crate::valuation::{Subset, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftingError {
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("{size} candidate pairs exceed the coupling enumeration cap {cap}")]
    TooManyCouplings { size: usize, cap: usize },
    #[error("`{0}` is outside the support of the metric")]
    OutsideSupport(String),
    #[error("the distribution lifting needs the unit interval, got {0}")]
    NotUnitInterval(String),
}

/// Default cap on `|S1 × S2|` when enumerating powerset couplings.
pub const COUPLING_CAP: usize = 16;

/// An element of `F(X × X)` for one of the two supported functors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coupling<T: Scalar> {
    Distribution(Distribution<T>),
    Powerset(Subset),
}

/// `d̃(t)`: expectation or maximum of `d` over the coupling.
pub fn lifted_value<T: Scalar>(t: &Coupling<T>, d: &Valuation<T>) -> T {
    match t {
        Coupling::Distribution(p) => {
            p.weights().iter().fold(T::zero(), |acc, (i, w)| acc + w.clone() * value_at(d, p.base().get(*i)))
        }
        Coupling::Powerset(s) => s.elements().map(|e| value_at(d, e)).max().unwrap_or_else(T::zero),
    }
}

fn value_at<T: Scalar>(d: &Valuation<T>, e: &Element) -> T {
    d.get(e).cloned().expect("coupling pairs lie in the metric's domain")
}

/// Every supported pair lies in `Y′`.
pub fn lifting_member_distribution<T: Scalar>(t: &Distribution<T>, yprime: &Subset) -> bool {
    t.weights().iter().all(|(i, _)| yprime.contains(t.base().get(*i)))
}

/// Some pair of `t ∩ Y′` beats every pair of `t ∖ Y′` under `d`.
pub fn lifting_member_powerset<T: Scalar>(t: &Subset, d: &Valuation<T>, yprime: &Subset) -> bool {
    let (inside, outside): (Vec<&Element>, Vec<&Element>) = t.elements().partition(|e| yprime.contains(e));
    let outside_max = outside.iter().map(|e| value_at(d, e)).max();
    inside.iter().any(|e| outside_max.as_ref().is_none_or(|m| value_at(d, e) > *m))
}

pub fn lifting_member<T: Scalar>(t: &Coupling<T>, d: &Valuation<T>, yprime: &Subset) -> bool {
    match t {
        Coupling::Distribution(p) => lifting_member_distribution(p, yprime),
        Coupling::Powerset(s) => lifting_member_powerset(s, d, yprime),
    }
}

/// `max(max_x min_y d, max_y min_x d)`; top when exactly one side is empty.
pub fn hausdorff_powerset<T: Scalar>(d: &Valuation<T>, s1: &Subset, s2: &Subset, alg: &MvAlgebra<T>) -> T {
    match (s1.is_empty(), s2.is_empty()) {
        (true, true) => return T::zero(),
        (true, false) | (false, true) => return alg.top(),
        _ => {}
    }
    let at = |x: &Element, y: &Element| value_at(d, &Element::pair(x.clone(), y.clone()));
    let forward = s1.elements().map(|x| s2.elements().map(|y| at(x, y)).min().expect("nonempty")).max();
    let backward = s2.elements().map(|y| s1.elements().map(|x| at(x, y)).min().expect("nonempty")).max();
    forward.max(backward).expect("nonempty")
}

/// All `t ⊆ s1 × s2` projecting onto both sides, as subsets of `pairs`.
pub fn powerset_couplings(s1: &Subset, s2: &Subset, pairs: &Carrier, cap: usize) -> Result<Vec<Subset>, LiftingError> {
    let rows: Vec<&Element> = s1.elements().collect();
    let cols: Vec<&Element> = s2.elements().collect();
    let size = rows.len() * cols.len();
    if size > cap {
        return Err(LiftingError::TooManyCouplings { size, cap });
    }
    if rows.is_empty() || cols.is_empty() {
        return Ok(if rows.len() == cols.len() { vec![Subset::empty(pairs)] } else { Vec::new() });
    }
    let cell = |r: usize, c: usize| pairs.require(&Element::pair(rows[r].clone(), cols[c].clone()));
    let cells: Vec<Vec<usize>> = (0..rows.len())
        .map(|r| (0..cols.len()).map(|c| cell(r, c)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    // Each row picks a nonempty column mask; columns are checked at the end.
    let full = (1u32 << cols.len()) - 1;
    let mut out = Vec::new();
    let mut masks = vec![0u32; rows.len()];
    fn walk(r: usize, covered: u32, full: u32, masks: &mut [u32], cells: &[Vec<usize>], pairs: &Carrier, out: &mut Vec<Subset>) {
        if r == masks.len() {
            if covered == full {
                let members = masks
                    .iter()
                    .enumerate()
                    .flat_map(|(r, m)| (0..cells[r].len()).filter(move |c| m & (1 << c) != 0).map(move |c| cells[r][c]));
                out.push(Subset::from_indices(pairs, members));
            }
            return;
        }
        // the remaining rows can cover anything, so only the last row prunes
        for m in 1..=full {
            if r + 1 == masks.len() && (covered | m) != full {
                continue;
            }
            masks[r] = m;
            walk(r + 1, covered | m, full, masks, cells, pairs, out);
        }
    }
    walk(0, 0, full, &mut masks, &cells, pairs, &mut out);
    Ok(out)
}

fn require_unit<T: Scalar>(alg: &MvAlgebra<T>) -> Result<(), LiftingError> {
    if alg.is_unit_interval() {
        Ok(())
    } else {
        Err(LiftingError::NotUnitInterval(alg.to_string()))
    }
}

/// `W(d)` on `X × X` for a labelled chain: top across labels, optimal
/// transport within a label.
pub fn wasserstein_lmc<T: Field>(
    lmc: &LabelledMarkovChain<T>,
    d: &Valuation<T>,
    alg: &MvAlgebra<T>,
) -> Result<Valuation<T>, LiftingError> {
    require_unit(alg)?;
    let x = lmc.states();
    let cost = pair_cost(d, x, x)?;
    let values = pairs_of(x)
        .map(|(i, j)| {
            if lmc.label(i) != lmc.label(j) {
                return Ok(alg.top());
            }
            let (w, _) = optimal_transport(lmc.next(i), lmc.next(j), &cost, |_, _| true)?
                .expect("the product coupling is feasible");
            Ok(w)
        })
        .collect::<Result<Vec<T>, LiftingError>>()?;
    Ok(Valuation::new(&lmc.pairs(), values).expect("one value per pair"))
}

/// `W(d)` on `X × X` for a nondeterministic system.
pub fn wasserstein_nts<T: Scalar>(nts: &NondetTS, d: &Valuation<T>, alg: &MvAlgebra<T>) -> Valuation<T> {
    let x = nts.states();
    let values = pairs_of(x).map(|(i, j)| hausdorff_powerset(d, nts.succ(i), nts.succ(j), alg)).collect();
    Valuation::new(&nts.pairs(), values).expect("one value per pair")
}

fn pairs_of(x: &FiniteSet) -> impl Iterator<Item = (usize, usize)> {
    let n = x.len();
    (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)))
}

/// `W_#^d(Y′)` for a labelled chain, deciding each pair by a second
/// transport problem confined to `Y′`.
pub fn w_approx_lmc<T: Field>(
    lmc: &LabelledMarkovChain<T>,
    d: &Valuation<T>,
    yprime: &Subset,
    alg: &MvAlgebra<T>,
) -> Result<Subset, LiftingError> {
    let w = wasserstein_lmc(lmc, d, alg)?;
    let x = lmc.states();
    let cost = pair_cost(d, x, x)?;
    let inside = |i: usize, j: usize| yprime.contains(&Element::pair(x.get(i).clone(), x.get(j).clone()));
    let pairs = w.domain().clone();
    let mut out = Subset::empty(&pairs);
    for (k, (i, j)) in pairs_of(x).enumerate() {
        if w.at(k).is_zero() || lmc.label(i) != lmc.label(j) {
            continue;
        }
        if let Some((opt, _)) = optimal_transport(lmc.next(i), lmc.next(j), &cost, inside)? {
            if opt == *w.at(k) {
                out.insert(k);
            }
        }
    }
    Ok(out)
}

/// `W_#^d(Y′)` for a nondeterministic system, by enumerating couplings.
pub fn w_approx_nts<T: Scalar>(
    nts: &NondetTS,
    d: &Valuation<T>,
    yprime: &Subset,
    alg: &MvAlgebra<T>,
    cap: usize,
) -> Result<Subset, LiftingError> {
    let w = wasserstein_nts(nts, d, alg);
    let pairs = w.domain().clone();
    let mut out = Subset::empty(&pairs);
    for (k, (i, j)) in pairs_of(nts.states()).enumerate() {
        if w.at(k).is_zero() {
            continue;
        }
        let hit = powerset_couplings(nts.succ(i), nts.succ(j), &pairs, cap)?.iter().any(|t| {
            lifted_value(&Coupling::Powerset(t.clone()), d) == *w.at(k) && lifting_member_powerset(t, d, yprime)
        });
        if hit {
            out.insert(k);
        }
    }
    Ok(out)
}

/// A coalgebra for one of the two supported functors.
#[derive(Debug)]
pub enum System<'a, T: Scalar> {
    Labelled(&'a LabelledMarkovChain<T>),
    Nondet(&'a NondetTS),
}

impl<T: Scalar> Clone for System<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T: Scalar> Copy for System<'_, T> {}

impl<T: Field> System<'_, T> {
    pub fn pairs(&self) -> Carrier {
        match self {
            System::Labelled(s) => s.pairs(),
            System::Nondet(s) => s.pairs(),
        }
    }

    pub fn wasserstein(&self, d: &Valuation<T>, alg: &MvAlgebra<T>) -> Result<Valuation<T>, LiftingError> {
        match self {
            System::Labelled(s) => wasserstein_lmc(s, d, alg),
            System::Nondet(s) => Ok(wasserstein_nts(s, d, alg)),
        }
    }
}

/// `W_#^d(Y′)`; requires `Y′ ⊆ [X×X]^d`.
pub fn w_approx<T: Field>(
    system: System<'_, T>,
    d: &Valuation<T>,
    yprime: &Subset,
    alg: &MvAlgebra<T>,
) -> Result<Subset, LiftingError> {
    let support = d.support_nonzero();
    if let Some(bad) = yprime.elements().find(|e| !support.contains(e)) {
        return Err(LiftingError::OutsideSupport(bad.to_string()));
    }
    match system {
        System::Labelled(s) => w_approx_lmc(s, d, yprime, alg),
        System::Nondet(s) => w_approx_nts(s, d, yprime, alg, COUPLING_CAP),
    }
}

/// Greatest `U ⊆ [X×X]^d` with `U ⊆ W_#^d(U)`, by descent from `[X×X]^d`.
pub fn w_approx_gfp<T: Field>(system: System<'_, T>, d: &Valuation<T>, alg: &MvAlgebra<T>) -> Result<Subset, LiftingError> {
    let support = d.support_nonzero();
    let mut u = support.clone();
    loop {
        let next = w_approx(system, d, &u, alg)?.reorder_to(support.domain()).expect("same pairs").intersection(&support);
        if next == u {
            return Ok(u);
        }
        u = next;
    }
}

/// `T = (η* ∘ D̃) ⊗ c_1` on the states; distributions are named `p_<s>`
/// after the first state that uses them.
pub fn build_termination_diagram<T: Field>(mc: &MarkovChain<T>) -> Result<Diagram<T>, LiftingError> {
    let s = mc.states();
    let live: Vec<usize> = (0..s.len()).filter(|&i| !mc.terminal().contains_index(i)).collect();
    let mut names: Vec<Element> = Vec::new();
    let mut dists: Vec<Distribution<T>> = Vec::new();
    let mut eta: Vec<usize> = Vec::new();
    for &i in &live {
        let p = mc.next(i).expect("live states have successors");
        let k = match dists.iter().position(|q| q == p) {
            Some(k) => k,
            None => {
                names.push(Element::atom(&format!("p_{}", s.get(i))));
                dists.push(p.clone());
                dists.len() - 1
            }
        };
        eta.push(k);
    }
    let d = FiniteSet::new(names)?;
    let n = FiniteSet::new(live.iter().map(|&i| s.get(i).clone()))?;
    let t = FiniteSet::new(mc.terminal().elements().cloned())?;
    let expect = Block::expect(s, &d, dists)?.named("expect");
    let reindex = Block::reindex(&d, &n, eta)?.named("eta");
    let one = Block::constant(&FiniteSet::empty(), Valuation::constant(&t, T::one())).named("terminal");
    let step = Diagram::seq(Diagram::block(expect), Diagram::block(reindex))?;
    Ok(Diagram::tensor(step, Diagram::block(one))?)
}

/// `(ξ×ξ)* ∘ min_u ∘ D̃` on `X × X`, with the distribution set cut down to
/// the transport vertices of same-label state pairs.
pub fn build_wasserstein_diagram<T: Field>(
    lmc: &LabelledMarkovChain<T>,
    limits: VertexLimits,
) -> Result<Diagram<T>, LiftingError> {
    let x = lmc.states();
    let y = lmc.pairs();
    // F-elements: distinct (label, distribution) successors, named xi_<s>.
    let mut f_names: Vec<Element> = Vec::new();
    let mut f_vals: Vec<(&str, &Distribution<T>)> = Vec::new();
    let mut xi: Vec<usize> = Vec::new();
    for i in 0..x.len() {
        let v = (lmc.label(i), lmc.next(i));
        let k = match f_vals.iter().position(|w| *w == v) {
            Some(k) => k,
            None => {
                f_names.push(Element::atom(&format!("xi_{}", x.get(i))));
                f_vals.push(v);
                f_vals.len() - 1
            }
        };
        xi.push(k);
    }
    let f = FiniteSet::new(f_names)?;
    let ff = FiniteSet::product(&f, &f);
    // Vertices of every same-label pair; `u` links each to its marginals.
    let mut vertices: Vec<Distribution<T>> = Vec::new();
    let mut seen: HashMap<(&str, TransportPlan<T>), usize> = HashMap::new();
    let mut links: Vec<(usize, usize)> = Vec::new();
    for (a, &(la, pa)) in f_vals.iter().enumerate() {
        for (b, &(lb, pb)) in f_vals.iter().enumerate() {
            if la != lb {
                continue;
            }
            for plan in transport_vertices(pa, pb, limits)? {
                let key = (la, plan);
                let v = match seen.get(&key) {
                    Some(&v) => v,
                    None => {
                        vertices.push(key.1.to_distribution(x, x, &y));
                        seen.insert(key, vertices.len() - 1);
                        vertices.len() - 1
                    }
                };
                links.push((v, a * f.len() + b));
            }
        }
    }
    let v = FiniteSet::atoms((0..vertices.len()).map(|k| format!("t{k}")))?;
    let expect = Block::expect(&y, &v, vertices)?.named("couplings");
    let min_u = Block::min_rel(Relation::new(&v, &ff, links)).named("min_u");
    let g: Vec<usize> = pairs_of(x).map(|(i, j)| xi[i] * f.len() + xi[j]).collect();
    let reindex = Block::reindex(&ff, &y, g)?.named("xi_xi");
    Ok(Diagram::chain([Diagram::block(expect), Diagram::block(min_u), Diagram::block(reindex)])?)
}

/// `B = max_ρ ∘ (c_k ⊗ W)` where `k` is 1 exactly on pairs with different
/// labels.
pub fn build_behavioural_diagram<T: Field>(
    lmc: &LabelledMarkovChain<T>,
    limits: VertexLimits,
) -> Result<Diagram<T>, LiftingError> {
    let y = lmc.pairs();
    let k = Valuation::new(
        &y,
        pairs_of(lmc.states()).map(|(i, j)| if lmc.label(i) == lmc.label(j) { T::zero() } else { T::one() }).collect(),
    )
    .expect("one value per pair");
    let labels = Diagram::block(Block::constant(&FiniteSet::empty(), k).named("labels"));
    let w = build_wasserstein_diagram(lmc, limits)?;
    let both = Diagram::tensor(labels, w)?;
    let n = y.len();
    let rho = Relation::new(both.output(), &y, (0..2 * n).map(|i| (i, i % n)));
    Ok(Diagram::seq(both, Diagram::block(Block::max_rel(rho).named("rho")))?)
}

/// `(ξ×ξ)* ∘ min_u ∘ P̃` on `X × X`, with every coupling of every pair of
/// successor sets.
pub fn build_powerset_diagram<T: Scalar>(nts: &NondetTS, cap: usize) -> Result<Diagram<T>, LiftingError> {
    let x = nts.states();
    let y = nts.pairs();
    let mut f_names: Vec<Element> = Vec::new();
    let mut f_vals: Vec<&Subset> = Vec::new();
    let mut xi: Vec<usize> = Vec::new();
    for i in 0..x.len() {
        let s = nts.succ(i);
        let k = match f_vals.iter().position(|t| *t == s) {
            Some(k) => k,
            None => {
                f_names.push(Element::atom(&format!("xi_{}", x.get(i))));
                f_vals.push(s);
                f_vals.len() - 1
            }
        };
        xi.push(k);
    }
    let f = FiniteSet::new(f_names)?;
    let ff = FiniteSet::product(&f, &f);
    let mut couplings: Vec<Subset> = Vec::new();
    let mut links: Vec<(usize, usize)> = Vec::new();
    for (a, sa) in f_vals.iter().enumerate() {
        for (b, sb) in f_vals.iter().enumerate() {
            for t in powerset_couplings(sa, sb, &y, cap)? {
                // a coupling determines its projections, so it is new here
                couplings.push(t);
                links.push((couplings.len() - 1, a * f.len() + b));
            }
        }
    }
    let v = FiniteSet::atoms((0..couplings.len()).map(|k| format!("t{k}")))?;
    let member = couplings.iter().enumerate().flat_map(|(k, t)| t.indices().map(move |i| (i, k)));
    let lift = Block::max_rel(Relation::new(&y, &v, member.collect::<Vec<_>>())).named("couplings");
    let min_u = Block::min_rel(Relation::new(&v, &ff, links)).named("min_u");
    let g: Vec<usize> = pairs_of(x).map(|(i, j)| xi[i] * f.len() + xi[j]).collect();
    let reindex = Block::reindex(&ff, &y, g)?.named("xi_xi");
    Ok(Diagram::chain([Diagram::block(lift), Diagram::block(min_u), Diagram::block(reindex)])?)
}

/// `D̃(δ_{Y′}) ⊑ δ` on every listed distribution.
pub fn expectation_lifting_bounded<T: Scalar>(dists: &[Distribution<T>], delta: &T, yprime: &Subset) -> bool {
    let probe = Valuation::delta_on(delta, yprime);
    dists.iter().all(|p| p.expectation(&probe) <= *delta)
}

/// `P̃(δ_{Y′}) ⊑ δ` on every listed subset.
pub fn max_lifting_bounded<T: Scalar>(sets: &[Subset], delta: &T, yprime: &Subset) -> bool {
    let probe = Valuation::delta_on(delta, yprime);
    sets.iter().all(|s| lifted_value(&Coupling::Powerset(s.clone()), &probe) <= *delta)
}

/// Interned labels for programmatic construction.
pub fn labels<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Vec<Arc<str>> {
    names.into_iter().map(|s| Arc::from(s.as_ref())).collect()
}
