//! Exact optimal transport between two distributions and the vertices of
//! the transportation polytope.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use thiserror::Error;

use crate::distribution::Distribution;
use crate::lp::{minimize, LpError};
use crate::scalar::Field;
use crate::set::{Carrier, Element, FiniteSet};
use crate::valuation::{Subset, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransportError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("support of size {size} exceeds the vertex enumeration limit {limit}")]
    SupportTooLarge { size: usize, limit: usize },
    #[error("more than {0} residual problems visited while enumerating vertices")]
    TooManyResiduals(usize),
    #[error("cost is undefined on pair {0}")]
    MissingCost(Element),
}

/// A coupling: positive masses on pairs of base positions, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransportPlan<T> {
    pub cells: Vec<(usize, usize, T)>,
}

impl<T: Field> TransportPlan<T> {
    fn from_cells(mut cells: Vec<(usize, usize, T)>) -> Self {
        cells.retain(|c| !c.2.is_zero());
        cells.sort();
        TransportPlan { cells }
    }

    pub fn mass(&self, i: usize, j: usize) -> T {
        self.cells
            .iter()
            .find(|c| c.0 == i && c.1 == j)
            .map(|c| c.2.clone())
            .unwrap_or_else(T::zero)
    }

    /// Pairs `(x1,x2)` with positive mass, as elements of `pairs`.
    pub fn support_in(&self, left: &FiniteSet, right: &FiniteSet, pairs: &Carrier) -> Option<Subset> {
        let elems: Vec<Element> =
            self.cells.iter().map(|c| Element::pair(left.get(c.0).clone(), right.get(c.1).clone())).collect();
        Subset::from_elements(pairs, &elems).ok()
    }

    /// The plan as a distribution on `pairs`.
    pub fn to_distribution(&self, left: &FiniteSet, right: &FiniteSet, pairs: &Carrier) -> Distribution<T> {
        let ws = self
            .cells
            .iter()
            .map(|c| (Element::pair(left.get(c.0).clone(), right.get(c.1).clone()), c.2.clone()));
        Distribution::from_elements(pairs, ws).expect("a coupling is a distribution on its pairs")
    }

    /// `Σ cost·mass`.
    pub fn cost(&self, cost: impl Fn(usize, usize) -> T) -> T {
        self.cells.iter().fold(T::zero(), |acc, (i, j, m)| acc + cost(*i, *j) * m.clone())
    }
}

/// Looks up `d(x1, x2)` on a pair carrier.
pub fn pair_cost<T: Field>(
    d: &Valuation<T>,
    left: &FiniteSet,
    right: &FiniteSet,
) -> Result<Vec<Vec<T>>, TransportError> {
    (0..left.len())
        .map(|i| {
            (0..right.len())
                .map(|j| {
                    let e = Element::pair(left.get(i).clone(), right.get(j).clone());
                    d.get(&e).cloned().ok_or(TransportError::MissingCost(e))
                })
                .collect()
        })
        .collect()
}

/// Minimum-cost coupling of `p1` and `p2` over cells with `allowed(i, j)`;
/// `None` when no such coupling exists.
pub fn optimal_transport<T: Field>(
    p1: &Distribution<T>,
    p2: &Distribution<T>,
    cost: &[Vec<T>],
    allowed: impl Fn(usize, usize) -> bool,
) -> Result<Option<(T, TransportPlan<T>)>, TransportError> {
    let rows = p1.weights();
    let cols = p2.weights();
    let cells: Vec<(usize, usize)> = rows
        .iter()
        .flat_map(|(i, _)| cols.iter().map(move |(j, _)| (*i, *j)))
        .filter(|&(i, j)| allowed(i, j))
        .collect();
    let mut a = Vec::with_capacity(rows.len() + cols.len());
    let mut b = Vec::with_capacity(rows.len() + cols.len());
    for (i, w) in rows {
        a.push(cells.iter().map(|c| if c.0 == *i { T::one() } else { T::zero() }).collect());
        b.push(w.clone());
    }
    for (j, w) in cols {
        a.push(cells.iter().map(|c| if c.1 == *j { T::one() } else { T::zero() }).collect());
        b.push(w.clone());
    }
    let c: Vec<T> = cells.iter().map(|&(i, j)| cost[i][j].clone()).collect();
    match minimize(&a, &b, &c) {
        Ok(sol) => {
            let plan = TransportPlan::from_cells(
                cells.iter().zip(sol.x).map(|(&(i, j), m)| (i, j, m)).collect(),
            );
            Ok(Some((sol.objective, plan)))
        }
        Err(LpError::Infeasible) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// `W(d)(p1, p2)`: the optimal transport cost under `d` on pairs of the bases.
pub fn wasserstein_distribution<T: Field>(
    d: &Valuation<T>,
    p1: &Distribution<T>,
    p2: &Distribution<T>,
) -> Result<(T, TransportPlan<T>), TransportError> {
    let cost = pair_cost(d, p1.base(), p2.base())?;
    let found = optimal_transport(p1, p2, &cost, |_, _| true)?;
    Ok(found.expect("the product coupling is feasible"))
}

#[derive(Clone, Copy, Debug)]
pub struct VertexLimits {
    pub max_support: usize,
    pub max_residuals: usize,
}

impl Default for VertexLimits {
    fn default() -> Self {
        VertexLimits { max_support: 8, max_residuals: 200_000 }
    }
}

type Residual<T> = (Vec<T>, Vec<T>);
/// A support, one bit per cell `(r, c)` at position `r·n + c`.
type Support = u128;

/// All vertices of the polytope of couplings of `p1` and `p2`, sorted.
///
/// A coupling is a vertex iff its support is a forest, and a forest always
/// has a leaf cell carrying the whole residual mass of its row or column.
/// So every vertex arises by repeatedly saturating some cell with
/// `min(supply, demand)`. A forest support fixes the masses, so supports are
/// memoised per residual problem and solved once at the end.
pub fn transport_vertices<T: Field>(
    p1: &Distribution<T>,
    p2: &Distribution<T>,
    limits: VertexLimits,
) -> Result<Vec<TransportPlan<T>>, TransportError> {
    let supply: Vec<T> = p1.weights().iter().map(|w| w.1.clone()).collect();
    let demand: Vec<T> = p2.weights().iter().map(|w| w.1.clone()).collect();
    let limit = limits.max_support.min(11);
    for size in [supply.len(), demand.len()] {
        if size > limit {
            return Err(TransportError::SupportTooLarge { size, limit });
        }
    }
    let n = demand.len();
    let mut memo = HashMap::new();
    let found = supports(supply.clone(), demand.clone(), &mut memo, limits.max_residuals)?;
    let plans: BTreeSet<TransportPlan<T>> = found
        .iter()
        .map(|&mask| {
            let cells = solve_forest(mask, &supply, &demand);
            TransportPlan::from_cells(
                cells.into_iter().map(|(k, v)| (p1.weights()[k / n].0, p2.weights()[k % n].0, v)).collect(),
            )
        })
        .collect();
    Ok(plans.into_iter().collect())
}

/// Vertex supports of the residual problem.
fn supports<T: Field>(
    supply: Vec<T>,
    demand: Vec<T>,
    memo: &mut HashMap<Residual<T>, Rc<Vec<Support>>>,
    limit: usize,
) -> Result<Rc<Vec<Support>>, TransportError> {
    let key = (supply, demand);
    if let Some(done) = memo.get(&key) {
        return Ok(done.clone());
    }
    let (supply, demand) = &key;
    let n = demand.len();
    let rows: Vec<usize> = (0..supply.len()).filter(|&r| !supply[r].is_zero()).collect();
    let cols: Vec<usize> = (0..n).filter(|&c| !demand[c].is_zero()).collect();
    let mut out = HashSet::new();
    // equal totals: rows and columns run out together
    if rows.is_empty() || cols.is_empty() {
        out.insert(0);
    }
    for &r in &rows {
        for &c in &cols {
            let x = supply[r].clone().min(demand[c].clone());
            let (mut s, mut d) = (supply.clone(), demand.clone());
            s[r] = s[r].clone() - x.clone();
            d[c] = d[c].clone() - x;
            let bit: Support = 1 << (r * n + c);
            out.extend(supports(s, d, memo, limit)?.iter().map(|m| m | bit));
        }
    }
    if memo.len() >= limit {
        return Err(TransportError::TooManyResiduals(limit));
    }
    let mut out: Vec<Support> = out.into_iter().collect();
    out.sort_unstable();
    let out = Rc::new(out);
    memo.insert(key, out.clone());
    Ok(out)
}

/// Masses on a forest support, by leaf elimination; `(r·n + c, mass)`.
fn solve_forest<T: Field>(mask: Support, supply: &[T], demand: &[T]) -> Vec<(usize, T)> {
    let (m, n) = (supply.len(), demand.len());
    let (mut s, mut d) = (supply.to_vec(), demand.to_vec());
    let mut left: Vec<usize> = (0..m * n).filter(|k| mask >> k & 1 == 1).collect();
    let mut out = Vec::with_capacity(left.len());
    while !left.is_empty() {
        let degree = |left: &[usize], line: usize| {
            left.iter().filter(|&&k| if line < m { k / n == line } else { k % n == line - m }).count()
        };
        let at = left
            .iter()
            .position(|&k| degree(&left, k / n) == 1 || degree(&left, m + k % n) == 1)
            .expect("a forest always has a leaf");
        let k = left.swap_remove(at);
        let (r, c) = (k / n, k % n);
        let x = if degree(&left, r) == 0 { s[r].clone() } else { d[c].clone() };
        s[r] = s[r].clone() - x.clone();
        d[c] = d[c].clone() - x.clone();
        out.push((k, x));
    }
    out
}
