//! Exact two-phase simplex for `min c·x  s.t.  A x = b, x ≥ 0`.
//!
//! Dense tableau, Bland's rule throughout, so it terminates on degenerate
//! problems. Sized for desk-scale transport problems.

use thiserror::Error;

use crate::scalar::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("the program is infeasible")]
    Infeasible,
    #[error("the objective is unbounded below")]
    Unbounded,
    #[error("malformed program: {0}")]
    Shape(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution<T> {
    pub objective: T,
    pub x: Vec<T>,
}

struct Tableau<T> {
    /// `m` rows of `n` coefficients followed by the right-hand side.
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    n: usize,
}

impl<T: Field> Tableau<T> {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        self.basis[r] = col;
    }

    /// Reduced costs `c_j - c_B B⁻¹ A_j` over the first `n` columns.
    fn reduced(&self, cost: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|j| {
                self.rows.iter().zip(&self.basis).fold(cost[j].clone(), |acc, (row, &b)| {
                    acc - cost[b].clone() * row[j].clone()
                })
            })
            .collect()
    }

    fn value(&self, cost: &[T]) -> T {
        self.rows.iter().zip(&self.basis).fold(T::zero(), |acc, (row, &b)| {
            acc + cost[b].clone() * row[self.n].clone()
        })
    }

    /// Bland's rule on columns with `allowed[j]`.
    fn optimise(&mut self, cost: &[T], allowed: &[bool]) -> Result<(), LpError> {
        loop {
            let red = self.reduced(cost);
            let Some(col) = (0..self.n).find(|&j| allowed[j] && red[j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = row[self.n].clone() / row[col].clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else { return Err(LpError::Unbounded) };
            self.pivot(r, col);
        }
    }
}

/// Minimises `c·x` subject to `A x = b`, `x ≥ 0`.
pub fn minimize<T: Field>(a: &[Vec<T>], b: &[T], c: &[T]) -> Result<LpSolution<T>, LpError> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(LpError::Shape(format!("{m} rows, {} right-hand sides, {n} costs", b.len())));
    }
    // Phase one: artificial columns n..n+m start in the basis.
    let width = n + m;
    let rows = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, bi))| {
            let flip = bi.is_negative();
            let sign = |v: &T| if flip { -v.clone() } else { v.clone() };
            let mut r: Vec<T> = row.iter().map(sign).collect();
            r.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
            r.push(sign(bi));
            r
        })
        .collect();
    let mut t = Tableau { rows, basis: (n..width).collect(), n: width };
    let phase_one: Vec<T> = (0..width).map(|j| if j < n { T::zero() } else { T::one() }).collect();
    t.optimise(&phase_one, &vec![true; width])?;
    if t.value(&phase_one).is_positive() {
        return Err(LpError::Infeasible);
    }
    // Drive zero-valued artificials out of the basis; rows that cannot be
    // pivoted on an original column are redundant.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] < n {
            r += 1;
            continue;
        }
        match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
            Some(col) => {
                t.pivot(r, col);
                r += 1;
            }
            None => {
                t.rows.remove(r);
                t.basis.remove(r);
            }
        }
    }
    let mut cost = c.to_vec();
    cost.extend((0..m).map(|_| T::zero()));
    let allowed: Vec<bool> = (0..width).map(|j| j < n).collect();
    t.optimise(&cost, &allowed)?;
    let mut x = vec![T::zero(); n];
    for (row, &bv) in t.rows.iter().zip(&t.basis) {
        if bv < n {
            x[bv] = row[width].clone();
        }
    }
    let objective = x.iter().zip(c).fold(T::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    Ok(LpSolution { objective, x })
}
