//! Brute-force references: the literal δ-definition of the approximation
//! and Kleene iteration from the lattice extremes.

use thiserror::Error;

use crate::diagram::{Diagram, DiagramError};
use crate::mv::MvAlgebra;
use crate::scalar::Scalar;
use crate::valuation::{Subset, Valuation, ValuationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error("δ must be positive")]
    NonPositiveDelta,
    #[error("the δ-union is only exact on finite chains, not on {0}")]
    NotAChain(String),
    #[error("subset {0} is not contained in the support")]
    OutsideSupport(String),
    #[error("Kleene iteration did not stabilise within {0} steps")]
    NoConvergence(usize),
}

/// `α^{a,δ}(Y′) = a ⊖ δ_{Y′}`.
pub fn alpha<T: Scalar>(a: &Valuation<T>, delta: &T, yprime: &Subset, alg: &MvAlgebra<T>) -> Result<Valuation<T>, OracleError> {
    let y = yprime.reorder_to(a.domain())?;
    Ok(a.ominus(&Valuation::delta_on(delta, &y), alg)?)
}

/// `γ^{a,δ}(b) = {y ∈ [Y]^a | a(y) ⊖ b(y) ⊒ δ}`.
pub fn gamma<T: Scalar>(a: &Valuation<T>, delta: &T, b: &Valuation<T>, alg: &MvAlgebra<T>) -> Result<Subset, OracleError> {
    let b = b.reorder_to(a.domain())?;
    Ok(Subset::from_indices(
        a.domain(),
        (0..a.domain().len()).filter(|&i| !a.at(i).is_zero() && alg.ominus(a.at(i), b.at(i)) >= *delta),
    ))
}

/// `f_#^{a,δ}(Y′) = γ^{f(a),δ}(f(α^{a,δ}(Y′)))`, evaluated literally.
pub fn approx_delta<T: Scalar>(
    d: &Diagram<T>,
    a: &Valuation<T>,
    delta: &T,
    yprime: &Subset,
    alg: &MvAlgebra<T>,
) -> Result<Subset, OracleError> {
    if !delta.is_positive() {
        return Err(OracleError::NonPositiveDelta);
    }
    let a = a.reorder_to(d.input())?;
    let y = yprime.reorder_to(d.input())?;
    if !y.is_subset(&a.support_nonzero()) {
        return Err(OracleError::OutsideSupport(y.to_string()));
    }
    let fa = d.evaluate(&a, alg)?;
    let lowered = d.evaluate(&alpha(&a, delta, &y, alg)?, alg)?;
    gamma(&fa, delta, &lowered, alg)
}

/// `⋃_{δ ∈ 1..k} f_#^{a,δ}(Y′)`, exact on finite chains.
pub fn approx_delta_union<T: Scalar>(
    d: &Diagram<T>,
    a: &Valuation<T>,
    yprime: &Subset,
    alg: &MvAlgebra<T>,
) -> Result<Subset, OracleError> {
    let levels = alg.chain_elements().ok_or_else(|| OracleError::NotAChain(alg.to_string()))?;
    let mut out = Subset::empty(d.output());
    for delta in levels.iter().skip(1) {
        out = out.union(&approx_delta(d, a, delta, yprime, alg)?);
    }
    Ok(out)
}

const KLEENE_CAP: usize = 100_000;

fn kleene<T: Scalar>(d: &Diagram<T>, start: Valuation<T>, alg: &MvAlgebra<T>) -> Result<Vec<Valuation<T>>, OracleError> {
    d.require_endo()?;
    let mut seq = vec![start];
    for _ in 0..KLEENE_CAP {
        let last = seq.last().expect("nonempty");
        let next = d.step(last, alg)?;
        if &next == last {
            return Ok(seq);
        }
        seq.push(next);
    }
    Err(OracleError::NoConvergence(KLEENE_CAP))
}

/// The Kleene chain `⊥, f(⊥), …` up to its limit; always finite on chains.
pub fn kleene_from_bottom<T: Scalar>(d: &Diagram<T>, alg: &MvAlgebra<T>) -> Result<Vec<Valuation<T>>, OracleError> {
    kleene(d, Valuation::zero(d.input()), alg)
}

/// The Kleene chain `⊤, f(⊤), …` down to its limit.
pub fn kleene_from_top<T: Scalar>(d: &Diagram<T>, alg: &MvAlgebra<T>) -> Result<Vec<Valuation<T>>, OracleError> {
    kleene(d, Valuation::constant(d.input(), alg.top()), alg)
}

/// `μf`, when the iteration from bottom stabilises.
pub fn brute_lfp<T: Scalar>(d: &Diagram<T>, alg: &MvAlgebra<T>) -> Result<Valuation<T>, OracleError> {
    Ok(kleene_from_bottom(d, alg)?.pop().expect("nonempty"))
}

/// `νf`, when the iteration from top stabilises.
pub fn brute_gfp<T: Scalar>(d: &Diagram<T>, alg: &MvAlgebra<T>) -> Result<Valuation<T>, OracleError> {
    Ok(kleene_from_top(d, alg)?.pop().expect("nonempty"))
}
