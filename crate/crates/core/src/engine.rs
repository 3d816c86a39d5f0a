//! Fixpoint checks: Kleene descent on the approximation, the four proof
//! rules, decrease suggestion, and iteration towards the least fixpoint.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::diagram::{Diagram, DiagramError};
use crate::mv::{AlgebraKind, MvAlgebra};
use crate::scalar::{ratio, Scalar};
use crate::valuation::{Subset, Valuation, ValuationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error("decrease suggestion needs a nonempty witness")]
    EmptyWitness,
    #[error("candidate is not a fixpoint")]
    NotFixpoint,
    #[error("no verified decrease found for witness {0}")]
    SearchExhausted(String),
    #[error("start value is not a pre-fixpoint")]
    NotPreFixpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckMode {
    Least,
    Greatest,
    PostBelowLeast,
    PreAboveGreatest,
}

impl CheckMode {
    pub const ALL: [CheckMode; 4] =
        [CheckMode::Least, CheckMode::Greatest, CheckMode::PostBelowLeast, CheckMode::PreAboveGreatest];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckMode::Least => "least",
            CheckMode::Greatest => "greatest",
            CheckMode::PostBelowLeast => "post-below-least",
            CheckMode::PreAboveGreatest => "pre-above-greatest",
        }
    }

    /// The mode checked on the conjugated problem.
    pub fn dual(self) -> CheckMode {
        match self {
            CheckMode::Least => CheckMode::Greatest,
            CheckMode::Greatest => CheckMode::Least,
            CheckMode::PostBelowLeast => CheckMode::PreAboveGreatest,
            CheckMode::PreAboveGreatest => CheckMode::PostBelowLeast,
        }
    }
}

impl fmt::Display for CheckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Confirmed,
    Refuted,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Confirmed => "confirmed",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Confirmed => 0,
            Verdict::Refuted => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one check.
///
/// Invariants: a confirmed least check has an empty witness; a suggested
/// decrease exists exactly for refuted least/greatest checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport<T: Scalar> {
    mode: CheckMode,
    is_fixpoint: bool,
    verdict: Verdict,
    witness: Subset,
    suggested_delta: Option<T>,
    corrected: Option<Valuation<T>>,
    iterations: Vec<Subset>,
}

impl<T: Scalar> CheckReport<T> {
    pub fn mode(&self) -> CheckMode {
        self.mode
    }

    pub fn is_fixpoint(&self) -> bool {
        self.is_fixpoint
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    /// The greatest fixpoint of the approximation, or the entry-condition
    /// violation for inconclusive checks.
    pub fn witness(&self) -> &Subset {
        &self.witness
    }

    pub fn suggested_delta(&self) -> Option<&T> {
        self.suggested_delta.as_ref()
    }

    /// `a ⊖ δ_W` for least checks, `a ⊕ δ_W` for greatest checks.
    pub fn corrected(&self) -> Option<&Valuation<T>> {
        self.corrected.as_ref()
    }

    /// The Kleene descent on the approximation, first element `[Y]^a`.
    pub fn iterations(&self) -> &[Subset] {
        &self.iterations
    }

    fn inconclusive(mode: CheckMode, is_fixpoint: bool, witness: Subset) -> Self {
        CheckReport {
            mode,
            is_fixpoint,
            verdict: Verdict::Inconclusive,
            witness,
            suggested_delta: None,
            corrected: None,
            iterations: Vec::new(),
        }
    }
}

/// Greatest fixpoint of the approximation with its descent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gfp {
    pub gfp: Subset,
    pub iterations: Vec<Subset>,
}

fn aligned<T: Scalar>(d: &Diagram<T>, a: &Valuation<T>, alg: &MvAlgebra<T>) -> Result<Valuation<T>, EngineError> {
    d.require_endo()?;
    let a = a.reorder_to(d.input())?;
    a.check_in(alg)?;
    Ok(a)
}

/// Greatest fixpoint of `U ↦ f_#^a(U) ∩ E` by Kleene descent from `E`.
fn descend<T: Scalar>(
    d: &Diagram<T>,
    a: &Valuation<T>,
    within: Subset,
    alg: &MvAlgebra<T>,
) -> Result<Gfp, EngineError> {
    let ev = d.trace(a, alg)?;
    let mut current = within.clone();
    let mut iterations = vec![current.clone()];
    loop {
        let next = ev.approximate_unchecked(&current).reorder_to(d.input())?.intersection(&within);
        if next == current {
            return Ok(Gfp { gfp: current, iterations });
        }
        debug_assert!(next.is_subset(&current), "descent is monotone");
        current = next;
        iterations.push(current.clone());
    }
}

/// `ν f_#^a`, starting from `[Y]^a`.
pub fn gfp_approx<T: Scalar>(d: &Diagram<T>, a: &Valuation<T>, alg: &MvAlgebra<T>) -> Result<Gfp, EngineError> {
    let a = aligned(d, a, alg)?;
    let support = a.support_nonzero();
    descend(d, &a, support, alg)
}

pub fn check<T: Scalar>(
    d: &Diagram<T>,
    a: &Valuation<T>,
    mode: CheckMode,
    alg: &MvAlgebra<T>,
) -> Result<CheckReport<T>, EngineError> {
    match mode {
        CheckMode::Least => check_least(d, a, alg),
        CheckMode::Greatest => check_greatest(d, a, alg),
        CheckMode::PostBelowLeast => check_post_below_least(d, a, alg),
        CheckMode::PreAboveGreatest => check_pre_above_greatest(d, a, alg),
    }
}

/// Confirms `a = μf` exactly when `a` is a fixpoint and `ν f_#^a = ∅`.
pub fn check_least<T: Scalar>(
    d: &Diagram<T>,
    a: &Valuation<T>,
    alg: &MvAlgebra<T>,
) -> Result<CheckReport<T>, EngineError> {
    let a = aligned(d, a, alg)?;
    let fa = d.step(&a, alg)?;
    if fa != a {
        return Ok(CheckReport::inconclusive(CheckMode::Least, false, a.disagreement_set(&fa)?));
    }
    let Gfp { gfp, iterations } = descend(d, &a, a.support_nonzero(), alg)?;
    if gfp.is_empty() {
        return Ok(CheckReport {
            mode: CheckMode::Least,
            is_fixpoint: true,
            verdict: Verdict::Confirmed,
            witness: gfp,
            suggested_delta: None,
            corrected: None,
            iterations,
        });
    }
    let (delta, corrected) = suggest_decrease(d, &a, &gfp, alg)?;
    Ok(CheckReport {
        mode: CheckMode::Least,
        is_fixpoint: true,
        verdict: Verdict::Refuted,
        witness: gfp,
        suggested_delta: Some(delta),
        corrected: Some(corrected),
        iterations,
    })
}

/// The least check on `¬ ∘ f ∘ ¬` at `¬a`, translated back.
pub fn check_greatest<T: Scalar>(
    d: &Diagram<T>,
    a: &Valuation<T>,
    alg: &MvAlgebra<T>,
) -> Result<CheckReport<T>, EngineError> {
    let a = aligned(d, a, alg)?;
    let dual = check_least(&d.conjugate(alg), &a.complement(alg), alg)?;
    Ok(translate(dual, CheckMode::Greatest, alg))
}

fn translate<T: Scalar>(r: CheckReport<T>, mode: CheckMode, alg: &MvAlgebra<T>) -> CheckReport<T> {
    CheckReport { mode, corrected: r.corrected.map(|c| c.complement(alg)), ..r }
}

/// Sound rule for post-fixpoints: `ν f_*^a = ∅` implies `a ⊑ μf`.
pub fn check_post_below_least<T: Scalar>(
    d: &Diagram<T>,
    a: &Valuation<T>,
    alg: &MvAlgebra<T>,
) -> Result<CheckReport<T>, EngineError> {
    let a = aligned(d, a, alg)?;
    let fa = d.step(&a, alg)?;
    let is_fixpoint = fa == a;
    if !a.leq(&fa)? {
        let above = Subset::from_indices(
            a.domain(),
            (0..a.domain().len()).filter(|&i| a.at(i) > fa.at(i)),
        );
        return Ok(CheckReport::inconclusive(CheckMode::PostBelowLeast, is_fixpoint, above));
    }
    let within = a.agreement_set(&fa)?.intersection(&a.support_nonzero());
    let Gfp { gfp, iterations } = descend(d, &a, within, alg)?;
    let verdict = if gfp.is_empty() { Verdict::Confirmed } else { Verdict::Inconclusive };
    Ok(CheckReport {
        mode: CheckMode::PostBelowLeast,
        is_fixpoint,
        verdict,
        witness: gfp,
        suggested_delta: None,
        corrected: None,
        iterations,
    })
}

/// Dual of [`check_post_below_least`]: confirms `νf ⊑ a` for pre-fixpoints.
pub fn check_pre_above_greatest<T: Scalar>(
    d: &Diagram<T>,
    a: &Valuation<T>,
    alg: &MvAlgebra<T>,
) -> Result<CheckReport<T>, EngineError> {
    let a = aligned(d, a, alg)?;
    let dual = check_post_below_least(&d.conjugate(alg), &a.complement(alg), alg)?;
    Ok(translate(dual, CheckMode::PreAboveGreatest, alg))
}

const PROBE_BUDGET: usize = 64;

/// A verified `δ` with `f(a ⊖ δ_W) ⊑ a ⊖ δ_W`, searching from the top down.
pub fn suggest_decrease<T: Scalar>(
    d: &Diagram<T>,
    a: &Valuation<T>,
    witness: &Subset,
    alg: &MvAlgebra<T>,
) -> Result<(T, Valuation<T>), EngineError> {
    if witness.is_empty() {
        return Err(EngineError::EmptyWitness);
    }
    let a = aligned(d, a, alg)?;
    let witness = witness.reorder_to(d.input())?;
    let attempt = |delta: &T| -> Result<Option<Valuation<T>>, EngineError> {
        let lowered = a.ominus(&Valuation::delta_on(delta, &witness), alg)?;
        let image = d.step(&lowered, alg)?;
        Ok(image.leq(&lowered)?.then_some(lowered))
    };
    let exhausted = || EngineError::SearchExhausted(witness.to_string());

    if let Some(levels) = alg.chain_elements() {
        for delta in levels.into_iter().skip(1).rev() {
            if let Some(v) = attempt(&delta)? {
                return Ok((delta, v));
            }
        }
        return Err(exhausted());
    }

    // Halve from the top until a probe verifies, then bisect towards the
    // failing bound with the remaining budget.
    let two = T::one() + T::one();
    let mut probes = 0;
    let mut failed = alg.top();
    let mut good = None;
    let mut delta = alg.top();
    while probes < PROBE_BUDGET {
        probes += 1;
        if let Some(v) = attempt(&delta)? {
            good = Some((delta.clone(), v));
            break;
        }
        failed = delta.clone();
        delta = delta / two.clone();
    }
    let Some((mut lo, mut lo_val)) = good else { return Err(exhausted()) };
    if lo == failed {
        return Ok((lo, lo_val));
    }
    let mut hi = failed;
    while probes < PROBE_BUDGET {
        probes += 1;
        let mid = (lo.clone() + hi.clone()) / two.clone();
        match attempt(&mid)? {
            Some(v) => {
                lo = mid;
                lo_val = v;
            }
            None => hi = mid,
        }
    }
    Ok((lo, lo_val))
}

#[derive(Clone, Debug)]
pub struct IterateOptions<T> {
    pub max_rounds: usize,
    /// Kleene descent stops once successive iterates differ by at most this.
    pub epsilon: T,
    pub max_descent_steps: usize,
}

impl<T: Scalar> IterateOptions<T> {
    pub fn new(alg: &MvAlgebra<T>) -> Self {
        let epsilon = match alg.kind() {
            AlgebraKind::FiniteChain => T::zero(),
            AlgebraKind::RealInterval => T::from_ratio(&ratio(1, 1_000_000_000)).unwrap_or_else(T::zero),
        };
        IterateOptions { max_rounds: 100, epsilon, max_descent_steps: 100_000 }
    }
}

#[derive(Clone, Debug)]
pub struct Round<T: Scalar> {
    /// The (near-)fixpoint reached by descent in this round.
    pub reached: Valuation<T>,
    pub descent_steps: usize,
    pub residual: T,
    pub report: Option<CheckReport<T>>,
}

#[derive(Clone, Debug)]
pub struct IterationOutcome<T: Scalar> {
    pub result: Valuation<T>,
    pub rounds: Vec<Round<T>>,
    /// `norm(f(result) ⊖ result)` plus `norm(result ⊖ f(result))`; zero at fixpoints.
    pub residual: T,
    /// The last round confirmed `result = μf`.
    pub confirmed: bool,
}

/// Alternates Kleene descent with least checks and their corrections.
pub fn iterate_to_least_from_above<T: Scalar>(
    d: &Diagram<T>,
    a: &Valuation<T>,
    opts: &IterateOptions<T>,
    alg: &MvAlgebra<T>,
) -> Result<IterationOutcome<T>, EngineError> {
    let mut b = aligned(d, a, alg)?;
    let fb = d.step(&b, alg)?;
    if !fb.leq(&b)? {
        return Err(EngineError::NotPreFixpoint);
    }
    let mut rounds = Vec::new();
    for _ in 0..=opts.max_rounds {
        let (reached, steps) = kleene_down(d, b, opts, alg)?;
        let residual = residual(d, &reached, alg)?;
        let report = if residual.is_zero() { Some(check_least(d, &reached, alg)?) } else { None };
        let next = report.as_ref().and_then(|r| r.corrected().cloned());
        let confirmed = report.as_ref().is_some_and(|r| r.verdict() == Verdict::Confirmed);
        rounds.push(Round { reached: reached.clone(), descent_steps: steps, residual: residual.clone(), report });
        match next {
            Some(n) if !confirmed => b = n,
            _ => return Ok(IterationOutcome { result: reached, rounds, residual, confirmed }),
        }
    }
    let last = rounds.last().expect("at least one round").clone();
    Ok(IterationOutcome { result: last.reached, residual: last.residual, rounds, confirmed: false })
}

fn residual<T: Scalar>(d: &Diagram<T>, b: &Valuation<T>, alg: &MvAlgebra<T>) -> Result<T, EngineError> {
    let fb = d.step(b, alg)?;
    Ok(fb.ominus(b, alg)?.norm() + b.ominus(&fb, alg)?.norm())
}

/// Descends from a pre-fixpoint until it is exact or within tolerance.
fn kleene_down<T: Scalar>(
    d: &Diagram<T>,
    mut b: Valuation<T>,
    opts: &IterateOptions<T>,
    alg: &MvAlgebra<T>,
) -> Result<(Valuation<T>, usize), EngineError> {
    for step in 0..opts.max_descent_steps {
        let next = d.step(&b, alg)?;
        if next == b {
            return Ok((b, step));
        }
        let gap = b.ominus(&next, alg)?.norm();
        b = next;
        if gap <= opts.epsilon {
            return Ok((b, step + 1));
        }
    }
    Ok((b, opts.max_descent_steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::Block;
    use crate::distribution::Distribution;
    use crate::set::{Element, FiniteSet};
    use num_rational::BigRational;

    type Q = BigRational;

    fn el(s: &str) -> Element {
        Element::atom(s)
    }

    fn termination() -> (crate::set::Carrier, Diagram<Q>) {
        let s = FiniteSet::atoms(["x", "y", "u", "z"]).unwrap();
        let t = FiniteSet::atoms(["u"]).unwrap();
        let nt = FiniteSet::difference(&s, &t);
        let d = FiniteSet::atoms(["p_x", "p_y", "p_z"]).unwrap();
        let px = Distribution::from_elements(&s, [(el("y"), ratio(1, 2)), (el("u"), ratio(1, 2))]).unwrap();
        let py = Distribution::from_elements(&s, [(el("z"), ratio(1, 1))]).unwrap();
        let pz = Distribution::from_elements(&s, [(el("y"), ratio(1, 1))]).unwrap();
        let expect = Block::expect(&s, &d, vec![px, py, pz]).unwrap();
        let eta = Block::reindex(&d, &nt, vec![0, 1, 2]).unwrap();
        let one = Block::constant(&FiniteSet::empty(), Valuation::constant(&t, ratio(1, 1)));
        let left = Diagram::seq(Diagram::block(expect), Diagram::block(eta)).unwrap();
        (s, Diagram::tensor(left, Diagram::block(one)).unwrap())
    }

    fn on(s: &crate::set::Carrier, v: &[(i64, i64)]) -> Valuation<Q> {
        Valuation::new(s, v.iter().map(|&(p, q)| ratio(p, q)).collect()).unwrap()
    }

    fn mu(s: &crate::set::Carrier) -> Valuation<Q> {
        on(s, &[(1, 2), (0, 1), (1, 1), (0, 1)])
    }

    #[test]
    fn approximation_gfp_is_the_cycle() {
        let (s, d) = termination();
        let m = MvAlgebra::unit_interval();
        let g = gfp_approx(&d, &Valuation::constant(&s, ratio(1, 1)), &m).unwrap();
        assert_eq!(g.gfp.to_string(), "{y, z}");
        assert_eq!(g.iterations.first().unwrap().len(), 4);
        assert!(gfp_approx(&d, &mu(&s), &m).unwrap().gfp.is_empty());
    }

    #[test]
    fn least_check_on_the_termination_chain() {
        let (s, d) = termination();
        let m = MvAlgebra::unit_interval();
        let r = check_least(&d, &Valuation::constant(&s, ratio(1, 1)), &m).unwrap();
        assert_eq!(r.verdict(), Verdict::Refuted);
        assert_eq!(r.witness().to_string(), "{y, z}");
        assert_eq!(r.suggested_delta(), Some(&ratio(1, 1)));
        assert_eq!(r.corrected().unwrap(), &on(&s, &[(1, 1), (0, 1), (1, 1), (0, 1)]));
        let ok = check_least(&d, &mu(&s), &m).unwrap();
        assert_eq!(ok.verdict(), Verdict::Confirmed);
        assert!(ok.witness().is_empty());
        assert!(ok.suggested_delta().is_none());
    }

    #[test]
    fn greatest_check_on_the_termination_chain() {
        let (s, d) = termination();
        let m = MvAlgebra::unit_interval();
        let r = check_greatest(&d, &Valuation::constant(&s, ratio(1, 1)), &m).unwrap();
        assert_eq!(r.verdict(), Verdict::Confirmed);
        let r = check_greatest(&d, &mu(&s), &m).unwrap();
        assert_eq!(r.verdict(), Verdict::Refuted);
        assert_eq!(r.witness().to_string(), "{y, z}");
        let raised = r.corrected().unwrap();
        assert!(mu(&s).leq(raised).unwrap());
        assert!(raised.leq(&d.step(raised, &m).unwrap()).unwrap());
    }

    #[test]
    fn non_fixpoints_are_inconclusive() {
        let (s, d) = termination();
        let m = MvAlgebra::unit_interval();
        let a = on(&s, &[(1, 1), (0, 1), (1, 1), (0, 1)]);
        let r = check_least(&d, &a, &m).unwrap();
        assert_eq!(r.verdict(), Verdict::Inconclusive);
        assert!(!r.is_fixpoint());
        assert_eq!(r.witness().to_string(), "{x}");
    }

    #[test]
    fn post_fixpoint_rule() {
        let (s, d) = termination();
        let m = MvAlgebra::unit_interval();
        assert_eq!(check_post_below_least(&d, &mu(&s), &m).unwrap().verdict(), Verdict::Confirmed);
        assert_eq!(check_post_below_least(&d, &Valuation::zero(&s), &m).unwrap().verdict(), Verdict::Confirmed);
        let ones = check_post_below_least(&d, &Valuation::constant(&s, ratio(1, 1)), &m).unwrap();
        assert_eq!(ones.verdict(), Verdict::Inconclusive);
        assert_eq!(ones.witness().to_string(), "{y, z}");
        // x above its image is not a post-fixpoint
        let high = on(&s, &[(1, 1), (0, 1), (1, 1), (0, 1)]);
        assert_eq!(check_post_below_least(&d, &high, &m).unwrap().witness().to_string(), "{x}");
    }

    #[test]
    fn pre_fixpoint_rule() {
        let (s, d) = termination();
        let m = MvAlgebra::unit_interval();
        let ones = Valuation::constant(&s, ratio(1, 1));
        assert_eq!(check_pre_above_greatest(&d, &ones, &m).unwrap().verdict(), Verdict::Confirmed);
        assert_eq!(check_pre_above_greatest(&d, &mu(&s), &m).unwrap().verdict(), Verdict::Inconclusive);
    }

    #[test]
    fn decrease_requires_a_witness() {
        let (s, d) = termination();
        let m = MvAlgebra::unit_interval();
        let ones = Valuation::constant(&s, ratio(1, 1));
        assert_eq!(suggest_decrease(&d, &ones, &Subset::empty(&s), &m), Err(EngineError::EmptyWitness));
    }

    #[test]
    fn iteration_reaches_the_least_fixpoint() {
        let (s, d) = termination();
        let m = MvAlgebra::unit_interval();
        let opts = IterateOptions::new(&m);
        let out = iterate_to_least_from_above(&d, &Valuation::constant(&s, ratio(1, 1)), &opts, &m).unwrap();
        assert!(out.confirmed);
        assert_eq!(out.result, mu(&s));
        assert_eq!(out.rounds.len(), 2);
        let again = iterate_to_least_from_above(&d, &mu(&s), &opts, &m).unwrap();
        assert_eq!(again.rounds.len(), 1);
        assert!(again.confirmed);
    }

    #[test]
    fn modes_parse() {
        for m in CheckMode::ALL {
            assert_eq!(m.as_str().parse::<CheckMode>().unwrap(), m);
            assert_eq!(m.dual().dual(), m);
        }
        assert!("most".parse::<CheckMode>().is_err());
        assert_eq!(Verdict::Inconclusive.exit_code(), 2);
    }
}
