//! Transition systems and their line-oriented text formats.
//!
//! ```text
//! states x y u z
//! terminal u              # .mc only
//! label 1 A               # .lmc only
//! edge x -> y prob 1/2    # `prob` omitted in .nts
//! candidate ones default 1 { }
//! candidate mu { x: 1/2, u: 1 }
//! ```
//!
//! Candidates live on the states (`.mc`) or on pairs of states (`.lmc`,
//! `.nts`); unlisted entries take the `default` value, else 0.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use thiserror::Error;

use crate::distribution::Distribution;
use crate::lexer::{Cursor, ParseError, Span};
use crate::mv::MvAlgebra;
use crate::scalar::Scalar;
use crate::set::{Carrier, Element, FiniteSet};
use crate::valuation::{Subset, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0}")]
pub struct SystemError(pub String);

/// `(S, T, η)`: `η` is defined exactly on the non-terminal states.
#[derive(Clone, Debug)]
pub struct MarkovChain<T: Scalar> {
    states: Carrier,
    terminal: Subset,
    next: Vec<Option<Distribution<T>>>,
}

impl<T: Scalar> MarkovChain<T> {
    pub fn new(
        states: &Carrier,
        terminal: Subset,
        next: impl IntoIterator<Item = (Element, Distribution<T>)>,
    ) -> Result<Self, SystemError> {
        if !Arc::ptr_eq(terminal.domain(), states) && terminal.domain().elements() != states.elements() {
            return Err(SystemError("terminal states must be a subset of the states".into()));
        }
        let mut table: Vec<Option<Distribution<T>>> = vec![None; states.len()];
        for (s, p) in next {
            let i = states.position(&s).ok_or_else(|| SystemError(format!("unknown state `{s}`")))?;
            if terminal.contains_index(i) {
                return Err(SystemError(format!("terminal state `{s}` has a successor distribution")));
            }
            if table[i].is_some() {
                return Err(SystemError(format!("state `{s}` has two successor distributions")));
            }
            table[i] = Some(p.reorder_to(states).map_err(|e| SystemError(e.to_string()))?);
        }
        if let Some(i) = (0..states.len()).find(|&i| table[i].is_none() && !terminal.contains_index(i)) {
            return Err(SystemError(format!("non-terminal state `{}` has no successors", states.get(i))));
        }
        Ok(MarkovChain { states: states.clone(), terminal, next: table })
    }

    pub fn states(&self) -> &Carrier {
        &self.states
    }

    pub fn terminal(&self) -> &Subset {
        &self.terminal
    }

    pub fn next(&self, i: usize) -> Option<&Distribution<T>> {
        self.next[i].as_ref()
    }
}

/// `(X, η, ℓ)`.
#[derive(Clone, Debug)]
pub struct LabelledMarkovChain<T: Scalar> {
    states: Carrier,
    labels: Vec<Arc<str>>,
    next: Vec<Distribution<T>>,
}

impl<T: Scalar> LabelledMarkovChain<T> {
    /// Both maps are listed in state order.
    pub fn new(states: &Carrier, labels: Vec<Arc<str>>, next: Vec<Distribution<T>>) -> Result<Self, SystemError> {
        if labels.len() != states.len() || next.len() != states.len() {
            return Err(SystemError(format!(
                "{} states, {} labels, {} successor distributions",
                states.len(),
                labels.len(),
                next.len()
            )));
        }
        let next = next.iter().map(|p| p.reorder_to(states)).collect::<Result<_, _>>().map_err(|e| SystemError(e.to_string()))?;
        Ok(LabelledMarkovChain { states: states.clone(), labels, next })
    }

    pub fn states(&self) -> &Carrier {
        &self.states
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn next(&self, i: usize) -> &Distribution<T> {
        &self.next[i]
    }

    /// `X × X`, the carrier of metrics.
    pub fn pairs(&self) -> Carrier {
        FiniteSet::product(&self.states, &self.states)
    }
}

/// `ξ: X → PX`.
#[derive(Clone, Debug)]
pub struct NondetTS {
    states: Carrier,
    succ: Vec<Subset>,
}

impl NondetTS {
    pub fn new(states: &Carrier, succ: Vec<Subset>) -> Result<Self, SystemError> {
        if succ.len() != states.len() {
            return Err(SystemError(format!("{} states, {} successor sets", states.len(), succ.len())));
        }
        let succ = succ.iter().map(|s| s.reorder_to(states)).collect::<Result<_, _>>().map_err(|e| SystemError(e.to_string()))?;
        Ok(NondetTS { states: states.clone(), succ })
    }

    pub fn states(&self) -> &Carrier {
        &self.states
    }

    pub fn succ(&self, i: usize) -> &Subset {
        &self.succ[i]
    }

    pub fn pairs(&self) -> Carrier {
        FiniteSet::product(&self.states, &self.states)
    }
}

/// A parsed system with its named candidate valuations, in file order.
#[derive(Clone, Debug)]
pub struct SystemFile<S, T: Scalar> {
    pub system: S,
    pub candidates: Vec<(String, Valuation<T>)>,
}

impl<S, T: Scalar> SystemFile<S, T> {
    /// A declared candidate, or the built-ins `top` and `bottom` on `domain`.
    pub fn candidate(&self, name: &str, domain: &Carrier, alg: &MvAlgebra<T>) -> Option<Valuation<T>> {
        if let Some((_, v)) = self.candidates.iter().find(|(n, _)| n == name) {
            return Some(v.clone());
        }
        match name {
            "top" => Some(Valuation::constant(domain, alg.top())),
            "bottom" => Some(Valuation::zero(domain)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Mc,
    Lmc,
    Nts,
}

struct RawCandidate {
    name: String,
    span: Span,
    default: Option<BigRational>,
    entries: Vec<(Element, BigRational, Span)>,
}

#[derive(Default)]
struct Raw {
    states: Vec<(Element, Span)>,
    terminal: Vec<(Element, Span)>,
    labels: Vec<(Element, String, Span)>,
    edges: Vec<(Element, Element, Option<BigRational>, Span)>,
    candidates: Vec<RawCandidate>,
}

fn err(span: Span, token: &str, message: impl Into<String>) -> ParseError {
    ParseError { file: None, span, message: message.into(), token: token.to_string() }
}

fn parse_raw(text: &str, format: Format) -> Result<Raw, ParseError> {
    let mut c = Cursor::new(text, true)?;
    let mut raw = Raw::default();
    loop {
        c.skip_newlines();
        if c.at_eof() {
            return Ok(raw);
        }
        let head = c.peek().clone();
        let (kw, span) = c.expect_word("a statement")?;
        match kw.as_str() {
            "states" => {
                while !c.at_newline() {
                    let s = c.span();
                    raw.states.push((c.element()?, s));
                }
            }
            "terminal" if format == Format::Mc => {
                while !c.at_newline() {
                    let s = c.span();
                    raw.terminal.push((c.element()?, s));
                }
            }
            "label" if format == Format::Lmc => {
                let s = c.element()?;
                let (l, _) = c.name("label")?;
                raw.labels.push((s, l, span));
            }
            "edge" => {
                let from = c.element()?;
                c.expect_sym("->")?;
                let to = c.element()?;
                let prob = if format == Format::Nts {
                    None
                } else {
                    c.expect_keyword("prob")?;
                    Some(c.rational()?)
                };
                raw.edges.push((from, to, prob, span));
            }
            "candidate" => {
                let (name, _) = c.name("candidate name")?;
                let default = if c.at_word("default") {
                    c.advance();
                    Some(c.rational()?)
                } else {
                    None
                };
                c.expect_sym("{")?;
                let mut entries = Vec::new();
                loop {
                    c.skip_newlines();
                    if c.eat_sym("}") {
                        break;
                    }
                    if !entries.is_empty() {
                        c.expect_sym(",")?;
                        c.skip_newlines();
                    }
                    let s = c.span();
                    let e = c.element()?;
                    c.expect_sym(":")?;
                    entries.push((e, c.rational()?, s));
                }
                raw.candidates.push(RawCandidate { name, span, default, entries });
            }
            _ => return Err(c.error_at(&head, "unknown statement")),
        }
        c.expect_newline()?;
    }
}

fn state_set(raw: &Raw) -> Result<Carrier, ParseError> {
    if raw.states.is_empty() {
        return Err(err(Span { line: 1, column: 1 }, "", "no `states` declared"));
    }
    let mut seen = BTreeMap::new();
    for (e, s) in &raw.states {
        if seen.insert(e.clone(), *s).is_some() {
            return Err(err(*s, &e.to_string(), "state declared twice"));
        }
    }
    Ok(FiniteSet::new(raw.states.iter().map(|(e, _)| e.clone())).expect("checked for duplicates"))
}

fn require_state(states: &FiniteSet, e: &Element, span: Span) -> Result<usize, ParseError> {
    states.position(e).ok_or_else(|| err(span, &e.to_string(), "unknown state"))
}

fn weight<T: Scalar>(r: &BigRational, span: Span) -> Result<T, ParseError> {
    T::from_ratio(r).ok_or_else(|| err(span, &r.to_string(), "probability is not representable"))
}

/// Successor distributions from `edge … prob …` lines; states without
/// edges are absent.
fn distributions<T: Scalar>(raw: &Raw, states: &Carrier) -> Result<Vec<Option<Distribution<T>>>, ParseError> {
    let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); states.len()];
    let mut first: Vec<Option<Span>> = vec![None; states.len()];
    for (from, to, p, span) in &raw.edges {
        let i = require_state(states, from, *span)?;
        let j = require_state(states, to, *span)?;
        let p = p.as_ref().expect("probabilistic formats carry probabilities");
        if rows[i].iter().any(|(k, _)| *k == j) {
            return Err(err(*span, &to.to_string(), format!("edge {from} -> {to} declared twice")));
        }
        rows[i].push((j, weight(p, *span)?));
        first[i].get_or_insert(*span);
    }
    rows.into_iter()
        .zip(first)
        .map(|(row, span)| match span {
            None => Ok(None),
            Some(span) => Distribution::new(states, row).map(Some).map_err(|e| err(span, "edge", e.to_string())),
        })
        .collect()
}

fn candidates<T: Scalar>(raw: &Raw, domain: &Carrier, alg: &MvAlgebra<T>) -> Result<Vec<(String, Valuation<T>)>, ParseError> {
    let mut out: Vec<(String, Valuation<T>)> = Vec::new();
    for cand in &raw.candidates {
        if out.iter().any(|(n, _)| *n == cand.name) {
            return Err(err(cand.span, &cand.name, "candidate declared twice"));
        }
        let value = |r: &BigRational, span: Span| alg.element(r).map_err(|e| err(span, &r.to_string(), e.to_string()));
        let default = match &cand.default {
            Some(r) => value(r, cand.span)?,
            None => T::zero(),
        };
        let mut values = vec![default; domain.len()];
        let mut set = vec![false; domain.len()];
        for (e, r, span) in &cand.entries {
            let i = domain.position(e).ok_or_else(|| err(*span, &e.to_string(), "not an element of the candidate's domain"))?;
            if std::mem::replace(&mut set[i], true) {
                return Err(err(*span, &e.to_string(), "entry given twice"));
            }
            values[i] = value(r, *span)?;
        }
        out.push((cand.name.clone(), Valuation::new(domain, values).expect("one value per element")));
    }
    Ok(out)
}

pub fn parse_mc<T: Scalar>(text: &str, alg: &MvAlgebra<T>) -> Result<SystemFile<MarkovChain<T>, T>, ParseError> {
    let raw = parse_raw(text, Format::Mc)?;
    let states = state_set(&raw)?;
    let mut terminal = Subset::empty(&states);
    for (e, s) in &raw.terminal {
        terminal.insert(require_state(&states, e, *s)?);
    }
    let dists = distributions::<T>(&raw, &states)?;
    for (i, p) in dists.iter().enumerate() {
        let s = raw.states[i].1;
        match (terminal.contains_index(i), p) {
            (true, Some(_)) => return Err(err(s, &states.get(i).to_string(), "terminal state has outgoing edges")),
            (false, None) => return Err(err(s, &states.get(i).to_string(), "non-terminal state has no outgoing edges")),
            _ => {}
        }
    }
    let next = dists.into_iter().enumerate().filter_map(|(i, p)| p.map(|p| (states.get(i).clone(), p)));
    let system = MarkovChain::new(&states, terminal, next).map_err(|e| err(Span::default(), "", e.0))?;
    let candidates = candidates(&raw, &states, alg)?;
    Ok(SystemFile { system, candidates })
}

pub fn parse_lmc<T: Scalar>(text: &str, alg: &MvAlgebra<T>) -> Result<SystemFile<LabelledMarkovChain<T>, T>, ParseError> {
    let raw = parse_raw(text, Format::Lmc)?;
    let states = state_set(&raw)?;
    let mut labels: Vec<Option<Arc<str>>> = vec![None; states.len()];
    for (e, l, s) in &raw.labels {
        let i = require_state(&states, e, *s)?;
        if labels[i].replace(Arc::from(l.as_str())).is_some() {
            return Err(err(*s, &e.to_string(), "state labelled twice"));
        }
    }
    let dists = distributions::<T>(&raw, &states)?;
    let mut ls = Vec::with_capacity(states.len());
    let mut ps = Vec::with_capacity(states.len());
    for (i, (l, p)) in labels.into_iter().zip(dists).enumerate() {
        let (e, s) = (&raw.states[i].0, raw.states[i].1);
        ls.push(l.ok_or_else(|| err(s, &e.to_string(), "state has no label"))?);
        ps.push(p.ok_or_else(|| err(s, &e.to_string(), "state has no outgoing edges"))?);
    }
    let system = LabelledMarkovChain::new(&states, ls, ps).map_err(|e| err(Span::default(), "", e.0))?;
    let candidates = candidates(&raw, &system.pairs(), alg)?;
    Ok(SystemFile { system, candidates })
}

pub fn parse_nts<T: Scalar>(text: &str, alg: &MvAlgebra<T>) -> Result<SystemFile<NondetTS, T>, ParseError> {
    let raw = parse_raw(text, Format::Nts)?;
    let states = state_set(&raw)?;
    let mut succ = vec![Subset::empty(&states); states.len()];
    for (from, to, _, span) in &raw.edges {
        let i = require_state(&states, from, *span)?;
        let j = require_state(&states, to, *span)?;
        if !succ[i].insert(j) {
            return Err(err(*span, &to.to_string(), format!("edge {from} -> {to} declared twice")));
        }
    }
    let system = NondetTS::new(&states, succ).map_err(|e| err(Span::default(), "", e.0))?;
    let candidates = candidates(&raw, &system.pairs(), alg)?;
    Ok(SystemFile { system, candidates })
}
