//! Name resolution and validation of a [`ModelSource`].

use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::blocks::{Block, Relation};
use crate::diagram::{Diagram, Term};
use crate::distribution::Distribution;
use crate::dsl::ast::{BlockExpr, DeclKind, Expr, MapTarget, ModelSource, SetExpr, Value};
use crate::dsl::parser::parse_source;
use crate::dsl::printer::print_source;
use crate::lexer::{ParseError, Span};
use crate::mv::MvAlgebra;
use crate::scalar::Scalar;
use crate::set::{Carrier, Element, FiniteSet};
use crate::valuation::Valuation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{}{span}: {kind} `{name}`: {message}", file.as_deref().map(|f| format!("{f}:")).unwrap_or_default())]
    Validation { file: Option<String>, span: Span, kind: &'static str, name: String, message: String },
}

impl ModelError {
    pub fn in_file(self, file: &str) -> Self {
        match self {
            ModelError::Parse(e) => ModelError::Parse(e.in_file(file)),
            ModelError::Validation { span, kind, name, message, .. } => {
                ModelError::Validation { file: Some(file.to_string()), span, kind, name, message }
            }
        }
    }
}

/// A resolved map: into a declared set (positions in the target, in
/// domain order) or into the algebra.
#[derive(Clone, PartialEq, Eq)]
pub enum MapDef<T> {
    ToSet { domain: Carrier, target: Carrier, image: Vec<usize> },
    ToValues(Valuation<T>),
}

#[derive(Clone)]
pub struct Model<T: Scalar> {
    source: ModelSource,
    algebra: MvAlgebra<T>,
    sets: IndexMap<String, Carrier>,
    maps: IndexMap<String, MapDef<T>>,
    relations: IndexMap<String, Relation>,
    dists: IndexMap<String, Distribution<T>>,
    /// Sets declared with `dists { … }`, with their members in order.
    dist_sets: IndexMap<String, Vec<String>>,
    blocks: IndexMap<String, Block<T>>,
    diagrams: IndexMap<String, (Term<T>, Diagram<T>)>,
    valuations: IndexMap<String, Valuation<T>>,
}

impl<T: Scalar> PartialEq for Model<T> {
    fn eq(&self, o: &Self) -> bool {
        let diagrams = |m: &Self| m.diagrams.iter().map(|(n, (_, d))| (n.clone(), d.clone())).collect::<Vec<_>>();
        self.source == o.source
            && self.algebra.kind() == o.algebra.kind()
            && self.algebra.scale() == o.algebra.scale()
            && self.sets == o.sets
            && self.maps == o.maps
            && self.relations == o.relations
            && self.dists == o.dists
            && self.dist_sets == o.dist_sets
            && self.blocks == o.blocks
            && diagrams(self) == diagrams(o)
            && self.valuations == o.valuations
    }
}

impl<T: Scalar> std::fmt::Debug for Model<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn parse_model<T: Scalar>(text: &str) -> Result<Model<T>, ModelError> {
    Model::from_source(parse_source(text)?)
}

impl<T: Scalar> Model<T> {
    pub fn from_source(source: ModelSource) -> Result<Self, ModelError> {
        let (kind, k) = source.algebra;
        let algebra = MvAlgebra::new(kind, k).map_err(|e| ModelError::Validation {
            file: None,
            span: Span { line: 1, column: 1 },
            kind: "algebra",
            name: kind.to_string(),
            message: e.to_string(),
        })?;
        let mut m = Model {
            source: ModelSource { algebra: source.algebra, decls: Vec::new() },
            algebra,
            sets: IndexMap::new(),
            maps: IndexMap::new(),
            relations: IndexMap::new(),
            dists: IndexMap::new(),
            dist_sets: IndexMap::new(),
            blocks: IndexMap::new(),
            diagrams: IndexMap::new(),
            valuations: IndexMap::new(),
        };
        for d in source.decls {
            let fail = |message: String| ModelError::Validation {
                file: None,
                span: d.span,
                kind: d.kind.keyword(),
                name: d.name.clone(),
                message,
            };
            m.declare(&d.name, &d.kind).map_err(fail)?;
            m.source.decls.push(d);
        }
        Ok(m)
    }

    pub fn source(&self) -> &ModelSource {
        &self.source
    }

    pub fn to_text(&self) -> String {
        print_source(&self.source)
    }

    pub fn algebra(&self) -> &MvAlgebra<T> {
        &self.algebra
    }

    pub fn set(&self, name: &str) -> Option<&Carrier> {
        self.sets.get(name)
    }

    pub fn map(&self, name: &str) -> Option<&MapDef<T>> {
        self.maps.get(name)
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn distribution(&self, name: &str) -> Option<&Distribution<T>> {
        self.dists.get(name)
    }

    pub fn block(&self, name: &str) -> Option<&Block<T>> {
        self.blocks.get(name)
    }

    pub fn diagram(&self, name: &str) -> Option<&Diagram<T>> {
        self.diagrams.get(name).map(|(_, d)| d)
    }

    pub fn valuation(&self, name: &str) -> Option<&Valuation<T>> {
        self.valuations.get(name)
    }

    pub fn diagram_names(&self) -> impl Iterator<Item = &str> {
        self.diagrams.keys().map(String::as_str)
    }

    pub fn valuation_names(&self) -> impl Iterator<Item = &str> {
        self.valuations.keys().map(String::as_str)
    }

    fn find_set(&self, name: &str) -> Result<Carrier, String> {
        self.sets.get(name).cloned().ok_or_else(|| format!("unknown set `{name}`"))
    }

    fn value(&self, r: &num_rational::BigRational) -> Result<T, String> {
        self.algebra.element(r).map_err(|e| e.to_string())
    }

    fn values_on(&self, domain: &Carrier, entries: &[(Element, num_rational::BigRational)]) -> Result<Valuation<T>, String> {
        let mut values = vec![T::zero(); domain.len()];
        let mut seen = vec![false; domain.len()];
        for (e, r) in entries {
            let i = domain.require(e).map_err(|e| e.to_string())?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(format!("`{e}` is given twice"));
            }
            values[i] = self.value(r)?;
        }
        Ok(Valuation::new(domain, values).expect("one value per element"))
    }

    fn declare(&mut self, name: &str, kind: &DeclKind) -> Result<(), String> {
        let taken = match kind {
            DeclKind::Set(_) => self.sets.contains_key(name),
            DeclKind::Map { .. } => self.maps.contains_key(name),
            DeclKind::Rel { .. } => self.relations.contains_key(name),
            DeclKind::Dist { .. } => self.dists.contains_key(name),
            // blocks and diagrams share the expression namespace
            DeclKind::Block(_) | DeclKind::Diagram(_) => {
                self.blocks.contains_key(name) || self.diagrams.contains_key(name)
            }
            DeclKind::Valuation { .. } => self.valuations.contains_key(name),
        };
        if taken {
            return Err("name already declared".into());
        }
        match kind {
            DeclKind::Set(s) => {
                let set = self.set_expr(name, s)?;
                self.sets.insert(name.into(), set);
            }
            DeclKind::Map { domain, target, entries } => {
                let domain = self.find_set(domain)?;
                let def = match target {
                    MapTarget::Values => {
                        let numbers: Vec<_> = entries
                            .iter()
                            .map(|(e, v)| match v {
                                Value::Number(r) => Ok((e.clone(), r.clone())),
                                Value::Element(x) => Err(format!("`{x}` is not a value")),
                            })
                            .collect::<Result<_, String>>()?;
                        MapDef::ToValues(self.values_on(&domain, &numbers)?)
                    }
                    MapTarget::Set(t) => {
                        let target = self.find_set(t)?;
                        let mut image: Vec<Option<usize>> = vec![None; domain.len()];
                        for (e, v) in entries {
                            let Value::Element(x) = v else { return Err(format!("`{e}` maps to a number, not an element")) };
                            let i = domain.require(e).map_err(|e| e.to_string())?;
                            let j = target.require(x).map_err(|e| e.to_string())?;
                            if image[i].replace(j).is_some() {
                                return Err(format!("`{e}` is mapped twice"));
                            }
                        }
                        let image = image
                            .into_iter()
                            .enumerate()
                            .map(|(i, j)| j.ok_or_else(|| format!("map is not total: `{}` has no image", domain.get(i))))
                            .collect::<Result<_, _>>()?;
                        MapDef::ToSet { domain, target, image }
                    }
                };
                self.maps.insert(name.into(), def);
            }
            DeclKind::Rel { input, output, pairs } => {
                let (a, b) = (self.find_set(input)?, self.find_set(output)?);
                let rel = Relation::from_elements(&a, &b, pairs.iter().cloned()).map_err(|e| e.to_string())?;
                self.relations.insert(name.into(), rel);
            }
            DeclKind::Dist { base, weights } => {
                let base = self.find_set(base)?;
                let ws = weights
                    .iter()
                    .map(|(e, r)| {
                        T::from_ratio(r)
                            .map(|w| (e.clone(), w))
                            .ok_or_else(|| format!("weight {r} is not representable in this algebra"))
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                let p = Distribution::from_elements(&base, ws).map_err(|e| e.to_string())?;
                self.dists.insert(name.into(), p);
            }
            DeclKind::Block(b) => {
                let block = self.block_expr(b)?.named(name);
                block.check_in(&self.algebra).map_err(|e| e.to_string())?;
                self.blocks.insert(name.into(), block);
            }
            DeclKind::Diagram(e) => {
                let term = Term::named(name, self.term(e)?);
                let d = term.build().map_err(|e| e.to_string())?;
                self.diagrams.insert(name.into(), (term, d));
            }
            DeclKind::Valuation { domain, entries } => {
                let domain = self.find_set(domain)?;
                let v = self.values_on(&domain, entries)?;
                self.valuations.insert(name.into(), v);
            }
        }
        Ok(())
    }

    fn set_expr(&mut self, name: &str, s: &SetExpr) -> Result<Carrier, String> {
        Ok(match s {
            SetExpr::Literal(es) => FiniteSet::new(es.iter().cloned()).map_err(|e| e.to_string())?,
            SetExpr::Product(a, b) => {
                let (a, b) = (self.find_set(a)?, self.find_set(b)?);
                FiniteSet::product(&a, &b)
            }
            SetExpr::Difference(a, b) => {
                let (a, b) = (self.find_set(a)?, self.find_set(b)?);
                FiniteSet::difference(&a, &b)
            }
            SetExpr::Sum(a, b) => {
                let (a, b) = (self.find_set(a)?, self.find_set(b)?);
                FiniteSet::sum(&a, &b).map_err(|e| e.to_string())?
            }
            SetExpr::Dists(ns) => {
                let mut base: Option<&Carrier> = None;
                for n in ns {
                    let p = self.dists.get(n).ok_or_else(|| format!("unknown distribution `{n}`"))?;
                    match base {
                        None => base = Some(p.base()),
                        Some(b) if b.same_elements(p.base()) => {}
                        Some(b) => return Err(format!("`{n}` lives on {}, not {b}", p.base())),
                    }
                }
                let set = FiniteSet::atoms(ns).map_err(|e| e.to_string())?;
                self.dist_sets.insert(name.into(), ns.clone());
                set
            }
        })
    }

    fn values_map(&self, n: &str) -> Result<&Valuation<T>, String> {
        match self.maps.get(n) {
            Some(MapDef::ToValues(v)) => Ok(v),
            Some(MapDef::ToSet { .. }) => Err(format!("map `{n}` must take values in M")),
            None => Err(format!("unknown map `{n}`")),
        }
    }

    fn find_relation(&self, n: &str) -> Result<Relation, String> {
        self.relations.get(n).cloned().ok_or_else(|| format!("unknown relation `{n}`"))
    }

    fn block_expr(&self, b: &BlockExpr) -> Result<Block<T>, String> {
        Ok(match b {
            BlockExpr::Const(n) => Block::constant(&FiniteSet::empty(), self.values_map(n)?.clone()),
            BlockExpr::Add(n) => Block::add(self.values_map(n)?.clone()),
            BlockExpr::Sub(n) => Block::sub(self.values_map(n)?.clone()),
            BlockExpr::Reindex(n) => match self.maps.get(n) {
                Some(MapDef::ToSet { domain, target, image }) => {
                    Block::reindex(target, domain, image.clone()).map_err(|e| e.to_string())?
                }
                Some(MapDef::ToValues(_)) => return Err(format!("map `{n}` must take values in a set")),
                None => return Err(format!("unknown map `{n}`")),
            },
            BlockExpr::MinRel(n) => Block::min_rel(self.find_relation(n)?),
            BlockExpr::MaxRel(n) => Block::max_rel(self.find_relation(n)?),
            BlockExpr::Expect(n) => {
                let members = self.dist_sets.get(n).ok_or_else(|| format!("`{n}` is not a set of distributions"))?;
                let set = &self.sets[n];
                let dists: Vec<Distribution<T>> = members.iter().map(|m| self.dists[m].clone()).collect();
                let base = match dists.first() {
                    Some(p) => p.base().clone(),
                    None => return Err(format!("`{n}` is empty, so its base set is unknown")),
                };
                Block::expect(&base, set, dists).map_err(|e| e.to_string())?
            }
        })
    }

    fn term(&self, e: &Expr) -> Result<Term<T>, String> {
        Ok(match e {
            Expr::Name(n) => {
                if let Some(b) = self.blocks.get(n) {
                    Term::Block(Arc::new(b.clone()))
                } else if let Some((t, _)) = self.diagrams.get(n) {
                    t.clone()
                } else {
                    return Err(format!("unknown block or diagram `{n}`"));
                }
            }
            Expr::Id(s) => Term::Id(self.find_set(s)?),
            Expr::Sym(s, t) => Term::Sym(self.find_set(s)?, self.find_set(t)?),
            Expr::Dup(s) => Term::Dup(self.find_set(s)?),
            Expr::End(s) => Term::Disch(self.find_set(s)?),
            Expr::Seq(l, r) => Term::seq(self.term(l)?, self.term(r)?),
            Expr::Tensor(l, r) => Term::tensor(self.term(l)?, self.term(r)?),
        })
    }
}
