//! Declarations as written, before name resolution.

use num_rational::BigRational;

use crate::lexer::Span;
use crate::mv::AlgebraKind;
use crate::set::Element;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetExpr {
    Literal(Vec<Element>),
    Product(String, String),
    Difference(String, String),
    Sum(String, String),
    /// A set whose elements are declared distributions.
    Dists(Vec<String>),
}

/// The codomain of a map: a declared set, or the algebra `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapTarget {
    Set(String),
    Values,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Element(Element),
    Number(BigRational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockExpr {
    Const(String),
    Reindex(String),
    MinRel(String),
    MaxRel(String),
    Expect(String),
    Add(String),
    Sub(String),
}

impl BlockExpr {
    pub fn keyword(&self) -> &'static str {
        match self {
            BlockExpr::Const(_) => "const",
            BlockExpr::Reindex(_) => "reindex",
            BlockExpr::MinRel(_) => "minrel",
            BlockExpr::MaxRel(_) => "maxrel",
            BlockExpr::Expect(_) => "expect",
            BlockExpr::Add(_) => "add",
            BlockExpr::Sub(_) => "sub",
        }
    }

    pub fn argument(&self) -> &str {
        match self {
            BlockExpr::Const(n)
            | BlockExpr::Reindex(n)
            | BlockExpr::MinRel(n)
            | BlockExpr::MaxRel(n)
            | BlockExpr::Expect(n)
            | BlockExpr::Add(n)
            | BlockExpr::Sub(n) => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// A block or an earlier diagram.
    Name(String),
    Id(String),
    Sym(String, String),
    Dup(String),
    End(String),
    Seq(Box<Expr>, Box<Expr>),
    Tensor(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Set(SetExpr),
    Map { domain: String, target: MapTarget, entries: Vec<(Element, Value)> },
    Rel { input: String, output: String, pairs: Vec<(Element, Element)> },
    Dist { base: String, weights: Vec<(Element, BigRational)> },
    Block(BlockExpr),
    Diagram(Expr),
    Valuation { domain: String, entries: Vec<(Element, BigRational)> },
}

impl DeclKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            DeclKind::Set(_) => "set",
            DeclKind::Map { .. } => "map",
            DeclKind::Rel { .. } => "rel",
            DeclKind::Dist { .. } => "dist",
            DeclKind::Block(_) => "block",
            DeclKind::Diagram(_) => "diagram",
            DeclKind::Valuation { .. } => "valuation",
        }
    }
}

/// Spans are ignored by equality, so a reprinted model compares equal.
#[derive(Clone, Debug)]
pub struct Decl {
    pub name: String,
    pub kind: DeclKind,
    pub span: Span,
}

impl PartialEq for Decl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.kind == other.kind
    }
}

impl Eq for Decl {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSource {
    pub algebra: (AlgebraKind, u64),
    pub decls: Vec<Decl>,
}
