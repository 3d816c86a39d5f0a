//! Canonical text for a [`ModelSource`]; parsing it back gives an equal
//! source.

use std::fmt::Write;

use num_rational::BigRational;

use crate::dsl::ast::{DeclKind, Expr, MapTarget, ModelSource, SetExpr, Value};
use crate::set::Element;

fn ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn list<X>(items: &[X], f: impl Fn(&X) -> String) -> String {
    if items.is_empty() {
        return "{ }".into();
    }
    format!("{{ {} }}", items.iter().map(f).collect::<Vec<_>>().join(", "))
}

fn weighted(items: &[(Element, BigRational)]) -> String {
    list(items, |(e, r)| format!("{e}: {}", ratio(r)))
}

/// Minimal parentheses: `|` binds tighter than `;`, both left-associative.
pub fn print_expr(e: &Expr) -> String {
    fn go(e: &Expr, level: u8) -> String {
        // level 0: any, 1: tensor operand (left), 2: atom
        let (text, own) = match e {
            Expr::Name(n) => (n.clone(), 2),
            Expr::Id(s) => (format!("id {s}"), 2),
            Expr::Sym(s, t) => (format!("sym {s} {t}"), 2),
            Expr::Dup(s) => (format!("dup {s}"), 2),
            Expr::End(s) => (format!("end {s}"), 2),
            Expr::Seq(l, r) => (format!("{} ; {}", go(l, 0), go(r, 1)), 0),
            Expr::Tensor(l, r) => (format!("{} | {}", go(l, 1), go(r, 2)), 1),
        };
        if own < level {
            format!("({text})")
        } else {
            text
        }
    }
    go(e, 0)
}

pub fn print_source(src: &ModelSource) -> String {
    let mut out = String::new();
    writeln!(out, "algebra {} {}", src.algebra.0, src.algebra.1).unwrap();
    for d in &src.decls {
        let body = match &d.kind {
            DeclKind::Set(s) => match s {
                SetExpr::Literal(es) => format!("= {}", list(es, |e| e.to_string())),
                SetExpr::Product(a, b) => format!("= {a} * {b}"),
                SetExpr::Difference(a, b) => format!("= {a} \\ {b}"),
                SetExpr::Sum(a, b) => format!("= {a} + {b}"),
                SetExpr::Dists(ns) => format!("= dists {}", list(ns, |n| n.clone())),
            },
            DeclKind::Map { domain, target, entries } => {
                let target = match target {
                    MapTarget::Set(s) => s.as_str(),
                    MapTarget::Values => "M",
                };
                let entries = list(entries, |(e, v)| match v {
                    Value::Element(x) => format!("{e}: {x}"),
                    Value::Number(r) => format!("{e}: {}", ratio(r)),
                });
                format!(": {domain} -> {target} {entries}")
            }
            DeclKind::Rel { input, output, pairs } => {
                format!(": {input} <-> {output} {}", list(pairs, |(a, b)| format!("({a},{b})")))
            }
            DeclKind::Dist { base, weights } => format!("on {base} {}", weighted(weights)),
            DeclKind::Block(b) => format!("= {} {}", b.keyword(), b.argument()),
            DeclKind::Diagram(e) => format!("= {}", print_expr(e)),
            DeclKind::Valuation { domain, entries } => format!(": {domain} {}", weighted(entries)),
        };
        writeln!(out, "{} {} {body}", d.kind.keyword(), d.name).unwrap();
    }
    out
}
