//! Text to [`ModelSource`]; names are resolved later.

use num_rational::BigRational;

use crate::dsl::ast::{BlockExpr, Decl, DeclKind, Expr, MapTarget, ModelSource, SetExpr, Value};
use crate::lexer::{Cursor, ParseError};
use crate::mv::AlgebraKind;
use crate::set::Element;

pub fn parse_source(text: &str) -> Result<ModelSource, ParseError> {
    let mut c = Cursor::new(text, false)?;
    c.expect_keyword("algebra")?;
    let t = c.peek().clone();
    let kind = match c.expect_word("`real` or `chain`")?.0.as_str() {
        "real" => AlgebraKind::RealInterval,
        "chain" => AlgebraKind::FiniteChain,
        _ => return Err(c.error_at(&t, "expected `real` or `chain`")),
    };
    let k = c.integer()?;
    let mut decls = Vec::new();
    while !c.at_eof() {
        decls.push(decl(&mut c)?);
    }
    Ok(ModelSource { algebra: (kind, k), decls })
}

fn decl(c: &mut Cursor) -> Result<Decl, ParseError> {
    let head = c.peek().clone();
    let span = head.span;
    let (kw, _) = c.expect_word("a declaration")?;
    let kind_name = kw.clone();
    if !matches!(kw.as_str(), "set" | "map" | "rel" | "dist" | "block" | "diagram" | "valuation") {
        return Err(c.error_at(&head, "expected a declaration"));
    }
    let (name, _) = c.name(&format!("{kind_name} name"))?;
    let kind = match kw.as_str() {
        "set" => {
            c.expect_sym("=")?;
            DeclKind::Set(set_expr(c)?)
        }
        "map" => {
            c.expect_sym(":")?;
            let (domain, _) = c.name("set name")?;
            c.expect_sym("->")?;
            let (target, _) = c.name("set name or `M`")?;
            let target = if target == "M" { MapTarget::Values } else { MapTarget::Set(target) };
            let entries = braced(c, |c| {
                let e = c.element()?;
                c.expect_sym(":")?;
                let v = match target {
                    MapTarget::Values => Value::Number(c.rational()?),
                    MapTarget::Set(_) => Value::Element(c.element()?),
                };
                Ok((e, v))
            })?;
            DeclKind::Map { domain, target, entries }
        }
        "rel" => {
            c.expect_sym(":")?;
            let (input, _) = c.name("set name")?;
            c.expect_sym("<->")?;
            let (output, _) = c.name("set name")?;
            let pairs = braced(c, |c| {
                c.expect_sym("(")?;
                let l = c.element()?;
                c.expect_sym(",")?;
                let r = c.element()?;
                c.expect_sym(")")?;
                Ok((l, r))
            })?;
            DeclKind::Rel { input, output, pairs }
        }
        "dist" => {
            c.expect_keyword("on")?;
            let (base, _) = c.name("set name")?;
            DeclKind::Dist { base, weights: weighted(c)? }
        }
        "block" => {
            c.expect_sym("=")?;
            let t = c.peek().clone();
            let (op, _) = c.expect_word("a block kind")?;
            let (arg, _) = c.name("name")?;
            DeclKind::Block(match op.as_str() {
                "const" => BlockExpr::Const(arg),
                "reindex" => BlockExpr::Reindex(arg),
                "minrel" => BlockExpr::MinRel(arg),
                "maxrel" => BlockExpr::MaxRel(arg),
                "expect" => BlockExpr::Expect(arg),
                "add" => BlockExpr::Add(arg),
                "sub" => BlockExpr::Sub(arg),
                _ => return Err(c.error_at(&t, "unknown block kind")),
            })
        }
        "diagram" => {
            c.expect_sym("=")?;
            DeclKind::Diagram(seq_expr(c)?)
        }
        _ => {
            c.expect_sym(":")?;
            let (domain, _) = c.name("set name")?;
            DeclKind::Valuation { domain, entries: weighted(c)? }
        }
    };
    Ok(Decl { name, kind, span })
}

/// `{ item, item, … }`, possibly empty.
fn braced<X>(c: &mut Cursor, mut item: impl FnMut(&mut Cursor) -> Result<X, ParseError>) -> Result<Vec<X>, ParseError> {
    c.expect_sym("{")?;
    let mut out = Vec::new();
    if c.eat_sym("}") {
        return Ok(out);
    }
    loop {
        out.push(item(c)?);
        if c.eat_sym("}") {
            return Ok(out);
        }
        c.expect_sym(",")?;
    }
}

fn weighted(c: &mut Cursor) -> Result<Vec<(Element, BigRational)>, ParseError> {
    braced(c, |c| {
        let e = c.element()?;
        c.expect_sym(":")?;
        Ok((e, c.rational()?))
    })
}

fn set_expr(c: &mut Cursor) -> Result<SetExpr, ParseError> {
    if c.at_sym("{") {
        return Ok(SetExpr::Literal(braced(c, Cursor::element)?));
    }
    if c.at_word("dists") {
        c.advance();
        return Ok(SetExpr::Dists(braced(c, |c| Ok(c.name("distribution name")?.0))?));
    }
    let (l, _) = c.name("set name")?;
    let op = if c.eat_sym("*") {
        SetExpr::Product
    } else if c.eat_sym("\\") {
        SetExpr::Difference
    } else if c.eat_sym("+") {
        SetExpr::Sum
    } else {
        return Err(c.error_here("expected `*`, `\\` or `+`"));
    };
    let (r, _) = c.name("set name")?;
    Ok(op(l, r))
}

fn seq_expr(c: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = tensor_expr(c)?;
    while c.eat_sym(";") {
        e = Expr::Seq(Box::new(e), Box::new(tensor_expr(c)?));
    }
    Ok(e)
}

fn tensor_expr(c: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = atom_expr(c)?;
    while c.eat_sym("|") {
        e = Expr::Tensor(Box::new(e), Box::new(atom_expr(c)?));
    }
    Ok(e)
}

fn atom_expr(c: &mut Cursor) -> Result<Expr, ParseError> {
    if c.eat_sym("(") {
        let e = seq_expr(c)?;
        c.expect_sym(")")?;
        return Ok(e);
    }
    let (w, _) = c.name("diagram expression")?;
    Ok(match w.as_str() {
        "id" => Expr::Id(c.name("set name")?.0),
        "sym" => {
            let s = c.name("set name")?.0;
            Expr::Sym(s, c.name("set name")?.0)
        }
        "dup" => Expr::Dup(c.name("set name")?.0),
        "end" => Expr::End(c.name("set name")?.0),
        _ => Expr::Name(w),
    })
}
