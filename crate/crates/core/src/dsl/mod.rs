//! The model language: algebra, sets, maps, relations, distributions,
//! blocks, diagrams and candidate valuations, one declaration per line.
//!
//! ```text
//! algebra real 1
//! set S = { x, y, u, z }
//! set T = { u }
//! set N = S \ T
//! dist p_x on S { y: 1/2, u: 1/2 }
//! dist p_y on S { z: 1 }
//! dist p_z on S { y: 1 }
//! set D = dists { p_x, p_y, p_z }
//! map eta : N -> D { x: p_x, y: p_y, z: p_z }
//! map one : T -> M { u: 1 }
//! block ex = expect D
//! block back = reindex eta
//! block c = const one
//! diagram T = (ex ; back) | c
//! valuation ones : S { x: 1, y: 1, u: 1, z: 1 }
//! ```
//!
//! `|` binds tighter than `;`, and both associate to the left.

pub mod ast;
pub mod model;
pub mod parser;
pub mod printer;

pub use ast::{BlockExpr, Decl, DeclKind, Expr, MapTarget, ModelSource, SetExpr, Value};
pub use model::{parse_model, MapDef, Model, ModelError};
pub use parser::parse_source;
pub use printer::print_source;
