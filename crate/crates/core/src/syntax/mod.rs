//! Object language: types, terms, formulas, positions, substitutions,
//! parsing and printing.

mod ast;
mod parse;
mod position;
mod print;
mod subst;
mod types;

pub use ast::{
    free_var_decls_of, is_identifier, Expr, Formula, FunctionSymbol, Node, Op, Pred, Signature,
    Term, Var, KEYWORDS,
};
pub use parse::{parse_formula, parse_term, parse_type, ParseError};
pub(crate) use parse::{Parser, Tok};
pub use position::{Position, PositionError};
pub use subst::{SubstError, Substitution};
pub use types::Type;
