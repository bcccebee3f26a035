//! Surface syntax: AST types, parser, printer, substitution, and desugaring.

pub mod ast;
mod desugar;
mod lexer;
mod parser;
mod printer;
mod resugar;
mod subst;

pub use ast::{Assertion, BExpr, Expr, Name, Stmt, FRESH_PREFIX};
pub use desugar::desugar;
pub(crate) use desugar::{
    allocated_core, and_core, desugar_with, exists_core, not_allocated_core, not_core, or_core,
};
pub use parser::{parse_assertion, parse_program, SyntaxError};
pub use resugar::resugar;
pub use subst::{alpha_equiv, subst, subst_bexpr, subst_expr, FreshNames, ModalityPresent};
pub(crate) use subst::rename_var;
