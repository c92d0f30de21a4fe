//! Abstract syntax, surface grammar, abbreviations and nominal bookkeeping.

mod abbrev;
mod ast;
mod json;
mod parse;
mod print;
mod symbols;

use thiserror::Error;

pub use abbrev::{expand_abbrev, Abbrev};
pub use ast::{sym, CmpKind, Expr, NodeExpr, PathExpr, Sym, SymKind};
pub use json::AstJson;
pub use parse::{parse_node, parse_node_with, parse_path, parse_sequent, parse_sequent_with};
pub use print::{print_node, print_node_styled, print_path, print_sequent, print_sequent_styled, Style};
pub use symbols::{FreshSupply, SymbolTable, FRESH_PREFIX};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("unexpected character '{ch}' at byte {pos}")]
    UnexpectedChar { pos: usize, ch: char },
    #[error("unexpected {found} at byte {pos}, expected {expected}")]
    Unexpected { pos: usize, found: String, expected: String },
    #[error("unexpected end of input at byte {pos}, expected {expected}")]
    UnexpectedEnd { pos: usize, expected: String },
    #[error("symbol '{name}' used as both {first} and {second}")]
    SymbolClash { name: String, first: SymKind, second: SymKind },
    #[error("unknown abbreviation '{0}'")]
    UnknownAbbreviation(String),
    #[error("wrong arguments for abbreviation '{0}'")]
    AbbreviationArgs(String),
    #[error("sequent shape: {0}")]
    Shape(String),
}
