use std::fmt;
use std::str::FromStr;

use super::ast::{CmpKind, Expr, NodeExpr, PathExpr, Sym};
use super::SyntaxError;

/// The derived connectives and path forms of the language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Abbrev {
    /// `⊤`
    Top,
    /// `¬φ`
    Not,
    /// `φ ∨ ψ`
    Or,
    /// `φ ∧ ψ`
    And,
    /// `φ ↔ ψ`
    Iff,
    /// `ε`
    Eps,
    /// `⟨α⟩φ` for any path
    PathDiamond,
    /// `[α]φ`
    Box,
    /// `[α =_c β]`
    BoxEq(Sym),
    /// `[α ≠_c β]`
    BoxNeq(Sym),
}

impl FromStr for Abbrev {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "top" => Abbrev::Top,
            "not" => Abbrev::Not,
            "or" => Abbrev::Or,
            "and" => Abbrev::And,
            "iff" => Abbrev::Iff,
            "eps" => Abbrev::Eps,
            "dia" => Abbrev::PathDiamond,
            "box" => Abbrev::Box,
            _ => {
                if let Some(c) = s.strip_prefix("box_eq:") {
                    Abbrev::BoxEq(super::ast::sym(c))
                } else if let Some(c) = s.strip_prefix("box_neq:") {
                    Abbrev::BoxNeq(super::ast::sym(c))
                } else {
                    return Err(SyntaxError::UnknownAbbreviation(s.to_string()));
                }
            }
        })
    }
}

impl fmt::Display for Abbrev {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Abbrev::Top => f.write_str("top"),
            Abbrev::Not => f.write_str("not"),
            Abbrev::Or => f.write_str("or"),
            Abbrev::And => f.write_str("and"),
            Abbrev::Iff => f.write_str("iff"),
            Abbrev::Eps => f.write_str("eps"),
            Abbrev::PathDiamond => f.write_str("dia"),
            Abbrev::Box => f.write_str("box"),
            Abbrev::BoxEq(c) => write!(f, "box_eq:{c}"),
            Abbrev::BoxNeq(c) => write!(f, "box_neq:{c}"),
        }
    }
}

fn arity(name: &Abbrev) -> usize {
    match name {
        Abbrev::Top | Abbrev::Eps => 0,
        Abbrev::Not => 1,
        Abbrev::Or | Abbrev::And | Abbrev::Iff | Abbrev::PathDiamond | Abbrev::Box => 2,
        Abbrev::BoxEq(_) | Abbrev::BoxNeq(_) => 2,
    }
}

fn node(e: &Expr, name: &Abbrev) -> Result<NodeExpr, SyntaxError> {
    match e {
        Expr::Node(n) => Ok(n.clone()),
        Expr::Path(_) => Err(SyntaxError::AbbreviationArgs(name.to_string())),
    }
}

fn path(e: &Expr, name: &Abbrev) -> Result<PathExpr, SyntaxError> {
    match e {
        Expr::Path(p) => Ok(p.clone()),
        Expr::Node(_) => Err(SyntaxError::AbbreviationArgs(name.to_string())),
    }
}

/// Unfolds one abbreviation into primitive syntax.
pub fn expand_abbrev(name: &Abbrev, args: &[Expr]) -> Result<Expr, SyntaxError> {
    if args.len() != arity(name) {
        return Err(SyntaxError::AbbreviationArgs(name.to_string()));
    }
    Ok(match name {
        Abbrev::Top => Expr::Node(NodeExpr::top()),
        Abbrev::Eps => Expr::Path(PathExpr::eps()),
        Abbrev::Not => Expr::Node(NodeExpr::not(node(&args[0], name)?)),
        Abbrev::Or => Expr::Node(NodeExpr::or(node(&args[0], name)?, node(&args[1], name)?)),
        Abbrev::And => Expr::Node(NodeExpr::and(node(&args[0], name)?, node(&args[1], name)?)),
        Abbrev::Iff => Expr::Node(NodeExpr::iff(node(&args[0], name)?, node(&args[1], name)?)),
        Abbrev::PathDiamond => Expr::Node(path(&args[0], name)?.diamond(node(&args[1], name)?)),
        Abbrev::Box => Expr::Node(NodeExpr::boxed(&path(&args[0], name)?, node(&args[1], name)?)),
        Abbrev::BoxEq(c) => Expr::Node(NodeExpr::box_compare(
            path(&args[0], name)?,
            CmpKind::Eq,
            c,
            path(&args[1], name)?,
        )),
        Abbrev::BoxNeq(c) => Expr::Node(NodeExpr::box_compare(
            path(&args[0], name)?,
            CmpKind::Neq,
            c,
            path(&args[1], name)?,
        )),
    })
}
