//! Surface syntax.
//!
//! ```text
//! sequent := [list] "|-" [list]          list := node ("," node)*
//! node    := imp ["<->" node]
//! imp     := or ["->" imp]
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | "@" ID unary
//!          | "<" path ">" unary | "[" path "]" unary
//!          | "<" path CMP path ">" | "[" path CMP path "]"
//!          | atom
//! atom    := "true" | "false" | "#" ID | ID | "(" node ")"
//! CMP     := "=" ID | "!=" ID
//! path    := step+                        (right-nested)
//! step    := "eps" | ID ":" | ID "?" | "#" ID "?" | ID
//!          | "(" node "?" ")" | "(" node ")" "?" | "(" path ")"
//! ```
//!
//! A bare identifier in node position is a nominal when it also occurs after
//! `@`, before `:`, after `#`, starts with `_`, or is already a nominal in the
//! symbol table; otherwise it is a proposition. Unicode forms `⊢ → ↔ ¬ ∧ ∨ ⊥ ⊤
//! ⟨ ⟩ ≠ ε` are accepted as alternatives.

use std::collections::BTreeSet;

use super::ast::{sym, CmpKind, NodeExpr, PathExpr, Sym, SymKind};
use super::symbols::SymbolTable;
use super::SyntaxError;
use crate::kernel::Sequent;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Eps,
    At,
    LAngle,
    RAngle,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Quest,
    Colon,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    Eq,
    Neq,
    Hash,
    Comma,
    Turnstile,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::True => "'true'".into(),
            Tok::False => "'false'".into(),
            Tok::Eps => "'eps'".into(),
            Tok::At => "'@'".into(),
            Tok::LAngle => "'<'".into(),
            Tok::RAngle => "'>'".into(),
            Tok::LBrack => "'['".into(),
            Tok::RBrack => "']'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Quest => "'?'".into(),
            Tok::Colon => "':'".into(),
            Tok::Tilde => "'~'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Bar => "'|'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::DArrow => "'<->'".into(),
            Tok::Eq => "'='".into(),
            Tok::Neq => "'!='".into(),
            Tok::Hash => "'#'".into(),
            Tok::Comma => "','".into(),
            Tok::Turnstile => "'|-'".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let next = chars.get(i + 1).map(|(_, c)| *c);
        let next2 = chars.get(i + 2).map(|(_, c)| *c);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j].1) {
                j += 1;
            }
            let end = chars.get(j).map(|(p, _)| *p).unwrap_or(text.len());
            let word = &text[pos..end];
            let tok = match word {
                "true" => Tok::True,
                "false" => Tok::False,
                "eps" => Tok::Eps,
                _ => Tok::Ident(word.to_string()),
            };
            out.push((tok, pos));
            i = j;
            continue;
        }
        let (tok, width) = match c {
            '<' if next == Some('-') && next2 == Some('>') => (Tok::DArrow, 3),
            '<' => (Tok::LAngle, 1),
            '>' => (Tok::RAngle, 1),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '|' if next == Some('-') => (Tok::Turnstile, 2),
            '|' => (Tok::Bar, 1),
            '!' if next == Some('=') => (Tok::Neq, 2),
            '=' => (Tok::Eq, 1),
            '@' => (Tok::At, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '?' => (Tok::Quest, 1),
            ':' => (Tok::Colon, 1),
            '~' | '¬' => (Tok::Tilde, 1),
            '&' | '∧' => (Tok::Amp, 1),
            '∨' => (Tok::Bar, 1),
            '→' => (Tok::Arrow, 1),
            '↔' => (Tok::DArrow, 1),
            '⊢' => (Tok::Turnstile, 1),
            '⟨' => (Tok::LAngle, 1),
            '⟩' => (Tok::RAngle, 1),
            '≠' => (Tok::Neq, 1),
            '⊥' => (Tok::False, 1),
            '⊤' => (Tok::True, 1),
            'ε' => (Tok::Eps, 1),
            '#' => (Tok::Hash, 1),
            ',' => (Tok::Comma, 1),
            other => return Err(SyntaxError::UnexpectedChar { pos, ch: other }),
        };
        out.push((tok, pos));
        i += width;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    nominals: BTreeSet<String>,
    table: &'a SymbolTable,
}

impl<'a> Parser<'a> {
    fn new(text: &str, table: &'a SymbolTable) -> Result<Self, SyntaxError> {
        let toks = lex(text)?;
        let mut nominals = BTreeSet::new();
        for w in 0..toks.len() {
            if let Tok::Ident(name) = &toks[w].0 {
                let before = w.checked_sub(1).map(|p| &toks[p].0);
                let after = toks.get(w + 1).map(|t| &t.0);
                if matches!(before, Some(Tok::At) | Some(Tok::Hash)) || after == Some(&Tok::Colon) {
                    nominals.insert(name.clone());
                }
            }
        }
        Ok(Parser { toks, pos: 0, end: text.len(), nominals, table })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn unexpected(&self, expected: &str) -> SyntaxError {
        match self.peek() {
            Some(t) => SyntaxError::Unexpected {
                pos: self.offset(),
                found: t.describe(),
                expected: expected.to_string(),
            },
            None => SyntaxError::UnexpectedEnd { pos: self.end, expected: expected.to_string() },
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), SyntaxError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn is_nominal_name(&self, name: &str) -> bool {
        name.starts_with('_')
            || self.nominals.contains(name)
            || self.table.kind_of(name) == Some(SymKind::Nominal)
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        if self.pos < self.toks.len() {
            Err(self.unexpected("end of input"))
        } else {
            Ok(())
        }
    }

    fn node(&mut self) -> Result<NodeExpr, SyntaxError> {
        let lhs = self.imp()?;
        if self.eat(&Tok::DArrow) {
            let rhs = self.node()?;
            return Ok(NodeExpr::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<NodeExpr, SyntaxError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.imp()?;
            return Ok(NodeExpr::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<NodeExpr, SyntaxError> {
        let mut acc = self.and()?;
        while self.eat(&Tok::Bar) {
            let rhs = self.and()?;
            acc = NodeExpr::or(acc, rhs);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<NodeExpr, SyntaxError> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unary()?;
            acc = NodeExpr::and(acc, rhs);
        }
        Ok(acc)
    }

    fn cmp_op(&mut self) -> Result<Option<(CmpKind, Sym)>, SyntaxError> {
        let kind = match self.peek() {
            Some(Tok::Eq) => CmpKind::Eq,
            Some(Tok::Neq) => CmpKind::Neq,
            _ => return Ok(None),
        };
        self.pos += 1;
        let c = self.ident()?;
        Ok(Some((kind, sym(c))))
    }

    fn unary(&mut self) -> Result<NodeExpr, SyntaxError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(NodeExpr::not(self.unary()?))
            }
            Some(Tok::At) => {
                self.pos += 1;
                let i = self.ident()?;
                let body = self.unary()?;
                Ok(NodeExpr::at(i, body))
            }
            Some(Tok::LAngle) => {
                self.pos += 1;
                let alpha = self.path()?;
                if let Some((kind, c)) = self.cmp_op()? {
                    let beta = self.path()?;
                    self.expect(&Tok::RAngle)?;
                    return Ok(NodeExpr::Compare(alpha.into(), kind, c, beta.into()));
                }
                self.expect(&Tok::RAngle)?;
                let body = self.unary()?;
                Ok(alpha.diamond(body))
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let alpha = self.path()?;
                if let Some((kind, c)) = self.cmp_op()? {
                    let beta = self.path()?;
                    self.expect(&Tok::RBrack)?;
                    return Ok(NodeExpr::not(NodeExpr::Compare(
                        alpha.into(),
                        kind.flip(),
                        c,
                        beta.into(),
                    )));
                }
                self.expect(&Tok::RBrack)?;
                let body = self.unary()?;
                Ok(NodeExpr::boxed(&alpha, body))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<NodeExpr, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.pos += 1;
                Ok(NodeExpr::top())
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(NodeExpr::Bottom)
            }
            Some(Tok::Hash) => {
                self.pos += 1;
                Ok(NodeExpr::nom(self.ident()?))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.is_nominal_name(&name) {
                    Ok(NodeExpr::nom(name))
                } else {
                    Ok(NodeExpr::prop(name))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.node()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected("node expression")),
        }
    }

    fn path_ends(&self) -> bool {
        matches!(
            self.peek(),
            None | Some(Tok::RAngle) | Some(Tok::RBrack) | Some(Tok::RParen) | Some(Tok::Eq) | Some(Tok::Neq)
        )
    }

    fn path(&mut self) -> Result<PathExpr, SyntaxError> {
        let mut steps = vec![self.step()?];
        while !self.path_ends() {
            steps.push(self.step()?);
        }
        Ok(PathExpr::seq(steps))
    }

    fn step(&mut self) -> Result<PathExpr, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::Eps) => {
                self.pos += 1;
                Ok(PathExpr::eps())
            }
            Some(Tok::Hash) => {
                self.pos += 1;
                let i = self.ident()?;
                self.expect(&Tok::Quest)?;
                Ok(PathExpr::test(NodeExpr::nom(i)))
            }
            Some(Tok::Ident(name)) => {
                if self.peek_at(1) == Some(&Tok::Colon) {
                    self.pos += 2;
                    Ok(PathExpr::jump(name))
                } else if self.peek_at(1) == Some(&Tok::Quest) {
                    let phi = self.atom()?;
                    self.pos += 1;
                    Ok(PathExpr::test(phi))
                } else {
                    self.pos += 1;
                    Ok(PathExpr::atom(name))
                }
            }
            Some(Tok::LParen) => {
                let save = self.pos;
                self.pos += 1;
                if let Ok(phi) = self.node() {
                    if self.eat(&Tok::Quest) {
                        self.expect(&Tok::RParen)?;
                        return Ok(PathExpr::test(phi));
                    }
                    if self.peek() == Some(&Tok::RParen) && self.peek_at(1) == Some(&Tok::Quest) {
                        self.pos += 2;
                        return Ok(PathExpr::test(phi));
                    }
                }
                self.pos = save + 1;
                let p = self.path()?;
                self.expect(&Tok::RParen)?;
                Ok(p)
            }
            _ => Err(self.unexpected("path step")),
        }
    }
}

fn check_spaces(table: &mut SymbolTable, exprs: &[&NodeExpr]) -> Result<(), SyntaxError> {
    for e in exprs {
        table.register_node(e)?;
    }
    Ok(())
}

/// Parses a node expression with a fresh symbol table.
pub fn parse_node(text: &str) -> Result<NodeExpr, SyntaxError> {
    parse_node_with(text, &mut SymbolTable::new())
}

/// Parses a node expression, recording its symbols in `table`.
pub fn parse_node_with(text: &str, table: &mut SymbolTable) -> Result<NodeExpr, SyntaxError> {
    let mut p = Parser::new(text, table)?;
    let e = p.node()?;
    p.finish()?;
    check_spaces(table, &[&e])?;
    Ok(e)
}

/// Parses a path expression.
pub fn parse_path(text: &str) -> Result<PathExpr, SyntaxError> {
    let mut table = SymbolTable::new();
    let mut p = Parser::new(text, &table)?;
    let e = p.path()?;
    p.finish()?;
    table.register_path(&e)?;
    Ok(e)
}

/// Parses `Γ |- Δ`; every member must be `@i φ` or `<i: =c j:>`.
pub fn parse_sequent(text: &str) -> Result<Sequent, SyntaxError> {
    parse_sequent_with(text, &mut SymbolTable::new())
}

pub fn parse_sequent_with(text: &str, table: &mut SymbolTable) -> Result<Sequent, SyntaxError> {
    let mut p = Parser::new(text, table)?;
    let mut ante = Vec::new();
    let mut succ = Vec::new();
    if p.peek() != Some(&Tok::Turnstile) {
        ante.push(p.node()?);
        while p.eat(&Tok::Comma) {
            ante.push(p.node()?);
        }
    }
    p.expect(&Tok::Turnstile)?;
    if p.peek().is_some() {
        succ.push(p.node()?);
        while p.eat(&Tok::Comma) {
            succ.push(p.node()?);
        }
    }
    p.finish()?;
    let all: Vec<&NodeExpr> = ante.iter().chain(succ.iter()).collect();
    check_spaces(table, &all)?;
    Sequent::new(ante, succ).map_err(|e| SyntaxError::Shape(e.to_string()))
}
