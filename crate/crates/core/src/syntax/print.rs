use std::collections::BTreeSet;
use std::fmt::Write;

use super::ast::{CmpKind, NodeExpr, PathExpr, Sym};
use crate::kernel::Sequent;

/// Output alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Style {
    #[default]
    Ascii,
    Unicode,
}

struct Printer {
    style: Style,
    bare_nominals: BTreeSet<Sym>,
}

const LVL_IMP: u8 = 1;
const LVL_OR: u8 = 2;
const LVL_AND: u8 = 3;
const LVL_UNARY: u8 = 4;

fn positional_nominals(e: &NodeExpr, out: &mut BTreeSet<Sym>) {
    match e {
        NodeExpr::Prop(_) | NodeExpr::Nominal(_) | NodeExpr::Bottom => {}
        NodeExpr::Implies(a, b) => {
            positional_nominals(a, out);
            positional_nominals(b, out);
        }
        NodeExpr::At(i, phi) => {
            out.insert(i.clone());
            positional_nominals(phi, out);
        }
        NodeExpr::Diamond(_, phi) => positional_nominals(phi, out),
        NodeExpr::Compare(a, _, _, b) => {
            path_nominals(a, out);
            path_nominals(b, out);
        }
    }
}

fn path_nominals(p: &PathExpr, out: &mut BTreeSet<Sym>) {
    match p {
        PathExpr::Atom(_) => {}
        PathExpr::Jump(i) => {
            out.insert(i.clone());
        }
        PathExpr::Test(phi) => positional_nominals(phi, out),
        PathExpr::Concat(a, b) => {
            path_nominals(a, out);
            path_nominals(b, out);
        }
    }
}

impl Printer {
    fn sym(&self, ascii: &'static str, uni: &'static str) -> &'static str {
        match self.style {
            Style::Ascii => ascii,
            Style::Unicode => uni,
        }
    }

    fn level(&self, e: &NodeExpr) -> u8 {
        if e.is_top() || e.as_not().is_some() {
            return LVL_UNARY;
        }
        if e.as_and().is_some() {
            return LVL_AND;
        }
        match e {
            NodeExpr::Implies(..) => LVL_IMP,
            _ => LVL_UNARY,
        }
    }

    fn node_at(&self, e: &NodeExpr, min: u8, out: &mut String) {
        if self.level(e) < min {
            out.push('(');
            self.node(e, out);
            out.push(')');
        } else {
            self.node(e, out);
        }
    }

    fn node(&self, e: &NodeExpr, out: &mut String) {
        if e.is_top() {
            out.push_str(self.sym("true", "⊤"));
            return;
        }
        if let Some(inner) = e.as_not() {
            out.push_str(self.sym("~", "¬"));
            self.node_at(inner, LVL_UNARY, out);
            return;
        }
        if let Some((a, b)) = e.as_and() {
            self.node_at(a, LVL_AND, out);
            out.push_str(self.sym(" & ", " ∧ "));
            self.node_at(b, LVL_UNARY, out);
            return;
        }
        match e {
            NodeExpr::Prop(p) => out.push_str(p),
            NodeExpr::Nominal(i) => {
                if !self.bare_nominals.contains(i) && !i.starts_with('_') {
                    out.push('#');
                }
                out.push_str(i);
            }
            NodeExpr::Bottom => out.push_str(self.sym("false", "⊥")),
            NodeExpr::Implies(a, b) => {
                self.node_at(a, LVL_OR, out);
                out.push_str(self.sym(" -> ", " → "));
                self.node_at(b, LVL_IMP, out);
            }
            NodeExpr::At(i, phi) => {
                let _ = write!(out, "@{i} ");
                self.node_at(phi, LVL_UNARY, out);
            }
            NodeExpr::Diamond(a, phi) => {
                let _ = write!(out, "{}{a}{}", self.sym("<", "⟨"), self.sym(">", "⟩"));
                self.node_at(phi, LVL_UNARY, out);
            }
            NodeExpr::Compare(a, kind, c, b) => {
                out.push_str(self.sym("<", "⟨"));
                self.path(a, out);
                let op = match kind {
                    CmpKind::Eq => "=",
                    CmpKind::Neq => self.sym("!=", "≠"),
                };
                let _ = write!(out, " {op}{c} ");
                self.path(b, out);
                out.push_str(self.sym(">", "⟩"));
            }
        }
    }

    fn path(&self, p: &PathExpr, out: &mut String) {
        match p {
            PathExpr::Concat(a, b) => {
                self.step(a, out);
                out.push(' ');
                self.path(b, out);
            }
            _ => self.step(p, out),
        }
    }

    fn step(&self, p: &PathExpr, out: &mut String) {
        match p {
            PathExpr::Atom(a) => out.push_str(a),
            PathExpr::Jump(i) => {
                let _ = write!(out, "{i}:");
            }
            PathExpr::Test(phi) if phi.is_top() => out.push_str(self.sym("eps", "ε")),
            PathExpr::Test(phi) => {
                out.push('(');
                self.node(phi, out);
                out.push_str("?)");
            }
            PathExpr::Concat(..) => {
                out.push('(');
                self.path(p, out);
                out.push(')');
            }
        }
    }
}

fn printer_for<'a>(style: Style, exprs: impl IntoIterator<Item = &'a NodeExpr>) -> Printer {
    let mut bare = BTreeSet::new();
    for e in exprs {
        positional_nominals(e, &mut bare);
    }
    Printer { style, bare_nominals: bare }
}

/// Prints a node expression in the ASCII surface syntax.
pub fn print_node(e: &NodeExpr) -> String {
    print_node_styled(e, Style::Ascii)
}

pub fn print_node_styled(e: &NodeExpr, style: Style) -> String {
    let p = printer_for(style, [e]);
    let mut out = String::new();
    p.node(e, &mut out);
    out
}

pub fn print_path(e: &PathExpr) -> String {
    let mut bare = BTreeSet::new();
    path_nominals(e, &mut bare);
    let p = Printer { style: Style::Ascii, bare_nominals: bare };
    let mut out = String::new();
    p.path(e, &mut out);
    out
}

pub fn print_sequent(s: &Sequent) -> String {
    print_sequent_styled(s, Style::Ascii)
}

pub fn print_sequent_styled(s: &Sequent, style: Style) -> String {
    let p = printer_for(style, s.ante().iter().chain(s.succ().iter()));
    let side = |xs: &BTreeSet<NodeExpr>| {
        xs.iter()
            .map(|e| {
                let mut out = String::new();
                p.node(e, &mut out);
                out
            })
            .collect::<Vec<_>>()
            .join(", ")
    };
    let l = side(s.ante());
    let r = side(s.succ());
    let t = p.sym("|-", "⊢");
    match (l.is_empty(), r.is_empty()) {
        (true, true) => t.to_string(),
        (true, false) => format!("{t} {r}"),
        (false, true) => format!("{l} {t}"),
        (false, false) => format!("{l} {t} {r}"),
    }
}
