//! Derived rules as macros expanding into primitive derivations.
//!
//! Every macro returns a [`Step::Derived`] node whose premisses are open
//! leaves; callers close them with [`Derivation::plug`].

mod basic;
mod golden;
mod inverse;
mod paths;

use crate::kernel::{apply_rule, Derivation, Inference, KernelError, Sequent, Side, Step};
use crate::syntax::{CmpKind, FreshSupply, NodeExpr, PathExpr, Sym};

pub use basic::{and_l, and_r, axg, cmp_b, iff_r, inv_and_l, top_l};
pub use golden::{
    paste, paste_assumption, paste_closed, paste_conclusion, reflexivity, symmetry, transitivity, PasteInstance,
};
pub use inverse::{inverse_fragments, invert};
pub use paths::{gen_cmp_r, general_dia, prove_at, prove_path};

/// A derived rule with its instantiation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Macro {
    AxG { formula: NodeExpr },
    TopL { i: Sym },
    AndL { i: Sym, lhs: NodeExpr, rhs: NodeExpr },
    AndR { i: Sym, lhs: NodeExpr, rhs: NodeExpr },
    IffR { i: Sym, lhs: NodeExpr, rhs: NodeExpr },
    InvAndL { i: Sym, lhs: NodeExpr, rhs: NodeExpr },
    CmpB { i: Sym, kind: CmpKind, c: Sym, j: Sym },
    GenDia { side: Side, i: Sym, path: PathExpr, body: NodeExpr, witnesses: Vec<Sym> },
    GenCmpR { i: Sym, alpha: PathExpr, kind: CmpKind, c: Sym, beta: PathExpr, j: Sym, k: Sym },
}

impl Macro {
    pub fn name(&self) -> &'static str {
        match self {
            Macro::AxG { .. } => "AxG",
            Macro::TopL { .. } => "TopL",
            Macro::AndL { .. } => "AndL",
            Macro::AndR { .. } => "AndR",
            Macro::IffR { .. } => "IffR",
            Macro::InvAndL { .. } => "InvAndL",
            Macro::CmpB { .. } => "CmpB",
            Macro::GenDia { side: Side::Left, .. } => "GenDiaL",
            Macro::GenDia { side: Side::Right, .. } => "GenDiaR",
            Macro::GenCmpR { .. } => "GenCmpR",
        }
    }
}

/// Expands `m` at `goal` into a derived node with open premisses.
pub fn expand_macro(m: &Macro, goal: &Sequent) -> Result<Derivation, KernelError> {
    match m {
        Macro::AxG { formula } => axg(goal, formula),
        Macro::TopL { i } => top_l(goal, i),
        Macro::AndL { i, lhs, rhs } => and_l(goal, i, lhs, rhs),
        Macro::AndR { i, lhs, rhs } => and_r(goal, i, lhs, rhs),
        Macro::IffR { i, lhs, rhs } => iff_r(goal, i, lhs, rhs),
        Macro::InvAndL { i, lhs, rhs } => inv_and_l(goal, i, lhs, rhs),
        Macro::CmpB { i, kind, c, j } => cmp_b(goal, i, *kind, c, j),
        Macro::GenDia { side, i, path, body, witnesses } => general_dia(goal, *side, i, path, body, witnesses),
        Macro::GenCmpR { i, alpha, kind, c, beta, j, k } => gen_cmp_r(goal, i, alpha, *kind, c, beta, j, k),
    }
}

pub(crate) fn at(i: &Sym, phi: NodeExpr) -> NodeExpr {
    NodeExpr::at_sym(i, phi)
}

pub(crate) fn nom(i: &Sym) -> NodeExpr {
    NodeExpr::Nominal(i.clone())
}

pub(crate) fn fresh_for(goal: &Sequent) -> FreshSupply {
    FreshSupply::avoiding(goal.nominals())
}

/// Canonical premisses of `inf` at `goal`, with the consumed principal kept
/// when `ctx` holds it on the same side.
pub(crate) fn apply_in(goal: &Sequent, inf: &Inference, ctx: &Sequent) -> Result<Vec<Sequent>, KernelError> {
    let mut ps = apply_rule(goal, inf)?;
    if let Some((side, e)) = inf.consumed() {
        if ctx.contains(side, &e) {
            for p in &mut ps {
                *p = p.with_unchecked(side, e.clone());
            }
        }
    }
    Ok(ps)
}

pub(crate) fn node(goal: &Sequent, inf: Inference, kids: Vec<Derivation>) -> Result<Derivation, KernelError> {
    Derivation::rule(goal.clone(), inf, kids)
}

/// An open leaf for `premiss` weakened up to `target`.
pub(crate) fn open_to(premiss: &Sequent, target: &Sequent) -> Result<Derivation, KernelError> {
    Derivation::open(premiss.clone()).weaken_to(target)
}

pub(crate) fn macro_err(name: &str, reason: impl Into<String>) -> KernelError {
    KernelError::Macro { name: name.to_string(), reason: reason.into() }
}

pub(crate) fn expect_conclusion(name: &str, d: &Derivation, goal: &Sequent) -> Result<(), KernelError> {
    if &d.conclusion == goal {
        Ok(())
    } else {
        Err(macro_err(name, format!("built {} instead of {}", d.conclusion, goal)))
    }
}

/// Wraps a fragment proving `goal` as a derived node with open premisses.
pub(crate) fn wrap(name: &str, goal: &Sequent, expansion: Derivation) -> Result<Derivation, KernelError> {
    expect_conclusion(name, &expansion, goal)?;
    Ok(Derivation::derived_open(name, expansion))
}

/// True for derived nodes with the given name.
pub fn is_macro(d: &Derivation, name: &str) -> bool {
    matches!(&d.step, Step::Derived { name: n, .. } if n == name)
}
