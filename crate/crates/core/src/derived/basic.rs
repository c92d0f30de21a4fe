use std::cell::RefCell;
use std::collections::HashMap;

use super::{apply_in, at, fresh_for, macro_err, node, open_to, wrap};
use crate::kernel::{Derivation, Inference, KernelError, Sequent, Side};
use crate::syntax::{CmpKind, FreshSupply, NodeExpr, Sym};

thread_local! {
    static AXG_CACHE: RefCell<HashMap<NodeExpr, Derivation>> = RefCell::new(HashMap::new());
}

fn one(goal: &Sequent, inf: Inference) -> Result<Sequent, KernelError> {
    let ps = apply_in(goal, &inf, &Sequent::default())?;
    Ok(ps.into_iter().next().expect("single-premiss rule"))
}

fn is_ax_shape(phi: &NodeExpr) -> bool {
    match phi {
        NodeExpr::At(_, b) => matches!(**b, NodeExpr::Prop(_) | NodeExpr::Nominal(_)),
        _ => matches!(phi.as_cmp_atom(), Some((_, CmpKind::Eq, _, _))),
    }
}

/// Closed proof of a goal holding `phi` on both sides, by recursion on `phi`.
fn axg_core(goal: &Sequent, phi: &NodeExpr, fresh: &mut FreshSupply) -> Result<Derivation, KernelError> {
    if is_ax_shape(phi) {
        return node(goal, Inference::Ax { formula: phi.clone() }, vec![]);
    }
    if let Some((i, CmpKind::Neq, c, j)) = phi.as_cmp_atom() {
        let (i, c, j) = (i.clone(), c.clone(), j.clone());
        let eq = NodeExpr::cmp_atom(&i, CmpKind::Eq, &c, &j);
        let r = Inference::NEqR { i: i.clone(), j: j.clone(), c: c.clone() };
        let g1 = one(goal, r.clone())?;
        let l = Inference::NEqL { i, j, c };
        let g2 = one(&g1, l.clone())?;
        let ax = node(&g2, Inference::Ax { formula: eq }, vec![])?;
        return node(goal, r, vec![node(&g1, l, vec![ax])?]);
    }
    let Some((i, body)) = phi.as_at() else {
        return Err(macro_err("AxG", "not a restricted expression"));
    };
    let i = i.clone();
    match body {
        NodeExpr::Bottom => node(goal, Inference::Bot { i }, vec![]),
        NodeExpr::Implies(a, b) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            let r = Inference::ImpR { i: i.clone(), lhs: a.clone(), rhs: b.clone() };
            let g1 = one(goal, r.clone())?;
            let l = Inference::ImpL { i: i.clone(), lhs: a.clone(), rhs: b.clone() };
            let ps = apply_in(&g1, &l, &Sequent::default())?;
            let k1 = axg_core(&ps[0], &at(&i, a), fresh)?;
            let k2 = axg_core(&ps[1], &at(&i, b), fresh)?;
            node(goal, r, vec![node(&g1, l, vec![k1, k2])?])
        }
        NodeExpr::At(j, b) => {
            let (j, b) = (j.clone(), (**b).clone());
            let l = Inference::AtL { j: i.clone(), i: j.clone(), body: b.clone() };
            let g1 = one(goal, l.clone())?;
            let r = Inference::AtR { j: i, i: j.clone(), body: b.clone() };
            let g2 = one(&g1, r.clone())?;
            let k = axg_core(&g2, &at(&j, b), fresh)?;
            node(goal, l, vec![node(&g1, r, vec![k])?])
        }
        NodeExpr::Diamond(a, b) => {
            let (a, b) = (a.clone(), (**b).clone());
            let k = fresh.fresh();
            let l = Inference::DiaL { i: i.clone(), a: a.clone(), body: b.clone(), j: k.clone() };
            let g1 = one(goal, l.clone())?;
            let r = Inference::DiaR { i, a, body: b.clone(), j: k.clone() };
            let g2 = one(&g1, r.clone())?;
            let sub = axg_core(&g2, &at(&k, b), fresh)?;
            node(goal, l, vec![node(&g1, r, vec![sub])?])
        }
        NodeExpr::Compare(alpha, kind, c, beta) => {
            let (j, k) = (fresh.fresh(), fresh.fresh());
            let l = Inference::CmpL {
                i: i.clone(),
                alpha: (**alpha).clone(),
                kind: *kind,
                c: c.clone(),
                beta: (**beta).clone(),
                j: j.clone(),
                k: k.clone(),
            };
            let g1 = one(goal, l.clone())?;
            let r = Inference::CmpR {
                i,
                alpha: (**alpha).clone(),
                kind: *kind,
                c: c.clone(),
                beta: (**beta).clone(),
                j: j.clone(),
                k: k.clone(),
            };
            let g2 = one(&g1, r.clone())?;
            let sub = axg_core(&g2, &NodeExpr::cmp_atom(&j, *kind, c, &k), fresh)?;
            node(goal, l, vec![node(&g1, r, vec![sub])?])
        }
        NodeExpr::Prop(_) | NodeExpr::Nominal(_) => unreachable!("handled as an axiom"),
    }
}

fn axg_minimal(phi: &NodeExpr) -> Result<Derivation, KernelError> {
    if let Some(d) = AXG_CACHE.with(|c| c.borrow().get(phi).cloned()) {
        return Ok(d);
    }
    let goal = Sequent::new([phi.clone()], [phi.clone()])?;
    let d = axg_core(&goal, phi, &mut fresh_for(&goal))?;
    AXG_CACHE.with(|c| c.borrow_mut().insert(phi.clone(), d.clone()));
    Ok(d)
}

/// `@_iφ, Γ ⊢ Δ, @_iφ` for arbitrary `φ` (and atomic comparisons).
pub fn axg(goal: &Sequent, phi: &NodeExpr) -> Result<Derivation, KernelError> {
    if !goal.contains(Side::Left, phi) || !goal.contains(Side::Right, phi) {
        return Err(macro_err("AxG", "expression not on both sides"));
    }
    if is_ax_shape(phi) {
        return node(goal, Inference::Ax { formula: phi.clone() }, vec![]);
    }
    if let Some((i, NodeExpr::Bottom)) = phi.as_at() {
        return node(goal, Inference::Bot { i: i.clone() }, vec![]);
    }
    let minimal = axg_minimal(phi)?;
    let own = phi.nominals();
    let clash = minimal.all_nominals().iter().any(|n| !own.contains(n) && goal.nominals().contains(n));
    let core = if clash {
        let base = Sequent::new([phi.clone()], [phi.clone()])?;
        axg_core(&base, phi, &mut fresh_for(goal))?
    } else {
        minimal
    };
    wrap("AxG", goal, core.weaken_to(goal)?)
}

/// `⊤L`: from `@_i⊤, Γ ⊢ Δ` infer `Γ ⊢ Δ`.
pub fn top_l(goal: &Sequent, i: &Sym) -> Result<Derivation, KernelError> {
    let top = at(i, NodeExpr::top());
    let premiss = goal.with(Side::Left, top.clone())?;
    let lgoal = goal.with(Side::Right, top.clone())?;
    let r = Inference::ImpR { i: i.clone(), lhs: NodeExpr::Bottom, rhs: NodeExpr::Bottom };
    let g1 = one(&lgoal, r.clone())?;
    let left = node(&lgoal, r, vec![node(&g1, Inference::Bot { i: i.clone() }, vec![])?])?;
    let d = Derivation::cut(left, Derivation::open(premiss), &top)?;
    wrap("TopL", goal, d)
}

/// `∧L`: from `@_iφ, @_iψ, Γ ⊢ Δ` infer `@_i(φ∧ψ), Γ ⊢ Δ`.
pub fn and_l(goal: &Sequent, i: &Sym, phi: &NodeExpr, psi: &NodeExpr) -> Result<Derivation, KernelError> {
    let conj = at(i, NodeExpr::and(phi.clone(), psi.clone()));
    if !goal.contains(Side::Left, &conj) {
        return Err(macro_err("AndL", "conjunction not in the antecedent"));
    }
    let premiss = goal
        .without(Side::Left, &conj)
        .with(Side::Left, at(i, phi.clone()))?
        .with(Side::Left, at(i, psi.clone()))?;
    let not_psi = NodeExpr::not(psi.clone());
    let l = Inference::ImpL { i: i.clone(), lhs: NodeExpr::implies(phi.clone(), not_psi.clone()), rhs: NodeExpr::Bottom };
    let ps = apply_in(goal, &l, &premiss)?;
    let r1 = Inference::ImpR { i: i.clone(), lhs: phi.clone(), rhs: not_psi };
    let g1 = apply_in(&ps[0], &r1, &premiss)?.remove(0);
    let r2 = Inference::ImpR { i: i.clone(), lhs: psi.clone(), rhs: NodeExpr::Bottom };
    let g2 = apply_in(&g1, &r2, &premiss)?.remove(0);
    let leaf = open_to(&premiss, &g2)?;
    let k1 = node(&ps[0], r1, vec![node(&g1, r2, vec![leaf])?])?;
    let k2 = node(&ps[1], Inference::Bot { i: i.clone() }, vec![])?;
    wrap("AndL", goal, node(goal, l, vec![k1, k2])?)
}

/// `∧R`: from `Γ ⊢ Δ, @_iφ` and `Γ ⊢ Δ, @_iψ` infer `Γ ⊢ Δ, @_i(φ∧ψ)`.
pub fn and_r(goal: &Sequent, i: &Sym, phi: &NodeExpr, psi: &NodeExpr) -> Result<Derivation, KernelError> {
    let conj = at(i, NodeExpr::and(phi.clone(), psi.clone()));
    if !goal.contains(Side::Right, &conj) {
        return Err(macro_err("AndR", "conjunction not in the succedent"));
    }
    let base = goal.without(Side::Right, &conj);
    let p1 = base.with(Side::Right, at(i, phi.clone()))?;
    let p2 = base.with(Side::Right, at(i, psi.clone()))?;
    let ctx = p1.union(&p2);
    let not_psi = NodeExpr::not(psi.clone());
    let imp = NodeExpr::implies(phi.clone(), not_psi.clone());
    let r = Inference::ImpR { i: i.clone(), lhs: imp, rhs: NodeExpr::Bottom };
    let g1 = apply_in(goal, &r, &ctx)?.remove(0);
    let l1 = Inference::ImpL { i: i.clone(), lhs: phi.clone(), rhs: not_psi };
    let ps1 = apply_in(&g1, &l1, &ctx)?;
    let leaf1 = open_to(&p1, &ps1[0])?;
    let l2 = Inference::ImpL { i: i.clone(), lhs: psi.clone(), rhs: NodeExpr::Bottom };
    let ps2 = apply_in(&ps1[1], &l2, &ctx)?;
    let leaf2 = open_to(&p2, &ps2[0])?;
    let bot = node(&ps2[1], Inference::Bot { i: i.clone() }, vec![])?;
    let inner = node(&ps1[1], l2, vec![leaf2, bot])?;
    let d = node(goal, r, vec![node(&g1, l1, vec![leaf1, inner])?])?;
    wrap("AndR", goal, d)
}

/// `↔R`: from `@_iφ, Γ ⊢ Δ, @_iψ` and `@_iψ, Γ ⊢ Δ, @_iφ` infer
/// `Γ ⊢ Δ, @_i(φ↔ψ)`.
pub fn iff_r(goal: &Sequent, i: &Sym, phi: &NodeExpr, psi: &NodeExpr) -> Result<Derivation, KernelError> {
    let iff = at(i, NodeExpr::iff(phi.clone(), psi.clone()));
    if !goal.contains(Side::Right, &iff) {
        return Err(macro_err("IffR", "biconditional not in the succedent"));
    }
    let base = goal.without(Side::Right, &iff);
    let p1 = base.with(Side::Left, at(i, phi.clone()))?.with(Side::Right, at(i, psi.clone()))?;
    let p2 = base.with(Side::Left, at(i, psi.clone()))?.with(Side::Right, at(i, phi.clone()))?;
    let fwd = NodeExpr::implies(phi.clone(), psi.clone());
    let bwd = NodeExpr::implies(psi.clone(), phi.clone());
    let conj = and_r(goal, i, &fwd, &bwd)?;
    let leaves: Vec<Sequent> = conj.open_leaves().into_iter().cloned().collect();
    let mut kids = Vec::new();
    for (leaf, (lhs, rhs, target)) in leaves.iter().zip([(phi, psi, &p1), (psi, phi, &p2)]) {
        let r = Inference::ImpR { i: i.clone(), lhs: lhs.clone(), rhs: rhs.clone() };
        let g = apply_in(leaf, &r, target)?.remove(0);
        kids.push(node(leaf, r, vec![open_to(target, &g)?])?);
    }
    wrap("IffR", goal, conj.plug(kids)?)
}

/// Inverse of `∧L`: from `@_i(φ∧ψ), Γ ⊢ Δ` infer `@_iφ, @_iψ, Γ ⊢ Δ`.
pub fn inv_and_l(goal: &Sequent, i: &Sym, phi: &NodeExpr, psi: &NodeExpr) -> Result<Derivation, KernelError> {
    let (a, b) = (at(i, phi.clone()), at(i, psi.clone()));
    if !goal.contains(Side::Left, &a) || !goal.contains(Side::Left, &b) {
        return Err(macro_err("InvAndL", "conjuncts not in the antecedent"));
    }
    let conj = at(i, NodeExpr::and(phi.clone(), psi.clone()));
    let premiss = goal.without(Side::Left, &a).without(Side::Left, &b).with(Side::Left, conj.clone())?;
    let lgoal = goal.with(Side::Right, conj.clone())?;
    let intro = and_r(&lgoal, i, phi, psi)?;
    let leaves: Vec<Sequent> = intro.open_leaves().into_iter().cloned().collect();
    let left = intro.plug(vec![axg(&leaves[0], &a)?, axg(&leaves[1], &b)?])?;
    let d = Derivation::cut(left, Derivation::open(premiss), &conj)?;
    wrap("InvAndL", goal, d)
}

/// `⟨▲⟩B`: from `⟨j:▲_c i:⟩, Γ ⊢ Δ` infer `⟨i:▲_c j:⟩, Γ ⊢ Δ`.
pub fn cmp_b(goal: &Sequent, i: &Sym, kind: CmpKind, c: &Sym, j: &Sym) -> Result<Derivation, KernelError> {
    let here = NodeExpr::cmp_atom(i, kind, c, j);
    let there = NodeExpr::cmp_atom(j, kind, c, i);
    if !goal.contains(Side::Left, &here) {
        return Err(macro_err("CmpB", "comparison not in the antecedent"));
    }
    let premiss = goal.without(Side::Left, &here).with(Side::Left, there.clone())?;
    if i == j {
        return wrap("CmpB", goal, Derivation::open(premiss));
    }
    let d = match kind {
        CmpKind::Eq => {
            let t = Inference::EqT { i: i.clone(), c: c.clone() };
            let g1 = one(goal, t.clone())?;
            let five = Inference::Eq5 { i: i.clone(), j: j.clone(), k: i.clone(), c: c.clone() };
            let g2 = one(&g1, five.clone())?;
            node(goal, t, vec![node(&g1, five, vec![open_to(&premiss, &g2)?])?])?
        }
        CmpKind::Neq => {
            let lgoal = goal.with(Side::Right, there.clone())?;
            let r = Inference::NEqR { i: j.clone(), j: i.clone(), c: c.clone() };
            let g1 = one(&lgoal, r.clone())?;
            let l = Inference::NEqL { i: i.clone(), j: j.clone(), c: c.clone() };
            let g2 = one(&g1, l.clone())?;
            let sym_eq = cmp_b(&g2, j, CmpKind::Eq, c, i)?;
            let g3 = sym_eq.open_leaves()[0].clone();
            let ax = node(&g3, Inference::Ax { formula: NodeExpr::cmp_atom(i, CmpKind::Eq, c, j) }, vec![])?;
            let left = node(&lgoal, r, vec![node(&g1, l, vec![sym_eq.plug(vec![ax])?])?])?;
            Derivation::cut(left, Derivation::open(premiss), &there)?
        }
    };
    wrap("CmpB", goal, d)
}
