use super::basic::{and_l, and_r, axg};
use super::{apply_in, at, fresh_for, macro_err, node, nom, open_to, wrap};
use crate::kernel::{path_to, Derivation, Inference, KernelError, Sequent, Side};
use crate::syntax::{CmpKind, NodeExpr, PathExpr, Sym};

fn single_leaf(d: &Derivation) -> Sequent {
    d.open_leaves().last().map(|s| (*s).clone()).expect("fragment has an open leaf")
}

/// Replaces the last open leaf of `d` by `sub`.
fn plug_last(d: Derivation, sub: Derivation) -> Result<Derivation, KernelError> {
    let leaves: Vec<Sequent> = d.open_leaves().into_iter().cloned().collect();
    let n = leaves.len();
    let mut subs: Vec<Derivation> = leaves.into_iter().take(n - 1).map(Derivation::open).collect();
    subs.push(sub);
    d.plug(subs)
}

fn dia_left(
    goal: &Sequent,
    i: &Sym,
    path: &PathExpr,
    body: &NodeExpr,
    names: &mut dyn FnMut() -> Sym,
) -> Result<(Derivation, Sym), KernelError> {
    match path {
        PathExpr::Atom(a) => {
            let k = names();
            let inf = Inference::DiaL { i: i.clone(), a: a.clone(), body: body.clone(), j: k.clone() };
            let p = apply_in(goal, &inf, &Sequent::default())?.remove(0);
            Ok((node(goal, inf, vec![Derivation::open(p)])?, k))
        }
        PathExpr::Jump(j) => {
            let inf = Inference::AtL { j: i.clone(), i: j.clone(), body: body.clone() };
            let p = apply_in(goal, &inf, &Sequent::default())?.remove(0);
            Ok((node(goal, inf, vec![Derivation::open(p)])?, j.clone()))
        }
        PathExpr::Test(psi) => {
            let d = and_l(goal, i, psi, body)?;
            if psi.is_top() && !goal.contains(Side::Left, &at(i, NodeExpr::top())) {
                let p = single_leaf(&d);
                let trimmed = p.without(Side::Left, &at(i, NodeExpr::top()));
                return Ok((d.plug(vec![open_to(&trimmed, &p)?])?, i.clone()));
            }
            Ok((d, i.clone()))
        }
        PathExpr::Concat(a, b) => {
            let (d1, m) = dia_left(goal, i, a, &b.diamond(body.clone()), names)?;
            let leaf = single_leaf(&d1);
            let (d2, end) = dia_left(&leaf, &m, b, body, names)?;
            Ok((d1.plug(vec![d2])?, end))
        }
    }
}

fn dia_right(
    goal: &Sequent,
    i: &Sym,
    path: &PathExpr,
    body: &NodeExpr,
    witnesses: &mut std::slice::Iter<'_, Sym>,
) -> Result<(Derivation, Sym), KernelError> {
    match path {
        PathExpr::Atom(a) => {
            let w = witnesses.next().ok_or_else(|| macro_err("GenDiaR", "too few witnesses"))?;
            let inf = Inference::DiaR { i: i.clone(), a: a.clone(), body: body.clone(), j: w.clone() };
            let p = apply_in(goal, &inf, &Sequent::default())?.remove(0);
            Ok((node(goal, inf, vec![Derivation::open(p)])?, w.clone()))
        }
        PathExpr::Jump(j) => {
            let inf = Inference::AtR { j: i.clone(), i: j.clone(), body: body.clone() };
            let p = apply_in(goal, &inf, &Sequent::default())?.remove(0);
            Ok((node(goal, inf, vec![Derivation::open(p)])?, j.clone()))
        }
        PathExpr::Test(psi) => Ok((and_r(goal, i, psi, body)?, i.clone())),
        PathExpr::Concat(a, b) => {
            let (d1, m) = dia_right(goal, i, a, &b.diamond(body.clone()), witnesses)?;
            let leaf = single_leaf(&d1);
            let (d2, end) = dia_right(&leaf, &m, b, body, witnesses)?;
            Ok((plug_last(d1, d2)?, end))
        }
    }
}

/// Generalized diamond rules for `@_i⟨α⟩φ`. On the left the atomic steps
/// introduce the given names (fresh ones when exhausted); on the right they
/// use the given witnesses in order. The last open premiss carries the body.
pub fn general_dia(
    goal: &Sequent,
    side: Side,
    i: &Sym,
    path: &PathExpr,
    body: &NodeExpr,
    witnesses: &[Sym],
) -> Result<Derivation, KernelError> {
    let principal = at(i, path.diamond(body.clone()));
    if !goal.contains(side, &principal) {
        return Err(macro_err("GenDia", "principal missing"));
    }
    match side {
        Side::Left => {
            let mut fresh = fresh_for(goal);
            fresh.avoid(witnesses.iter().cloned());
            let mut given = witnesses.iter();
            let mut names = || given.next().cloned().unwrap_or_else(|| fresh.fresh());
            let (d, _) = dia_left(goal, i, path, body, &mut names)?;
            wrap("GenDiaL", goal, d)
        }
        Side::Right => {
            let mut it = witnesses.iter();
            let (d, _) = dia_right(goal, i, path, body, &mut it)?;
            wrap("GenDiaR", goal, d)
        }
    }
}

/// A closed derivation of `goal` extended by `@_iφ` on the right, built from
/// nominal equalities and relational facts of the antecedent.
pub fn prove_at(goal: &Sequent, i: &Sym, phi: &NodeExpr) -> Result<Derivation, KernelError> {
    let target = at(i, phi.clone());
    let g = goal.with(Side::Right, target.clone())?;
    if g.contains(Side::Left, &target) {
        return axg(&g, &target);
    }
    let fail = || macro_err("ProveAt", format!("cannot establish {}", crate::syntax::print_node(&target)));
    match phi {
        NodeExpr::Nominal(j) => {
            if i == j {
                let t = Inference::AtT { i: i.clone() };
                let p = apply_in(&g, &t, &Sequent::default())?.remove(0);
                return node(&g, t, vec![node(&p, Inference::Ax { formula: target }, vec![])?]);
            }
            if g.contains(Side::Left, &at(j, nom(i))) {
                let t = Inference::AtT { i: j.clone() };
                let p1 = apply_in(&g, &t, &Sequent::default())?.remove(0);
                let five = Inference::At5 { i: j.clone(), j: i.clone(), k: j.clone() };
                let p2 = apply_in(&p1, &five, &Sequent::default())?.remove(0);
                let ax = node(&p2, Inference::Ax { formula: target }, vec![])?;
                return node(&g, t, vec![node(&p1, five, vec![ax])?]);
            }
            Err(fail())
        }
        NodeExpr::At(j, body) => {
            let inf = Inference::AtR { j: i.clone(), i: j.clone(), body: (**body).clone() };
            let p = apply_in(&g, &inf, &g)?.remove(0);
            let sub = prove_at(&p, j, body)?;
            node(&g, inf, vec![sub])
        }
        NodeExpr::Diamond(a, body) => {
            let witnesses: Vec<Sym> = g
                .ante()
                .iter()
                .filter_map(|e| match e.as_at() {
                    Some((x, NodeExpr::Diamond(b, m))) if x == i && b == a => match &**m {
                        NodeExpr::Nominal(m) => Some(m.clone()),
                        _ => None,
                    },
                    _ => None,
                })
                .collect();
            for w in witnesses {
                let inf = Inference::DiaR { i: i.clone(), a: a.clone(), body: (**body).clone(), j: w.clone() };
                let p = apply_in(&g, &inf, &Sequent::default())?.remove(0);
                if let Ok(sub) = prove_at(&p, &w, body) {
                    return node(&g, inf, vec![sub]);
                }
            }
            Err(fail())
        }
        _ if phi.is_top() => {
            let inf = Inference::ImpR { i: i.clone(), lhs: NodeExpr::Bottom, rhs: NodeExpr::Bottom };
            let p = apply_in(&g, &inf, &g)?.remove(0);
            node(&g, inf, vec![node(&p, Inference::Bot { i: i.clone() }, vec![])?])
        }
        _ => {
            let Some((l, r)) = phi.as_and() else { return Err(fail()) };
            let d = and_r(&g, i, l, r)?;
            let leaves: Vec<Sequent> = d.open_leaves().into_iter().cloned().collect();
            let s1 = prove_at(&leaves[0], i, l)?;
            let s2 = prove_at(&leaves[1], i, r)?;
            d.plug(vec![s1, s2])
        }
    }
}

/// A closed derivation of `goal` extended by `@_i⟨α⟩j` on the right.
pub fn prove_path(goal: &Sequent, i: &Sym, alpha: &PathExpr, j: &Sym) -> Result<Derivation, KernelError> {
    prove_at(goal, i, &alpha.diamond(nom(j)))
}

/// Generalized comparison rule: from
/// `@_i⟨α⟩j, @_i⟨β⟩k, Γ ⊢ Δ, ⟨j:▲_c k:⟩` infer `Γ ⊢ Δ` where
/// `@_i⟨α ▲_c β⟩ ∈ Δ`; the path facts are cut in when the antecedent lacks
/// them and are proved from it.
#[allow(clippy::too_many_arguments)]
pub fn gen_cmp_r(
    goal: &Sequent,
    i: &Sym,
    alpha: &PathExpr,
    kind: CmpKind,
    c: &Sym,
    beta: &PathExpr,
    j: &Sym,
    k: &Sym,
) -> Result<Derivation, KernelError> {
    let principal = at(i, NodeExpr::Compare(alpha.clone().into(), kind, c.clone(), beta.clone().into()));
    if !goal.contains(Side::Right, &principal) {
        return Err(macro_err("GenCmpR", "comparison not in the succedent"));
    }
    let pj = path_to(i, alpha, j);
    let pk = path_to(i, beta, k);
    let full = goal.with(Side::Left, pj.clone())?.with(Side::Left, pk.clone())?;
    let inf = Inference::CmpR {
        i: i.clone(),
        alpha: alpha.clone(),
        kind,
        c: c.clone(),
        beta: beta.clone(),
        j: j.clone(),
        k: k.clone(),
    };
    let premiss = apply_in(&full, &inf, &Sequent::default())?.remove(0);
    let mut d = node(&full, inf, vec![Derivation::open(premiss)])?;
    let mut cur = full;
    let mut facts = vec![pk, pj];
    facts.dedup();
    for p in facts {
        if goal.contains(Side::Left, &p) {
            continue;
        }
        let lower = cur.without(Side::Left, &p);
        let proof = prove_at(&lower, i, p.as_at().expect("path fact").1)?;
        d = Derivation::cut(proof, d, &p)?;
        cur = lower;
    }
    wrap("GenCmpR", goal, d)
}
