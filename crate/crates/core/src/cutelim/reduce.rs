use serde::{Deserialize, Serialize};

use super::CutElimError;
use crate::kernel::{apply_rule, Derivation, Inference, Sequent, Side, Step};
use crate::syntax::{print_node, FreshSupply, NodeExpr, Sym};

/// The transformation family applied to a cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionCase {
    /// A premiss already contains the other side of the cut, or is an axiom
    /// not acting on the cut expression.
    Axiom,
    /// A premiss ends in a weakening.
    Weakening,
    /// The cut moves above the last rule of the right premiss.
    PermuteRight,
    /// The cut moves above the last rule of the left premiss.
    PermuteLeft,
    /// Both premisses introduce the cut expression.
    Principal,
    /// A diamond introduced on the right is used by a right rule as a
    /// relational fact; resolved with S2.
    RightRight,
}

fn rule_of(d: &Derivation) -> Result<(&Inference, &[Derivation]), CutElimError> {
    match &d.step {
        Step::Rule { inference, premisses } => Ok((inference, premisses)),
        Step::Open => Err(CutElimError::OpenLeaf(d.conclusion.to_string())),
        Step::Derived { .. } => unreachable!("derivations are flattened before reduction"),
    }
}

fn is_leaf(inf: &Inference) -> bool {
    matches!(inf, Inference::Ax { .. } | Inference::Bot { .. })
}

fn principal_on(inf: &Inference, side: Side, phi: &NodeExpr) -> bool {
    inf.principal().iter().any(|(s, e)| *s == side && e == phi)
}

/// `d` with its conclusion enlarged to `target`; axioms are re-instantiated
/// rather than weakened.
fn lift(d: &Derivation, target: &Sequent) -> Result<Derivation, CutElimError> {
    if let Step::Rule { inference, .. } = &d.step {
        if is_leaf(inference) {
            if let Ok(leaf) = Derivation::rule(target.clone(), inference.clone(), vec![]) {
                return Ok(leaf);
            }
        }
    }
    Ok(d.clone().weaken_to(target)?)
}

fn cut(l: Derivation, r: Derivation, phi: &NodeExpr) -> Result<Derivation, CutElimError> {
    Ok(Derivation::cut(l, r, phi)?)
}

fn rebuild(d: &Derivation, inference: Inference, premisses: Vec<Derivation>) -> Derivation {
    Derivation { conclusion: d.conclusion.clone(), step: Step::Rule { inference, premisses } }
}

/// Renames the eigen-nominals of the root rule to fresh names.
fn freshen_root(d: &Derivation, fresh: &mut FreshSupply) -> Derivation {
    let Step::Rule { inference, premisses } = &d.step else { return d.clone() };
    let eigen = inference.eigen_nominals();
    if eigen.is_empty() {
        return d.clone();
    }
    let pairs: Vec<(Sym, Sym)> = eigen.into_iter().map(|e| (e, fresh.fresh())).collect();
    let f = |s: &Sym| pairs.iter().find(|(e, _)| e == s).map_or_else(|| s.clone(), |(_, n)| n.clone());
    rebuild(d, inference.map_nominals(&f), premisses.iter().map(|p| p.map_nominals(&f)).collect())
}

/// Renames every eigen-nominal in `d` to a fresh name.
fn freshen_all(d: &Derivation, fresh: &mut FreshSupply) -> Derivation {
    let d = freshen_root(d, fresh);
    match &d.step {
        Step::Rule { inference, premisses } => {
            let ps = premisses.iter().map(|p| freshen_all(p, fresh)).collect();
            rebuild(&d, inference.clone(), ps)
        }
        _ => d,
    }
}

/// Simultaneous substitution of nominals, eigen-nominals renamed first.
fn substitute(d: &Derivation, map: &[(Sym, Sym)], fresh: &mut FreshSupply) -> Derivation {
    let d = freshen_all(d, fresh);
    let f = |s: &Sym| map.iter().find(|(a, _)| a == s).map_or_else(|| s.clone(), |(_, b)| b.clone());
    d.map_nominals(&f)
}

/// Applies `inf` at `goal` over the given premiss derivations, weakening
/// each up to its canonical premiss (with the consumed principal kept when
/// the derivation has it).
fn apply_over(goal: &Sequent, inf: Inference, subs: Vec<Derivation>) -> Result<Derivation, CutElimError> {
    let canonical = apply_rule(goal, &inf)?;
    let kept = inf.consumed();
    let mut kids = Vec::with_capacity(subs.len());
    for (want, sub) in canonical.into_iter().zip(subs) {
        let target = match &kept {
            Some((side, e)) if sub.conclusion.contains(*side, e) => want.with(*side, e.clone())?,
            _ => want,
        };
        kids.push(sub.weaken_to(&target)?);
    }
    Ok(Derivation::rule(goal.clone(), inf, kids)?)
}

/// Cuts `l` against `r` when both still carry `phi`; otherwise keeps the
/// side that lost it.
fn cut_if(l: &Derivation, r: &Derivation, phi: &NodeExpr, keep_left: bool) -> Result<Derivation, CutElimError> {
    if l.conclusion.contains(Side::Right, phi) && r.conclusion.contains(Side::Left, phi) {
        cut(l.clone(), r.clone(), phi)
    } else if keep_left {
        Ok(l.clone())
    } else {
        Ok(r.clone())
    }
}

/// One transformation step on a cut whose premisses are cut-free.
pub(super) fn reduce_cut(d: &Derivation, fresh: &mut FreshSupply) -> Result<(Derivation, ReductionCase), CutElimError> {
    let (inf, prem) = rule_of(d)?;
    let Inference::Cut { formula: phi } = inf else { return Err(crate::kernel::KernelError::NotCut.into()) };
    let (l, r) = (&prem[0], &prem[1]);
    let s = &d.conclusion;
    let (linf, lprem) = rule_of(l)?;
    let (rinf, rprem) = rule_of(r)?;

    if l.conclusion.contains(Side::Left, phi) {
        return Ok((lift(r, s)?, ReductionCase::Axiom));
    }
    if r.conclusion.contains(Side::Right, phi) {
        return Ok((lift(l, s)?, ReductionCase::Axiom));
    }
    if is_leaf(linf) {
        return Ok((lift(l, s)?, ReductionCase::Axiom));
    }
    if is_leaf(rinf) && !principal_on(rinf, Side::Left, phi) {
        return Ok((lift(r, s)?, ReductionCase::Axiom));
    }
    if matches!(linf, Inference::WL { .. } | Inference::WR { .. }) {
        let inner = cut_if(&lprem[0], r, phi, true)?;
        return Ok((lift(&inner, s)?, ReductionCase::Weakening));
    }
    if matches!(rinf, Inference::WL { .. } | Inference::WR { .. }) {
        let inner = cut_if(l, &rprem[0], phi, false)?;
        return Ok((lift(&inner, s)?, ReductionCase::Weakening));
    }
    if !principal_on(rinf, Side::Left, phi) {
        let r = freshen_root(r, fresh);
        let (rinf, rprem) = rule_of(&r)?;
        let subs = rprem.iter().map(|p| cut_if(l, p, phi, false)).collect::<Result<Vec<_>, _>>()?;
        return Ok((apply_over(s, rinf.clone(), subs)?, ReductionCase::PermuteRight));
    }
    if !principal_on(linf, Side::Right, phi) {
        let l = freshen_root(l, fresh);
        let (linf, lprem) = rule_of(&l)?;
        let subs = lprem.iter().map(|p| cut_if(p, r, phi, true)).collect::<Result<Vec<_>, _>>()?;
        return Ok((apply_over(s, linf.clone(), subs)?, ReductionCase::PermuteLeft));
    }
    let stuck = || CutElimError::Stuck { formula: print_node(phi), left: linf.rule(), right: rinf.rule() };
    let out = match (linf, rinf) {
        (Inference::ImpR { i, lhs, rhs }, Inference::ImpL { .. }) => {
            let a = NodeExpr::at_sym(i, lhs.clone());
            let b = NodeExpr::at_sym(i, rhs.clone());
            let l1 = cut_if(&lprem[0], r, phi, true)?;
            let r1 = cut_if(l, &rprem[0], phi, false)?;
            let r2 = cut_if(l, &rprem[1], phi, false)?;
            let inner = cut(l1, r2, &b)?;
            (cut(r1, inner, &a)?, ReductionCase::Principal)
        }
        (Inference::AtR { i, body, .. }, Inference::AtL { .. }) => {
            let e = NodeExpr::at_sym(i, body.clone());
            let l1 = cut_if(&lprem[0], r, phi, true)?;
            let r1 = cut_if(l, &rprem[0], phi, false)?;
            (cut(l1, r1, &e)?, ReductionCase::Principal)
        }
        (Inference::NEqR { i, j, c }, Inference::NEqL { .. }) => {
            let e = NodeExpr::cmp_atom(i, crate::syntax::CmpKind::Eq, c, j);
            let l1 = cut_if(&lprem[0], r, phi, true)?;
            let r1 = cut_if(l, &rprem[0], phi, false)?;
            (cut(r1, l1, &e)?, ReductionCase::Principal)
        }
        (Inference::DiaR { body, j, .. }, Inference::DiaL { j: k, .. }) => {
            let cut1 = cut(lprem[0].clone(), r.clone(), phi)?;
            let r1 = substitute(&rprem[0], &[(k.clone(), j.clone())], fresh);
            let r1 = cut_if(l, &r1, phi, false)?;
            (cut(cut1, r1, &NodeExpr::at_sym(j, body.clone()))?, ReductionCase::Principal)
        }
        (
            Inference::CmpR { kind, c, j, k, .. },
            Inference::CmpL { j: j2, k: k2, .. },
        ) => {
            let cut1 = cut(lprem[0].clone(), r.clone(), phi)?;
            let r1 = substitute(&rprem[0], &[(j2.clone(), j.clone()), (k2.clone(), k.clone())], fresh);
            let r1 = cut_if(l, &r1, phi, false)?;
            (cut(cut1, r1, &NodeExpr::cmp_atom(j, *kind, c, k))?, ReductionCase::Principal)
        }
        (Inference::DiaR { i, a, body: NodeExpr::Nominal(m), j }, _) if rinf.consumed().is_none() => {
            let jm = NodeExpr::at_sym(j, NodeExpr::Nominal(m.clone()));
            let aj = NodeExpr::at_sym(i, NodeExpr::Diamond(a.clone(), NodeExpr::Nominal(j.clone()).into()));
            let cut1 = cut(lprem[0].clone(), r.clone(), phi)?;
            let below = r.conclusion.without(Side::Left, phi).with(Side::Left, jm.clone())?.with(Side::Left, aj)?;
            let s2 = Inference::S2 { i: i.clone(), j: j.clone(), k: m.clone(), a: a.clone() };
            let above = apply_rule(&below, &s2)?.remove(0);
            let r2 = Derivation::rule(below, s2, vec![r.clone().weaken_to(&above)?])?;
            (cut(cut1, r2, &jm)?, ReductionCase::RightRight)
        }
        _ => return Err(stuck()),
    };
    let (new, case) = out;
    Ok((new.weaken_to(s)?, case))
}
