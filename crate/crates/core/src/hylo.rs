//! The comparison-free fragment H(@): membership, proof search restricted to
//! the rules without data comparisons, and the rules of the reference
//! calculus for H(@) as derived rules.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::derived::{and_l, and_r, axg};
use crate::kernel::{apply_rule, Derivation, Inference, KernelError, RuleId, Sequent, Side, Step};
use crate::gen::{random_node, random_sequent, Signature};
use crate::search::{prove, SearchConfig, SearchError, SearchResult};
use crate::syntax::{sym, FreshSupply, NodeExpr, PathExpr, Sym};

/// Membership in H(@).
pub trait Fragment {
    fn is_hylo(&self) -> bool;
}

impl Fragment for NodeExpr {
    fn is_hylo(&self) -> bool {
        self.is_comparison_free()
    }
}

impl Fragment for Sequent {
    fn is_hylo(&self) -> bool {
        self.formulas().all(|e| matches!(e, NodeExpr::At(..)) && e.is_hylo())
    }
}

impl Fragment for Derivation {
    /// Every sequent of the tree, expansions included, lies in H(@).
    fn is_hylo(&self) -> bool {
        let mut ok = true;
        self.visit(&mut |d| ok &= d.conclusion.is_hylo());
        ok
    }
}

pub fn is_hylo<T: Fragment + ?Sized>(x: &T) -> bool {
    x.is_hylo()
}

/// Proof search without the comparison rules.
pub fn prove_hylo(goal: &Sequent, cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    if !goal.is_hylo() {
        return Err(SearchError::Fragment(goal.to_string()));
    }
    cfg.validate()?;
    Ok(prove(goal, &cfg.without_comparisons()))
}

/// A rule of the reference sequent calculus for H(@), instantiated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule")]
pub enum BraunerRule {
    /// From `Γ ⊢ Δ, @_i j` and `Γ ⊢ Δ, @_i φ` infer `Γ ⊢ Δ, @_j φ`.
    Nom1 { i: Sym, j: Sym, phi: NodeExpr },
    /// From `Γ ⊢ Δ, @_i j`, `Γ ⊢ Δ, @_i⟨a⟩k` and `@_j⟨a⟩k, Γ ⊢ Δ` infer `Γ ⊢ Δ`.
    Nom2 { i: Sym, j: Sym, k: Sym, a: Sym },
    /// From `Γ ⊢ Δ, @_i⟨a⟩j` and `@_j φ, Γ ⊢ Δ` infer `@_i[a]φ, Γ ⊢ Δ`.
    BoxL { i: Sym, a: Sym, phi: NodeExpr, j: Sym },
    /// From `@_i⟨a⟩j, Γ ⊢ Δ, @_j φ` with `j` new infer `Γ ⊢ Δ, @_i[a]φ`.
    BoxR { i: Sym, a: Sym, phi: NodeExpr, j: Sym },
    /// From `@_i i, Γ ⊢ Δ` infer `Γ ⊢ Δ`.
    Ref { i: Sym },
    /// From `@_i φ, @_i ψ, Γ ⊢ Δ` infer `@_i(φ ∧ ψ), Γ ⊢ Δ`.
    AndL { i: Sym, phi: NodeExpr, psi: NodeExpr },
    /// From `Γ ⊢ Δ, @_i φ` and `Γ ⊢ Δ, @_i ψ` infer `Γ ⊢ Δ, @_i(φ ∧ ψ)`.
    AndR { i: Sym, phi: NodeExpr, psi: NodeExpr },
}

impl BraunerRule {
    pub fn name(&self) -> &'static str {
        match self {
            BraunerRule::Nom1 { .. } => "Nom1",
            BraunerRule::Nom2 { .. } => "Nom2",
            BraunerRule::BoxL { .. } => "BoxL",
            BraunerRule::BoxR { .. } => "BoxR",
            BraunerRule::Ref { .. } => "Ref",
            BraunerRule::AndL { .. } => "AndL",
            BraunerRule::AndR { .. } => "AndR",
        }
    }
}

fn err(rule: &BraunerRule, reason: impl Into<String>) -> KernelError {
    KernelError::Macro { name: rule.name().to_string(), reason: reason.into() }
}

fn at(i: &Sym, e: NodeExpr) -> NodeExpr {
    NodeExpr::at_sym(i, e)
}

fn nom(i: &Sym) -> NodeExpr {
    NodeExpr::Nominal(i.clone())
}

fn dia(a: &Sym, e: NodeExpr) -> NodeExpr {
    NodeExpr::Diamond(a.clone(), e.into())
}

fn box_of(a: &Sym, phi: &NodeExpr) -> NodeExpr {
    NodeExpr::boxed(&PathExpr::Atom(a.clone()), phi.clone())
}

fn step(goal: &Sequent, inf: Inference, kids: Vec<Derivation>) -> Result<Derivation, KernelError> {
    Derivation::rule(goal.clone(), inf, kids)
}

fn premiss(goal: &Sequent, inf: &Inference, n: usize) -> Result<Sequent, KernelError> {
    Ok(apply_rule(goal, inf)?.swap_remove(n))
}

/// The premisses of `rule` for the conclusion `goal`.
pub fn brauner_premisses(rule: &BraunerRule, goal: &Sequent) -> Result<Vec<Sequent>, KernelError> {
    let need = |side: Side, e: &NodeExpr| {
        if goal.contains(side, e) {
            Ok(())
        } else {
            Err(err(rule, format!("{e:?} missing from the conclusion")))
        }
    };
    Ok(match rule {
        BraunerRule::Nom1 { i, j, phi } => {
            let target = at(j, phi.clone());
            need(Side::Right, &target)?;
            let base = goal.without(Side::Right, &target);
            vec![base.with(Side::Right, at(i, nom(j)))?, base.with(Side::Right, at(i, phi.clone()))?]
        }
        BraunerRule::Nom2 { i, j, k, a } => vec![
            goal.with(Side::Right, at(i, nom(j)))?,
            goal.with(Side::Right, at(i, dia(a, nom(k))))?,
            goal.with(Side::Left, at(j, dia(a, nom(k))))?,
        ],
        BraunerRule::BoxL { i, a, phi, j } => {
            let p = at(i, box_of(a, phi));
            need(Side::Left, &p)?;
            let base = goal.without(Side::Left, &p);
            vec![base.with(Side::Right, at(i, dia(a, nom(j))))?, base.with(Side::Left, at(j, phi.clone()))?]
        }
        BraunerRule::BoxR { i, a, phi, j } => {
            let p = at(i, box_of(a, phi));
            need(Side::Right, &p)?;
            if goal.nominals().contains(j) {
                return Err(err(rule, format!("{j} is not new")));
            }
            let base = goal.without(Side::Right, &p);
            vec![base.with(Side::Left, at(i, dia(a, nom(j))))?.with(Side::Right, at(j, phi.clone()))?]
        }
        BraunerRule::Ref { i } => vec![goal.with(Side::Left, at(i, nom(i)))?],
        BraunerRule::AndL { i, phi, psi } => {
            let p = at(i, NodeExpr::and(phi.clone(), psi.clone()));
            need(Side::Left, &p)?;
            let base = goal.without(Side::Left, &p);
            vec![base.with(Side::Left, at(i, phi.clone()))?.with(Side::Left, at(i, psi.clone()))?]
        }
        BraunerRule::AndR { i, phi, psi } => {
            let p = at(i, NodeExpr::and(phi.clone(), psi.clone()));
            need(Side::Right, &p)?;
            let base = goal.without(Side::Right, &p);
            vec![base.with(Side::Right, at(i, phi.clone()))?, base.with(Side::Right, at(i, psi.clone()))?]
        }
    })
}

/// A closed derivation of `goal`, where `@_i j, @_i φ` are antecedents and
/// `@_j φ` is a succedent, by induction on `φ`.
pub fn transfer(goal: &Sequent, i: &Sym, j: &Sym, phi: &NodeExpr) -> Result<Derivation, KernelError> {
    let target = at(j, phi.clone());
    if goal.contains(Side::Left, &target) {
        return axg(goal, &target);
    }
    match phi {
        NodeExpr::Prop(_) | NodeExpr::Bottom => s1_close(goal, i, j, phi),
        NodeExpr::Diamond(_, k) if matches!(**k, NodeExpr::Nominal(_)) => s1_close(goal, i, j, phi),
        NodeExpr::Nominal(k) => {
            let inf = Inference::At5 { i: i.clone(), j: j.clone(), k: k.clone() };
            let p = premiss(goal, &inf, 0)?;
            step(goal, inf, vec![step(&p, Inference::Ax { formula: target }, vec![])?])
        }
        NodeExpr::At(k, psi) => {
            let l = Inference::AtL { j: i.clone(), i: k.clone(), body: (**psi).clone() };
            let p1 = premiss(goal, &l, 0)?;
            let r = Inference::AtR { j: j.clone(), i: k.clone(), body: (**psi).clone() };
            let p2 = premiss(&p1, &r, 0)?;
            let close = axg(&p2, &at(k, (**psi).clone()))?;
            step(goal, l, vec![step(&p1, r, vec![close])?])
        }
        NodeExpr::Implies(a, b) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            let r = Inference::ImpR { i: j.clone(), lhs: a.clone(), rhs: b.clone() };
            let p1 = premiss(goal, &r, 0)?;
            let l = Inference::ImpL { i: i.clone(), lhs: a.clone(), rhs: b.clone() };
            let ps = apply_rule(&p1, &l)?;
            let t = Inference::AtT { i: i.clone() };
            let q1 = premiss(&ps[0], &t, 0)?;
            let five = Inference::At5 { i: i.clone(), j: j.clone(), k: i.clone() };
            let q2 = premiss(&q1, &five, 0)?;
            let back = step(&ps[0], t, vec![step(&q1, five, vec![transfer(&q2, j, i, &a)?])?])?;
            let fwd = transfer(&ps[1], i, j, &b)?;
            step(goal, r, vec![step(&p1, l, vec![back, fwd])?])
        }
        NodeExpr::Diamond(a, psi) => {
            let m = FreshSupply::avoiding(goal.nominals()).fresh();
            let l = Inference::DiaL { i: i.clone(), a: a.clone(), body: (**psi).clone(), j: m.clone() };
            let p1 = premiss(goal, &l, 0)?;
            let s1 = Inference::S1 { i: i.clone(), j: j.clone(), body: dia(a, nom(&m)) };
            let p2 = premiss(&p1, &s1, 0)?;
            let r = Inference::DiaR { i: j.clone(), a: a.clone(), body: (**psi).clone(), j: m.clone() };
            let p3 = premiss(&p2, &r, 0)?;
            let close = axg(&p3, &at(&m, (**psi).clone()))?;
            step(goal, l, vec![step(&p1, s1, vec![step(&p2, r, vec![close])?])?])
        }
        NodeExpr::Compare(..) => Err(KernelError::Macro {
            name: "Transfer".into(),
            reason: "comparisons are outside the fragment".into(),
        }),
    }
}

/// Closes `@_j ¬φ, @_j φ, Γ ⊢ Δ`.
fn refute_negation(goal: &Sequent, j: &Sym, phi: &NodeExpr) -> Result<Derivation, KernelError> {
    let il = Inference::ImpL { i: j.clone(), lhs: phi.clone(), rhs: NodeExpr::Bottom };
    let bs = apply_rule(goal, &il)?;
    let fact = axg(&bs[0], &at(j, phi.clone()))?;
    let bot = step(&bs[1], Inference::Bot { i: j.clone() }, vec![])?;
    step(goal, il, vec![fact, bot])
}

fn s1_close(goal: &Sequent, i: &Sym, j: &Sym, body: &NodeExpr) -> Result<Derivation, KernelError> {
    let inf = Inference::S1 { i: i.clone(), j: j.clone(), body: body.clone() };
    let p = premiss(goal, &inf, 0)?;
    let leaf = match body {
        NodeExpr::Bottom => step(&p, Inference::Bot { i: j.clone() }, vec![])?,
        NodeExpr::Prop(_) => step(&p, Inference::Ax { formula: at(j, body.clone()) }, vec![])?,
        _ => axg(&p, &at(j, body.clone()))?,
    };
    step(goal, inf, vec![leaf])
}

fn open_to(leaf: &Sequent, target: &Sequent) -> Result<Derivation, KernelError> {
    Derivation::open(leaf.clone()).weaken_to(target)
}

/// A fragment deriving `goal` from the premisses of `rule`, whose open leaves
/// are exactly [`brauner_premisses`] in order.
pub fn simulate_brauner(rule: &BraunerRule, goal: &Sequent) -> Result<Derivation, KernelError> {
    let ps = brauner_premisses(rule, goal)?;
    match rule {
        BraunerRule::Nom1 { i, j, phi } => {
            let ij = at(i, nom(j));
            let iphi = at(i, phi.clone());
            let left = open_to(&ps[0], &goal.with(Side::Right, ij.clone())?)?;
            let g2 = goal.with(Side::Left, ij.clone())?;
            let mid = open_to(&ps[1], &g2.with(Side::Right, iphi.clone())?)?;
            let close = transfer(&g2.with(Side::Left, iphi.clone())?, i, j, phi)?;
            Derivation::cut(left, Derivation::cut(mid, close, &iphi)?, &ij)
        }
        BraunerRule::Nom2 { i, j, k, a } => {
            let ij = at(i, nom(j));
            let aik = at(i, dia(a, nom(k)));
            let left = Derivation::open(ps[0].clone());
            let inner_left = Derivation::open(ps[1].clone()).weaken(Side::Left, ij.clone())?;
            let s1_goal = goal.with(Side::Left, ij.clone())?.with(Side::Left, aik.clone())?;
            let s1 = Inference::S1 { i: i.clone(), j: j.clone(), body: dia(a, nom(k)) };
            let above = premiss(&s1_goal, &s1, 0)?;
            let s1_node = step(&s1_goal, s1, vec![open_to(&ps[2], &above)?])?;
            let inner = Derivation::cut(inner_left, s1_node, &aik)?;
            Derivation::cut(left, inner, &ij)
        }
        BraunerRule::BoxL { i, a, phi, j } => {
            let not_phi = NodeExpr::not(phi.clone());
            let imp = Inference::ImpL { i: i.clone(), lhs: dia(a, not_phi.clone()), rhs: NodeExpr::Bottom };
            let branches = apply_rule(goal, &imp)?;
            let aij = at(i, dia(a, nom(j)));
            let first = &branches[0];
            let fact = open_to(&ps[0], &first.with(Side::Right, aij.clone())?)?;
            let with_fact = first.with(Side::Left, aij.clone())?;
            let dr = Inference::DiaR { i: i.clone(), a: a.clone(), body: not_phi, j: j.clone() };
            let p1 = premiss(&with_fact, &dr, 0)?;
            let ir = Inference::ImpR { i: j.clone(), lhs: phi.clone(), rhs: NodeExpr::Bottom };
            let p2 = premiss(&p1, &ir, 0)?;
            let above = match open_to(&ps[1], &p2) {
                Ok(d) => d,
                Err(_) => {
                    let neg = at(j, NodeExpr::not(phi.clone()));
                    let keep = open_to(&ps[1], &p2.with(Side::Right, neg.clone())?)?;
                    let used = p2.with(Side::Left, neg.clone())?;
                    Derivation::cut(keep, refute_negation(&used, j, phi)?, &neg)?
                }
            };
            let use_fact = step(&with_fact, dr, vec![step(&p1, ir, vec![above])?])?;
            let witness = Derivation::cut(fact, use_fact, &aij)?;
            let bot = step(&branches[1], Inference::Bot { i: i.clone() }, vec![])?;
            step(goal, imp, vec![witness, bot])
        }
        BraunerRule::BoxR { i, a, phi, j } => {
            let not_phi = NodeExpr::not(phi.clone());
            let ir = Inference::ImpR { i: i.clone(), lhs: dia(a, not_phi.clone()), rhs: NodeExpr::Bottom };
            let p1 = premiss(goal, &ir, 0)?;
            let dl = Inference::DiaL { i: i.clone(), a: a.clone(), body: not_phi.clone(), j: j.clone() };
            let p2 = premiss(&p1, &dl, 0)?;
            let il = Inference::ImpL { i: j.clone(), lhs: phi.clone(), rhs: NodeExpr::Bottom };
            let split = |g: &Sequent| -> Result<Derivation, KernelError> {
                let branches = apply_rule(g, &il)?;
                let open = open_to(&ps[0], &branches[0])?;
                let bot = step(&branches[1], Inference::Bot { i: j.clone() }, vec![])?;
                step(g, il.clone(), vec![open, bot])
            };
            let above = match split(&p2) {
                Ok(d) => d,
                Err(_) => {
                    let d = at(i, dia(a, not_phi.clone()));
                    let witness = Inference::DiaR { i: i.clone(), a: a.clone(), body: not_phi.clone(), j: j.clone() };
                    let g = p2.with(Side::Right, d.clone())?;
                    let w = premiss(&g, &witness, 0)?;
                    let give = step(&g, witness, vec![axg(&w, &at(j, not_phi))?])?;
                    Derivation::cut(give, split(&p2.with(Side::Left, d.clone())?)?, &d)?
                }
            };
            step(goal, ir, vec![step(&p1, dl, vec![above])?])
        }
        BraunerRule::Ref { i } => Derivation::refine(goal, Inference::AtT { i: i.clone() }),
        BraunerRule::AndL { i, phi, psi } => and_l(goal, i, phi, psi),
        BraunerRule::AndR { i, phi, psi } => and_r(goal, i, phi, psi),
    }
}

/// Rule names of a tree in pre-order with consecutive weakenings merged, the
/// granularity of displayed derivations.
pub fn display_shape(d: &Derivation) -> Vec<String> {
    fn go(d: &Derivation, parent_wl: bool, out: &mut Vec<String>) {
        match &d.step {
            Step::Open => out.push("open".into()),
            Step::Derived { name, .. } => {
                out.push(name.clone());
                for p in d.premisses() {
                    go(p, false, out);
                }
            }
            Step::Rule { inference, premisses } => {
                let wl = matches!(inference.rule(), RuleId::WL | RuleId::WR);
                if !(wl && parent_wl) {
                    out.push(inference.rule().to_string());
                }
                for p in premisses {
                    go(p, wl, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(d, false, &mut out);
    out
}

/// Instance of the Nom2 schema used by the golden suite, with every
/// premiss closed by search.
pub fn nom2_closed() -> Result<Derivation, KernelError> {
    let (i, j, k, a) = (sym("i"), sym("j"), sym("k"), sym("a"));
    let goal = Sequent::new([at(&j, nom(&i)), at(&i, dia(&a, nom(&k)))], [at(&j, dia(&a, nom(&k)))])?;
    let rule = BraunerRule::Nom2 { i, j, k, a };
    let frag = simulate_brauner(&rule, &goal)?;
    let cfg = SearchConfig::default();
    let mut proofs = Vec::new();
    for leaf in frag.open_leaves() {
        match prove(leaf, &cfg) {
            SearchResult::Proved(d) => proofs.push(d),
            _ => return Err(err(&rule, format!("premiss {leaf} not proved"))),
        }
    }
    frag.plug(proofs)
}

/// A random instance of a reference rule together with a conclusion it
/// applies to. Box rules use `fresh` as the new nominal.
pub fn random_brauner_instance<R: Rng>(rng: &mut R, sig: &Signature) -> (BraunerRule, Sequent) {
    let pick = |rng: &mut R, xs: &[Sym]| xs.choose(rng).expect("signature component is non-empty").clone();
    let (i, j, k) = (pick(rng, &sig.nominals), pick(rng, &sig.nominals), pick(rng, &sig.nominals));
    let a = pick(rng, &sig.modalities);
    let phi = random_node(rng, sig, 1);
    let psi = random_node(rng, sig, 1);
    let base = random_sequent(rng, sig, 1, 2);
    let add = |side, e| base.with(side, e).expect("@-formulas fit either side");
    match rng.gen_range(0..7) {
        0 => (BraunerRule::Nom1 { i, j: j.clone(), phi: phi.clone() }, add(Side::Right, at(&j, phi))),
        1 => (BraunerRule::Nom2 { i, j, k, a }, base),
        2 => {
            let b = at(&i, box_of(&a, &phi));
            (BraunerRule::BoxL { i, a, phi, j }, add(Side::Left, b))
        }
        3 => {
            let b = at(&i, box_of(&a, &phi));
            (BraunerRule::BoxR { i, a, phi, j: sym("fresh") }, add(Side::Right, b))
        }
        4 => (BraunerRule::Ref { i }, base),
        5 => {
            let e = at(&i, NodeExpr::and(phi.clone(), psi.clone()));
            (BraunerRule::AndL { i, phi, psi }, add(Side::Left, e))
        }
        _ => {
            let e = at(&i, NodeExpr::and(phi.clone(), psi.clone()));
            (BraunerRule::AndR { i, phi, psi }, add(Side::Right, e))
        }
    }
}
