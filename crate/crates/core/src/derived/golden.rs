use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::basic::{and_l, and_r, axg, cmp_b, iff_r, inv_and_l, top_l};
use super::inverse::invert;
use super::paths::prove_at;
use super::{apply_in, at, macro_err, nom};
use crate::kernel::{path_to, Derivation, Inference, KernelError, Sequent, Side};
use crate::syntax::{sym, CmpKind, FreshSupply, NodeExpr, PathExpr, Sym};

/// A derivation built bottom-up along a single branch.
struct Chain {
    parts: Vec<Derivation>,
    cur: Sequent,
}

impl Chain {
    fn new(goal: Sequent) -> Chain {
        Chain { parts: Vec::new(), cur: goal }
    }

    fn push(&mut self, d: Derivation) -> Result<(), KernelError> {
        let leaves = d.open_leaves();
        if leaves.len() != 1 {
            return Err(macro_err("Chain", "expected a single open premiss"));
        }
        self.cur = leaves[0].clone();
        self.parts.push(d);
        Ok(())
    }

    fn rule(&mut self, inf: Inference) -> Result<&mut Chain, KernelError> {
        let p = apply_in(&self.cur, &inf, &Sequent::default())?;
        let d = Derivation::rule(self.cur.clone(), inf, p.into_iter().map(Derivation::open).collect())?;
        self.push(d)?;
        Ok(self)
    }

    fn apply(
        &mut self,
        f: impl FnOnce(&Sequent) -> Result<Derivation, KernelError>,
    ) -> Result<&mut Chain, KernelError> {
        let d = f(&self.cur)?;
        self.push(d)?;
        Ok(self)
    }

    /// Weakens the current goal down to `target`.
    fn shrink_to(&mut self, target: Sequent) -> Result<&mut Chain, KernelError> {
        let d = Derivation::open(target).weaken_to(&self.cur)?;
        self.push(d)?;
        Ok(self)
    }

    fn close(&mut self, top: Derivation) -> Result<Derivation, KernelError> {
        let mut d = top;
        while let Some(part) = self.parts.pop() {
            d = part.plug(vec![d])?;
        }
        Ok(d)
    }

    fn close_axg(&mut self, phi: &NodeExpr) -> Result<Derivation, KernelError> {
        let top = axg(&self.cur, phi)?;
        self.close(top)
    }
}

fn seq(ante: impl IntoIterator<Item = NodeExpr>, succ: impl IntoIterator<Item = NodeExpr>) -> Result<Sequent, KernelError> {
    Sequent::new(ante, succ)
}

fn compare(alpha: &PathExpr, kind: CmpKind, c: &Sym, beta: &PathExpr) -> NodeExpr {
    NodeExpr::Compare(alpha.clone().into(), kind, c.clone(), beta.clone().into())
}

fn cmp_atom(j: &Sym, kind: CmpKind, c: &Sym, k: &Sym) -> NodeExpr {
    NodeExpr::cmp_atom(j, kind, c, k)
}

/// Picks `preferred` unless taken, else a fresh name; the result is marked
/// as taken.
fn pick(taken: &mut BTreeSet<Sym>, preferred: &str) -> Sym {
    let p = sym(preferred);
    let name = if taken.contains(&p) {
        let mut f = FreshSupply::avoiding(taken.iter().cloned());
        f.fresh()
    } else {
        p
    };
    taken.insert(name.clone());
    name
}

/// `⊢ @_i⟨ε =_c ε⟩` by `@T`, `⊤L`, inverse `∧L`, `⟨▲⟩R`, `EqT`, `Ax`.
pub fn reflexivity(i: &Sym, c: &Sym) -> Result<Derivation, KernelError> {
    let eps = PathExpr::eps();
    let goal = seq([], [at(i, compare(&eps, CmpKind::Eq, c, &eps))])?;
    let mut ch = Chain::new(goal);
    ch.rule(Inference::AtT { i: i.clone() })?
        .apply(|g| top_l(g, i))?
        .apply(|g| inv_and_l(g, i, &NodeExpr::top(), &nom(i)))?
        .rule(Inference::CmpR {
            i: i.clone(),
            alpha: eps.clone(),
            kind: CmpKind::Eq,
            c: c.clone(),
            beta: eps,
            j: i.clone(),
            k: i.clone(),
        })?
        .rule(Inference::EqT { i: i.clone(), c: c.clone() })?;
    ch.close_axg(&cmp_atom(i, CmpKind::Eq, c, i))
}

/// `⊢ @_i(⟨α ▲_c β⟩ ↔ ⟨β ▲_c α⟩)` by `↔R` and, on each side, `⟨▲⟩L`,
/// `⟨▲⟩R`, `⟨▲⟩B`, `Ax`.
pub fn symmetry(i: &Sym, alpha: &PathExpr, kind: CmpKind, c: &Sym, beta: &PathExpr) -> Result<Derivation, KernelError> {
    let ab = compare(alpha, kind, c, beta);
    let ba = compare(beta, kind, c, alpha);
    let goal = seq([], [at(i, NodeExpr::iff(ab.clone(), ba.clone()))])?;
    let mut taken = goal.nominals();
    let j = pick(&mut taken, "j");
    let k = pick(&mut taken, "k");
    let top = iff_r(&goal, i, &ab, &ba)?;
    let leaves: Vec<Sequent> = top.open_leaves().into_iter().cloned().collect();
    let mut kids = Vec::new();
    for (leaf, (l, r, x, y)) in leaves.into_iter().zip([(alpha, beta, &j, &k), (beta, alpha, &k, &j)]) {
        let mut ch = Chain::new(leaf);
        let cmp = |p: &PathExpr, q: &PathExpr, x: &Sym, y: &Sym, right: bool| {
            let (i, c) = (i.clone(), c.clone());
            let (alpha, beta, j, k) = (p.clone(), q.clone(), x.clone(), y.clone());
            if right {
                Inference::CmpR { i, alpha, kind, c, beta, j, k }
            } else {
                Inference::CmpL { i, alpha, kind, c, beta, j, k }
            }
        };
        ch.rule(cmp(l, r, x, y, false))?
            .rule(cmp(r, l, y, x, true))?
            .apply(|g| cmp_b(g, x, kind, c, y))?;
        kids.push(ch.close_axg(&cmp_atom(y, kind, c, x))?);
    }
    top.plug(kids)
}

/// `⊢ @_i(⟨α =_c ε⟩ ∧ ⟨ε =_c β⟩ → ⟨α =_c β⟩)`, chaining the two equalities
/// through the aliases of the intermediate node with `@5`, `S3`, `⟨▲⟩B` and
/// `Eq5`.
pub fn transitivity(i: &Sym, alpha: &PathExpr, c: &Sym, beta: &PathExpr) -> Result<Derivation, KernelError> {
    let eq = CmpKind::Eq;
    let eps = PathExpr::eps();
    let first = compare(alpha, eq, c, &eps);
    let second = compare(&eps, eq, c, beta);
    let concl = compare(alpha, eq, c, beta);
    let both = NodeExpr::and(first.clone(), second.clone());
    let goal = seq([], [at(i, NodeExpr::implies(both.clone(), concl.clone()))])?;
    let mut taken = goal.nominals();
    let a = pick(&mut taken, "a");
    let b = pick(&mut taken, "b");
    let m = pick(&mut taken, "m");
    let d = pick(&mut taken, "d");
    let top = NodeExpr::top();
    let mut ch = Chain::new(goal);
    ch.rule(Inference::ImpR { i: i.clone(), lhs: both, rhs: concl })?
        .apply(|g| and_l(g, i, &first, &second))?
        .rule(Inference::CmpL {
            i: i.clone(),
            alpha: alpha.clone(),
            kind: eq,
            c: c.clone(),
            beta: eps.clone(),
            j: a.clone(),
            k: m.clone(),
        })?
        .rule(Inference::CmpL {
            i: i.clone(),
            alpha: eps.clone(),
            kind: eq,
            c: c.clone(),
            beta: beta.clone(),
            j: d.clone(),
            k: b.clone(),
        })?
        .apply(|g| and_l(g, i, &top, &nom(&m)))?
        .apply(|g| and_l(g, i, &top, &nom(&d)))?
        .rule(Inference::CmpR {
            i: i.clone(),
            alpha: alpha.clone(),
            kind: eq,
            c: c.clone(),
            beta: beta.clone(),
            j: a.clone(),
            k: b.clone(),
        })?
        .rule(Inference::At5 { i: i.clone(), j: d.clone(), k: m.clone() })?
        .shrink_to(seq(
            [at(&d, nom(&m)), cmp_atom(&a, eq, c, &m), cmp_atom(&d, eq, c, &b)],
            [cmp_atom(&a, eq, c, &b)],
        )?)?
        .rule(Inference::S3 { i: d.clone(), j: m.clone(), k: b.clone(), c: c.clone() })?
        .shrink_to(seq([cmp_atom(&a, eq, c, &m), cmp_atom(&m, eq, c, &b)], [cmp_atom(&a, eq, c, &b)])?)?
        .apply(|g| cmp_b(g, &a, eq, c, &m))?
        .rule(Inference::Eq5 { i: m.clone(), j: a.clone(), k: b.clone(), c: c.clone() })?;
    ch.close_axg(&cmp_atom(&a, eq, c, &b))
}

/// Parameters of the `Paste` translation: from
/// `⊢ @_i((@_j⟨a⟩k ∧ ⟨k:α ▲_c β⟩) → χ)` derive `⊢ @_i(⟨j:aα ▲_c β⟩ → χ)`,
/// where `j` and `k` differ and `k` does not occur in `χ`, `α`, `β`, `i`,
/// `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PasteInstance {
    pub i: Sym,
    pub j: Sym,
    pub k: Sym,
    pub a: Sym,
    pub alpha: PathExpr,
    pub kind: CmpKind,
    pub c: Sym,
    pub beta: PathExpr,
    pub chi: NodeExpr,
}

impl PasteInstance {
    fn rest(&self) -> NodeExpr {
        NodeExpr::and(
            at(&self.j, NodeExpr::Diamond(self.a.clone(), nom(&self.k).into())),
            compare(&PathExpr::concat(PathExpr::Jump(self.k.clone()), self.alpha.clone()), self.kind, &self.c, &self.beta),
        )
    }

    fn long_path(&self) -> PathExpr {
        PathExpr::concat(
            PathExpr::Jump(self.j.clone()),
            PathExpr::concat(PathExpr::Atom(self.a.clone()), self.alpha.clone()),
        )
    }

    fn validate(&self) -> Result<(), KernelError> {
        let mut used = self.chi.nominals();
        used.extend(self.alpha.nominals());
        used.extend(self.beta.nominals());
        used.insert(self.i.clone());
        used.insert(self.j.clone());
        if used.contains(&self.k) {
            return Err(macro_err("Paste", format!("{} is not fresh", self.k)));
        }
        Ok(())
    }
}

/// `⊢ @_i((@_j⟨a⟩k ∧ ⟨k:α ▲_c β⟩) → χ)`.
pub fn paste_assumption(p: &PasteInstance) -> Result<Sequent, KernelError> {
    seq([], [at(&p.i, NodeExpr::implies(p.rest(), p.chi.clone()))])
}

/// `⊢ @_i(⟨j:aα ▲_c β⟩ → χ)`.
pub fn paste_conclusion(p: &PasteInstance) -> Result<Sequent, KernelError> {
    let cmp = compare(&p.long_path(), p.kind, &p.c, &p.beta);
    seq([], [at(&p.i, NodeExpr::implies(cmp, p.chi.clone()))])
}

/// The `Paste` translation with the assumption as its single open leaf.
pub fn paste(p: &PasteInstance) -> Result<Derivation, KernelError> {
    p.validate()?;
    let goal = paste_conclusion(p)?;
    let long = p.long_path();
    let cmp = compare(&long, p.kind, &p.c, &p.beta);
    let mut taken = goal.nominals();
    taken.insert(p.k.clone());
    let x = pick(&mut taken, "x");
    let y = pick(&mut taken, "y");
    let i = &p.i;
    let chi = at(i, p.chi.clone());
    let after_alpha = p.alpha.diamond(nom(&x));
    let mut ch = Chain::new(goal);
    ch.rule(Inference::ImpR { i: i.clone(), lhs: cmp, rhs: p.chi.clone() })?
        .rule(Inference::CmpL {
            i: i.clone(),
            alpha: long.clone(),
            kind: p.kind,
            c: p.c.clone(),
            beta: p.beta.clone(),
            j: x.clone(),
            k: y.clone(),
        })?
        .rule(Inference::AtL {
            j: i.clone(),
            i: p.j.clone(),
            body: NodeExpr::Diamond(p.a.clone(), after_alpha.clone().into()),
        })?
        .rule(Inference::DiaL { i: p.j.clone(), a: p.a.clone(), body: after_alpha.clone(), j: p.k.clone() })?;

    let gamma = ch.cur.clone();
    let rest = at(i, p.rest());
    let jak = at(&p.j, NodeExpr::Diamond(p.a.clone(), nom(&p.k).into()));
    let k_alpha = PathExpr::concat(PathExpr::Jump(p.k.clone()), p.alpha.clone());
    let k_cmp = compare(&k_alpha, p.kind, &p.c, &p.beta);
    let x_y = cmp_atom(&x, p.kind, &p.c, &y);

    let l1 = jak.clone();
    let r1 = k_cmp.clone();
    let intro = and_r(&gamma.with(Side::Right, rest.clone())?, i, &l1, &r1)?;
    let leaves: Vec<Sequent> = intro.open_leaves().into_iter().cloned().collect();

    let mut left1 = Chain::new(leaves[0].clone());
    left1
        .shrink_to(seq([jak.clone()], [at(i, jak.clone())])?)?
        .rule(Inference::AtR { j: i.clone(), i: p.j.clone(), body: NodeExpr::Diamond(p.a.clone(), nom(&p.k).into()) })?;
    let left1 = left1.close_axg(&jak)?;

    let beta_y = path_to(i, &p.beta, &y);
    let lifted = path_to(i, &k_alpha, &x);
    let mut upper = Chain::new(seq([lifted, beta_y.clone(), x_y.clone()], [at(i, k_cmp.clone())])?);
    upper.rule(Inference::CmpR {
        i: i.clone(),
        alpha: k_alpha.clone(),
        kind: p.kind,
        c: p.c.clone(),
        beta: p.beta.clone(),
        j: x.clone(),
        k: y.clone(),
    })?;
    upper.shrink_to(seq([x_y.clone()], [x_y.clone()])?)?;
    let upper = upper.close_axg(&x_y)?;
    let inv_at = Inference::AtL { j: i.clone(), i: p.k.clone(), body: after_alpha.clone() };
    let lowered = invert(&inv_at, &upper)?.remove(0);
    let left2 = lowered.weaken_to(&leaves[1])?;
    let left = intro.plug(vec![left1, left2])?;

    let assumption = Derivation::open(paste_assumption(p)?);
    let inv_imp = Inference::ImpR { i: i.clone(), lhs: p.rest(), rhs: p.chi.clone() };
    let right = invert(&inv_imp, &assumption)?.remove(0);
    debug_assert_eq!(right.conclusion, seq([rest.clone()], [chi])?);

    let cut = Derivation::cut(left, right, &rest)?;
    if cut.conclusion != gamma {
        return Err(macro_err("Paste", format!("cut yields {} instead of {}", cut.conclusion, gamma)));
    }
    ch.close(cut)
}

/// The `Paste` translation with its assumption closed, for `χ` either `⊤` or
/// an implication `φ → φ`.
pub fn paste_closed(p: &PasteInstance) -> Result<Derivation, KernelError> {
    let open = paste(p)?;
    let goal = paste_assumption(p)?;
    let imp = Inference::ImpR { i: p.i.clone(), lhs: p.rest(), rhs: p.chi.clone() };
    let inner = apply_in(&goal, &imp, &Sequent::default())?.remove(0);
    let proof = match &p.chi {
        chi if chi.is_top() => prove_at(&inner.without(Side::Right, &at(&p.i, chi.clone())), &p.i, chi)?,
        NodeExpr::Implies(l, r) if l == r => {
            let ii = Inference::ImpR { i: p.i.clone(), lhs: (**l).clone(), rhs: (**r).clone() };
            let g = apply_in(&inner, &ii, &Sequent::default())?.remove(0);
            Derivation::rule(inner.clone(), ii, vec![axg(&g, &at(&p.i, (**l).clone()))?])?
        }
        _ => return Err(macro_err("Paste", "assumption not closable by a fixed recipe")),
    };
    let closed = Derivation::rule(goal, imp, vec![proof])?;
    open.plug(vec![closed])
}
