//! Random expressions, sequents and models over a fixed signature, and
//! provable sequents generated forward through the kernel.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::derived::axg;
use crate::kernel::{apply_rule, Derivation, Inference, Sequent, Side};
use crate::model::HybridDataModel;
use crate::syntax::{sym, CmpKind, FreshSupply, NodeExpr, PathExpr, Sym};

/// The symbols random expressions are drawn from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub props: Vec<Sym>,
    pub nominals: Vec<Sym>,
    pub modalities: Vec<Sym>,
    pub comparisons: Vec<Sym>,
}

impl Signature {
    pub fn new(props: &[&str], nominals: &[&str], modalities: &[&str], comparisons: &[&str]) -> Signature {
        let v = |xs: &[&str]| xs.iter().map(sym).collect();
        Signature {
            props: v(props),
            nominals: v(nominals),
            modalities: v(modalities),
            comparisons: v(comparisons),
        }
    }

    /// Two propositions, three nominals, one modality, one comparison.
    pub fn small() -> Signature {
        Signature::new(&["p", "q"], &["i", "j", "k"], &["a"], &["c"])
    }

    /// [`Signature::small`] without comparisons.
    pub fn small_hylo() -> Signature {
        Signature::new(&["p", "q"], &["i", "j", "k"], &["a"], &[])
    }

    fn pick<R: Rng>(rng: &mut R, xs: &[Sym]) -> Sym {
        xs.choose(rng).expect("signature component is non-empty").clone()
    }

    fn has_comparisons(&self) -> bool {
        !self.comparisons.is_empty()
    }
}

fn kind<R: Rng>(rng: &mut R) -> CmpKind {
    if rng.gen_bool(0.5) {
        CmpKind::Eq
    } else {
        CmpKind::Neq
    }
}

fn leaf<R: Rng>(rng: &mut R, sig: &Signature) -> NodeExpr {
    match rng.gen_range(0..20) {
        0 => NodeExpr::Bottom,
        1 | 2 => NodeExpr::top(),
        3..=9 => NodeExpr::Nominal(Signature::pick(rng, &sig.nominals)),
        _ => NodeExpr::Prop(Signature::pick(rng, &sig.props)),
    }
}

/// A random node expression of nesting depth at most `depth`.
pub fn random_node<R: Rng>(rng: &mut R, sig: &Signature, depth: usize) -> NodeExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng, sig);
    }
    let d = depth - 1;
    let choices = if sig.has_comparisons() { 9 } else { 8 };
    match rng.gen_range(0..choices) {
        0 => NodeExpr::not(random_node(rng, sig, d)),
        1 => NodeExpr::implies(random_node(rng, sig, d), random_node(rng, sig, d)),
        2 => NodeExpr::and(random_node(rng, sig, d), random_node(rng, sig, d)),
        3 => NodeExpr::or(random_node(rng, sig, d), random_node(rng, sig, d)),
        4 => NodeExpr::at_sym(&Signature::pick(rng, &sig.nominals), random_node(rng, sig, d)),
        5 | 6 => NodeExpr::Diamond(Signature::pick(rng, &sig.modalities), random_node(rng, sig, d).into()),
        7 => NodeExpr::boxed(&PathExpr::Atom(Signature::pick(rng, &sig.modalities)), random_node(rng, sig, d)),
        _ => {
            let c = Signature::pick(rng, &sig.comparisons);
            NodeExpr::compare(random_path(rng, sig, d), kind(rng), c, random_path(rng, sig, d))
        }
    }
}

/// A random path expression of nesting depth at most `depth`.
pub fn random_path<R: Rng>(rng: &mut R, sig: &Signature, depth: usize) -> PathExpr {
    let top = if depth == 0 { 3 } else { 5 };
    match rng.gen_range(0..top) {
        0 | 1 => PathExpr::Atom(Signature::pick(rng, &sig.modalities)),
        2 => PathExpr::Jump(Signature::pick(rng, &sig.nominals)),
        3 => PathExpr::test(random_node(rng, sig, depth - 1)),
        _ => PathExpr::concat(random_path(rng, sig, depth - 1), random_path(rng, sig, depth - 1)),
    }
}

/// `@_i φ` with random `i` and `φ`, or an atomic comparison.
pub fn random_restricted<R: Rng>(rng: &mut R, sig: &Signature, depth: usize) -> NodeExpr {
    if sig.has_comparisons() && rng.gen_bool(0.15) {
        let (i, j) = (Signature::pick(rng, &sig.nominals), Signature::pick(rng, &sig.nominals));
        return NodeExpr::cmp_atom(&i, kind(rng), &Signature::pick(rng, &sig.comparisons), &j);
    }
    NodeExpr::at_sym(&Signature::pick(rng, &sig.nominals), random_node(rng, sig, depth))
}

/// A sequent with up to `max_side` expressions on each side and at least
/// one succedent.
pub fn random_sequent<R: Rng>(rng: &mut R, sig: &Signature, depth: usize, max_side: usize) -> Sequent {
    let nl = rng.gen_range(0..=max_side);
    let nr = rng.gen_range(1..=max_side.max(1));
    let ante: Vec<NodeExpr> = (0..nl).map(|_| random_restricted(rng, sig, depth)).collect();
    let succ: Vec<NodeExpr> = (0..nr).map(|_| random_restricted(rng, sig, depth)).collect();
    Sequent::new(ante, succ).expect("restricted expressions")
}

/// A random model of 1 to `max_nodes` nodes interpreting the signature and
/// assigning every nominal in `extra`.
pub fn random_model<'a, R: Rng>(
    rng: &mut R,
    sig: &Signature,
    max_nodes: usize,
    extra: impl IntoIterator<Item = &'a Sym>,
) -> HybridDataModel {
    let n = rng.gen_range(1..=max_nodes.max(1));
    let mut m = HybridDataModel::with_size(n).expect("non-empty");
    let edge_p = rng.gen_range(0.1..0.6);
    for a in &sig.modalities {
        m.declare_relation(a);
        for x in 0..n {
            for y in 0..n {
                if rng.gen_bool(edge_p) {
                    m.add_edge(a, x, y).expect("in range");
                }
            }
        }
    }
    for c in &sig.comparisons {
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let classes: Vec<Vec<usize>> =
            (0..n).map(|l| (0..n).filter(|x| labels[*x] == l).collect::<Vec<_>>()).filter(|c| !c.is_empty()).collect();
        m.set_partition(c, &classes).expect("partition");
    }
    for p in &sig.props {
        m.declare_prop(p);
        for x in 0..n {
            if rng.gen_bool(0.5) {
                m.set_true(p, x).expect("in range");
            }
        }
    }
    let mut noms: BTreeSet<Sym> = sig.nominals.iter().cloned().collect();
    noms.extend(extra.into_iter().cloned());
    for i in &noms {
        m.assign(i, rng.gen_range(0..n)).expect("in range");
    }
    m
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

/// Forward generator of closed derivations.
pub struct ProofGen<'a, R: Rng> {
    rng: &'a mut R,
    sig: &'a Signature,
    depth: usize,
    max_width: usize,
    fresh: FreshSupply,
}

impl<'a, R: Rng> ProofGen<'a, R> {
    pub fn new(rng: &'a mut R, sig: &'a Signature, depth: usize) -> Self {
        ProofGen { rng, sig, depth, max_width: 7, fresh: FreshSupply::avoiding(sig.nominals.iter().cloned()) }
    }

    fn nominal(&mut self) -> Sym {
        Signature::pick(self.rng, &self.sig.nominals)
    }

    fn restricted(&mut self) -> NodeExpr {
        random_restricted(self.rng, self.sig, self.depth)
    }

    fn context(&mut self) -> Vec<NodeExpr> {
        let n = self.rng.gen_range(0..=2);
        (0..n).map(|_| self.restricted()).collect()
    }

    /// An axiom, a falsum leaf or a generalized axiom in a random context.
    pub fn leaf(&mut self) -> Derivation {
        loop {
            let (l, r) = (self.context(), self.context());
            let i = self.nominal();
            let (phi, inf) = match self.rng.gen_range(0..5) {
                0 => {
                    let e = at(&i, NodeExpr::Bottom);
                    (e, Some(Inference::Bot { i }))
                }
                1 => {
                    let e = at(&i, NodeExpr::Prop(Signature::pick(self.rng, &self.sig.props)));
                    (e.clone(), Some(Inference::Ax { formula: e }))
                }
                2 => {
                    let e = at(&i, nom(&self.nominal()));
                    (e.clone(), Some(Inference::Ax { formula: e }))
                }
                _ => (self.restricted(), None),
            };
            let mut ante = l.clone();
            ante.push(phi.clone());
            let mut succ = r.clone();
            if !matches!(inf, Some(Inference::Bot { .. })) {
                succ.push(phi.clone());
            }
            let Ok(goal) = Sequent::new(ante, succ) else { continue };
            let d = match inf {
                Some(inf) => Derivation::rule(goal, inf, vec![]),
                None => axg(&goal, &phi),
            };
            if let Ok(d) = d {
                return d;
            }
        }
    }

    fn width(s: &Sequent) -> usize {
        s.ante().len() + s.succ().len()
    }

    fn pick_side(&mut self, s: &Sequent, side: Side) -> Option<NodeExpr> {
        let xs: Vec<&NodeExpr> = s.side(side).iter().collect();
        xs.choose(self.rng).map(|e| (*e).clone())
    }

    /// Applies `inf` at `concl` over `subs`, weakening each into its
    /// premiss; the result is kernel-checked.
    fn over(concl: Sequent, inf: Inference, subs: Vec<Derivation>) -> Option<Derivation> {
        let ps = apply_rule(&concl, &inf).ok()?;
        if ps.len() != subs.len() {
            return None;
        }
        let kids = subs.into_iter().zip(&ps).map(|(d, p)| d.weaken_to(p).ok()).collect::<Option<Vec<_>>>()?;
        Derivation::rule(concl, inf, kids).ok()
    }

    /// One forward step from `d`, drawing on `other` for binary rules.
    fn extend(&mut self, d: &Derivation, other: &Derivation) -> Option<Derivation> {
        let s = d.conclusion.clone();
        match self.rng.gen_range(0..14) {
            0 | 1 => {
                if Self::width(&s) >= self.max_width {
                    return None;
                }
                let side = if self.rng.gen_bool(0.5) { Side::Left } else { Side::Right };
                d.clone().weaken(side, self.restricted()).ok()
            }
            2 | 3 => {
                let (i, a) = match self.pick_side(&s, Side::Left) {
                    Some(NodeExpr::At(i, a)) => (i, (*a).clone()),
                    _ => (self.nominal(), random_node(self.rng, self.sig, 1)),
                };
                let b = match self.pick_side(&s, Side::Right) {
                    Some(NodeExpr::At(i2, b)) if i2 == i => (*b).clone(),
                    _ => random_node(self.rng, self.sig, 1),
                };
                let concl = s
                    .without(Side::Left, &at(&i, a.clone()))
                    .without(Side::Right, &at(&i, b.clone()))
                    .with(Side::Right, at(&i, NodeExpr::implies(a.clone(), b.clone())))
                    .ok()?;
                Self::over(concl, Inference::ImpR { i, lhs: a, rhs: b }, vec![d.clone()])
            }
            4 => {
                let Some(NodeExpr::At(i, a)) = self.pick_side(&s, Side::Right) else { return None };
                let Some(NodeExpr::At(i2, b)) = self.pick_side(&other.conclusion, Side::Left) else { return None };
                if i != i2 {
                    return None;
                }
                let (a, b) = ((*a).clone(), (*b).clone());
                let concl = s
                    .without(Side::Right, &at(&i, a.clone()))
                    .union(&other.conclusion.without(Side::Left, &at(&i, b.clone())))
                    .with(Side::Left, at(&i, NodeExpr::implies(a.clone(), b.clone())))
                    .ok()?;
                if Self::width(&concl) > self.max_width + 2 {
                    return None;
                }
                Self::over(concl, Inference::ImpL { i, lhs: a, rhs: b }, vec![d.clone(), other.clone()])
            }
            5 | 6 => {
                let side = if self.rng.gen_bool(0.5) { Side::Left } else { Side::Right };
                let Some(NodeExpr::At(i, body)) = self.pick_side(&s, side) else { return None };
                let j = self.nominal();
                let body = (*body).clone();
                let concl = s.without(side, &at(&i, body.clone())).with(side, at(&j, at(&i, body.clone()))).ok()?;
                let inf = match side {
                    Side::Left => Inference::AtL { j, i, body },
                    Side::Right => Inference::AtR { j, i, body },
                };
                Self::over(concl, inf, vec![d.clone()])
            }
            7 => {
                let Some(NodeExpr::At(j, body)) = self.pick_side(&s, Side::Left) else { return None };
                let (i, a) = (self.nominal(), Signature::pick(self.rng, &self.sig.modalities));
                let m = self.fresh.fresh();
                let body = (*body).clone();
                let renamed = d.rename_nominal(&j, &m).ok()?;
                let rs = &renamed.conclusion;
                let concl = rs
                    .without(Side::Left, &at(&m, body.rename_nominal(&j, &m)))
                    .with(Side::Left, at(&i, dia(&a, body.rename_nominal(&j, &m))))
                    .ok()?;
                if concl.nominals().contains(&m) {
                    return None;
                }
                let inf = Inference::DiaL { i, a, body: body.rename_nominal(&j, &m), j: m };
                Self::over(concl, inf, vec![renamed])
            }
            8 => {
                let Some(NodeExpr::At(j, body)) = self.pick_side(&s, Side::Right) else { return None };
                let (i, a) = (self.nominal(), Signature::pick(self.rng, &self.sig.modalities));
                let body = (*body).clone();
                let concl = s
                    .without(Side::Right, &at(&j, body.clone()))
                    .with(Side::Right, at(&i, dia(&a, body.clone())))
                    .ok()?
                    .with(Side::Left, at(&i, dia(&a, nom(&j))))
                    .ok()?;
                Self::over(concl, Inference::DiaR { i, a, body, j }, vec![d.clone()])
            }
            9 => {
                if !self.sig.has_comparisons() {
                    return None;
                }
                let (i, x, y) = (self.nominal(), self.fresh.fresh(), self.fresh.fresh());
                let alpha = random_path(self.rng, self.sig, 1);
                let beta = random_path(self.rng, self.sig, 1);
                let (k, c) = (kind(self.rng), Signature::pick(self.rng, &self.sig.comparisons));
                let concl = s.with(Side::Left, at(&i, NodeExpr::compare(alpha.clone(), k, &*c, beta.clone()))).ok()?;
                let inf = Inference::CmpL { i, alpha, kind: k, c, beta, j: x, k: y };
                Self::over(concl, inf, vec![d.clone()])
            }
            10 => {
                if !self.sig.has_comparisons() {
                    return None;
                }
                let Some(e) = self.pick_side(&s, Side::Right) else { return None };
                let (j, k, c, kd) = match e.as_cmp_atom() {
                    Some((j, kd, c, k)) => (j.clone(), k.clone(), c.clone(), kd),
                    None => return None,
                };
                let i = self.nominal();
                let (a, b) = (Signature::pick(self.rng, &self.sig.modalities), Signature::pick(self.rng, &self.sig.modalities));
                let (alpha, beta) = (PathExpr::Atom(a.clone()), PathExpr::Atom(b.clone()));
                let concl = s
                    .without(Side::Right, &e)
                    .with(Side::Right, at(&i, NodeExpr::compare(alpha.clone(), kd, &*c, beta.clone())))
                    .ok()?
                    .with(Side::Left, at(&i, dia(&a, nom(&j))))
                    .ok()?
                    .with(Side::Left, at(&i, dia(&b, nom(&k))))
                    .ok()?;
                Self::over(concl, Inference::CmpR { i, alpha, kind: kd, c, beta, j, k }, vec![d.clone()])
            }
            11 => {
                let side = if self.rng.gen_bool(0.5) { Side::Left } else { Side::Right };
                let Some(e) = self.pick_side(&s, side.opposite()) else { return None };
                let Some((i, CmpKind::Eq, c, j)) = e.as_cmp_atom() else { return None };
                let (i, c, j) = (i.clone(), c.clone(), j.clone());
                let concl = s.without(side.opposite(), &e).with(side, NodeExpr::cmp_atom(&i, CmpKind::Neq, &c, &j)).ok()?;
                let inf = match side {
                    Side::Left => Inference::NEqL { i, j, c },
                    Side::Right => Inference::NEqR { i, j, c },
                };
                Self::over(concl, inf, vec![d.clone()])
            }
            _ => self.close_up(d),
        }
    }

    /// Removes an antecedent fact by a closure rule that adds it, adding the
    /// rule's principals to the conclusion.
    fn close_up(&mut self, d: &Derivation) -> Option<Derivation> {
        let s = &d.conclusion;
        let x = self.pick_side(s, Side::Left)?;
        let concl = s.without(Side::Left, &x);
        let noms: Vec<Sym> = s.nominals().into_iter().collect();
        let mut candidates: Vec<Inference> = Vec::new();
        match (&x, x.as_cmp_atom()) {
            (_, Some((j, CmpKind::Eq, c, k))) => {
                if j == k {
                    candidates.push(Inference::EqT { i: j.clone(), c: c.clone() });
                }
                for i in &noms {
                    candidates.push(Inference::Eq5 { i: i.clone(), j: j.clone(), k: k.clone(), c: c.clone() });
                    candidates.push(Inference::S3 { i: i.clone(), j: j.clone(), k: k.clone(), c: c.clone() });
                }
            }
            (NodeExpr::At(i, b), _) => match &**b {
                NodeExpr::Nominal(k) => {
                    if i == k {
                        candidates.push(Inference::AtT { i: i.clone() });
                    }
                    for h in &noms {
                        candidates.push(Inference::At5 { i: h.clone(), j: i.clone(), k: k.clone() });
                    }
                }
                NodeExpr::Diamond(a, t) => {
                    if let NodeExpr::Nominal(k) = &**t {
                        for j in &noms {
                            candidates.push(Inference::S2 { i: i.clone(), j: j.clone(), k: k.clone(), a: a.clone() });
                        }
                    }
                    for h in &noms {
                        candidates.push(Inference::S1 { i: h.clone(), j: i.clone(), body: (**b).clone() });
                    }
                }
                _ => {
                    for h in &noms {
                        candidates.push(Inference::S1 { i: h.clone(), j: i.clone(), body: (**b).clone() });
                    }
                }
            },
            _ => {}
        }
        candidates.shuffle(self.rng);
        let inf = candidates.into_iter().next()?;
        let mut with_principals = concl;
        for (side, e) in inf.principal() {
            with_principals = with_principals.with(side, e).ok()?;
        }
        if Self::width(&with_principals) > self.max_width + 2 {
            return None;
        }
        Self::over(with_principals, inf, vec![d.clone()])
    }

    /// A closed derivation built by `steps` forward rule applications over a
    /// small pool of leaves.
    pub fn derivation(&mut self, steps: usize) -> Derivation {
        let mut pool: Vec<Derivation> = (0..3).map(|_| self.leaf()).collect();
        for _ in 0..steps {
            let a = self.rng.gen_range(0..pool.len());
            let b = self.rng.gen_range(0..pool.len());
            if let Some(d) = self.extend(&pool[a], &pool[b].clone()) {
                pool[a] = d;
            }
        }
        pool.swap_remove(self.rng.gen_range(0..pool.len()))
    }
}
