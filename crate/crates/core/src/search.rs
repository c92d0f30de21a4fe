//! Bounded backward proof search: invertible rules to saturation, then
//! branching, fresh-nominal and witness rules, with a countermodel fallback.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::derived::{gen_cmp_r, paste_closed, prove_at, reflexivity, symmetry, transitivity, PasteInstance};
use crate::kernel::{apply_rule, path_to, Derivation, Inference, KernelError, RuleId, Sequent, Side};
use crate::model::{find_countermodel, HybridDataModel};
use crate::syntax::{sym, CmpKind, FreshSupply, NodeExpr, PathExpr, Sym, SymKind};

/// Default rule order: non-branching rules, closure rules, ImpL, fresh
/// rules, witness rules.
pub const DEFAULT_PRIORITIES: [RuleId; 17] = [
    RuleId::AtL,
    RuleId::AtR,
    RuleId::ImpR,
    RuleId::NEqL,
    RuleId::NEqR,
    RuleId::AtT,
    RuleId::At5,
    RuleId::S1,
    RuleId::S2,
    RuleId::S3,
    RuleId::EqT,
    RuleId::Eq5,
    RuleId::ImpL,
    RuleId::DiaL,
    RuleId::CmpL,
    RuleId::DiaR,
    RuleId::CmpR,
];

/// Search bounds. `max_depth` bounds the number of ImpL, DiaL and CmpL
/// applications on any branch; the other rules terminate on their own.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_depth: usize,
    pub max_fresh_nominals: usize,
    pub max_steps: usize,
    pub priorities: Vec<RuleId>,
    pub enable_countermodel: bool,
    pub countermodel_nodes: usize,
    /// Only primitive CmpR steps; compound path witnesses need cuts.
    #[serde(default)]
    pub cut_free: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: 12,
            max_fresh_nominals: 6,
            max_steps: 20_000,
            priorities: DEFAULT_PRIORITIES.to_vec(),
            enable_countermodel: true,
            countermodel_nodes: 3,
            cut_free: false,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("rule {0} is not available to search")]
    Unsupported(RuleId),
    #[error("goal is outside the comparison-free fragment: {0}")]
    Fragment(String),
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        for (name, v) in [
            ("max_depth", self.max_depth),
            ("max_fresh_nominals", self.max_fresh_nominals),
            ("max_steps", self.max_steps),
            ("countermodel_nodes", self.countermodel_nodes),
        ] {
            if v == 0 {
                return Err(SearchError::NonPositive(name));
            }
        }
        if let Some(r) = self.priorities.iter().find(|r| !DEFAULT_PRIORITIES.contains(r)) {
            return Err(SearchError::Unsupported(*r));
        }
        Ok(())
    }

    /// The same bounds with the comparison rules removed.
    pub fn without_comparisons(&self) -> SearchConfig {
        let mut cfg = self.clone();
        cfg.priorities.retain(|r| !r.is_comparison_rule());
        cfg
    }
}

/// Why a search ended without an answer.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub steps: usize,
    pub depth_exhausted: bool,
    pub fresh_exhausted: bool,
    pub steps_exhausted: bool,
    pub fresh_used: usize,
    pub open_leaf: Option<Sequent>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub enum SearchResult {
    Proved(Derivation),
    Refuted(HybridDataModel),
    Unknown(SearchReport),
}

impl SearchResult {
    pub fn is_proved(&self) -> bool {
        matches!(self, SearchResult::Proved(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, SearchResult::Refuted(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            SearchResult::Proved(_) => "proved",
            SearchResult::Refuted(_) => "refuted",
            SearchResult::Unknown(_) => "unknown",
        }
    }
}

fn at(i: &Sym, e: NodeExpr) -> NodeExpr {
    NodeExpr::at_sym(i, e)
}

fn nom(i: &Sym) -> NodeExpr {
    NodeExpr::Nominal(i.clone())
}

fn is_ax_shape(e: &NodeExpr) -> bool {
    match e {
        NodeExpr::At(_, b) => matches!(**b, NodeExpr::Prop(_) | NodeExpr::Nominal(_)),
        _ => matches!(e.as_cmp_atom(), Some((_, CmpKind::Eq, _, _))),
    }
}

fn is_s1_body(e: &NodeExpr) -> bool {
    match e {
        NodeExpr::Prop(_) | NodeExpr::Bottom => true,
        NodeExpr::Diamond(_, k) => matches!(**k, NodeExpr::Nominal(_)),
        _ => false,
    }
}

fn closing(s: &Sequent) -> Option<Inference> {
    for e in s.ante() {
        if let NodeExpr::At(i, b) = e {
            if **b == NodeExpr::Bottom {
                return Some(Inference::Bot { i: i.clone() });
            }
        }
    }
    s.ante()
        .iter()
        .find(|e| is_ax_shape(e) && s.contains(Side::Right, e))
        .map(|e| Inference::Ax { formula: e.clone() })
}

/// `@_i j` facts of the antecedent.
fn nominal_facts(s: &Sequent) -> Vec<(Sym, Sym)> {
    s.ante()
        .iter()
        .filter_map(|e| match e {
            NodeExpr::At(i, b) => match &**b {
                NodeExpr::Nominal(j) => Some((i.clone(), j.clone())),
                _ => None,
            },
            _ => None,
        })
        .collect()
}

/// `@_i ⟨a⟩ j` facts of the antecedent.
fn edge_facts(s: &Sequent) -> Vec<(Sym, Sym, Sym)> {
    s.ante()
        .iter()
        .filter_map(|e| match e {
            NodeExpr::At(i, b) => match &**b {
                NodeExpr::Diamond(a, k) => match &**k {
                    NodeExpr::Nominal(j) => Some((i.clone(), a.clone(), j.clone())),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        })
        .collect()
}

/// `⟨i: =_c j:⟩` facts of the antecedent.
fn eq_facts(s: &Sequent) -> Vec<(Sym, Sym, Sym)> {
    s.ante()
        .iter()
        .filter_map(|e| match e.as_cmp_atom() {
            Some((i, CmpKind::Eq, c, j)) => Some((i.clone(), c.clone(), j.clone())),
            _ => None,
        })
        .collect()
}

fn comparison_symbols(s: &Sequent) -> BTreeSet<Sym> {
    let mut out = Vec::new();
    for e in s.formulas() {
        e.collect_symbols(&mut out);
    }
    out.into_iter().filter(|(k, _)| *k == SymKind::Comparison).map(|(_, c)| c).collect()
}

/// Nominals reachable from `i` along `alpha` according to the antecedent.
fn reach(s: &Sequent, i: &Sym, alpha: &PathExpr) -> BTreeSet<Sym> {
    match alpha {
        PathExpr::Atom(a) => edge_facts(s).into_iter().filter(|(x, b, _)| x == i && b == a).map(|(_, _, y)| y).collect(),
        PathExpr::Jump(m) => BTreeSet::from([m.clone()]),
        PathExpr::Test(psi) => {
            if prove_at(s, i, psi).is_ok() {
                BTreeSet::from([i.clone()])
            } else {
                BTreeSet::new()
            }
        }
        PathExpr::Concat(a, b) => reach(s, i, a).iter().flat_map(|x| reach(s, x, b)).collect(),
    }
}

enum Move {
    Linear(Inference),
    Fresh(Inference, usize),
    Branch(Inference),
    Fragment(Derivation),
}

enum Link {
    Rule(Sequent, Inference),
    Fragment(Derivation),
}

struct Prover<'a> {
    cfg: &'a SearchConfig,
    fresh: FreshSupply,
    report: SearchReport,
}

impl Prover<'_> {
    fn linear(&self, rule: RuleId, s: &Sequent) -> Option<Inference> {
        let new_left = |e: &NodeExpr| !s.contains(Side::Left, e);
        match rule {
            RuleId::AtL | RuleId::AtR => {
                let side = if rule == RuleId::AtL { s.ante() } else { s.succ() };
                side.iter().find_map(|e| match e {
                    NodeExpr::At(j, b) => match &**b {
                        NodeExpr::At(i, body) => {
                            let (j, i, body) = (j.clone(), i.clone(), (**body).clone());
                            Some(if rule == RuleId::AtL { Inference::AtL { j, i, body } } else { Inference::AtR { j, i, body } })
                        }
                        _ => None,
                    },
                    _ => None,
                })
            }
            RuleId::ImpR => s.succ().iter().find_map(|e| match e {
                NodeExpr::At(i, b) => match &**b {
                    NodeExpr::Implies(l, r) => Some(Inference::ImpR { i: i.clone(), lhs: (**l).clone(), rhs: (**r).clone() }),
                    _ => None,
                },
                _ => None,
            }),
            RuleId::NEqL | RuleId::NEqR => {
                let side = if rule == RuleId::NEqL { s.ante() } else { s.succ() };
                side.iter().find_map(|e| match e.as_cmp_atom() {
                    Some((i, CmpKind::Neq, c, j)) => {
                        let (i, j, c) = (i.clone(), j.clone(), c.clone());
                        Some(if rule == RuleId::NEqL { Inference::NEqL { i, j, c } } else { Inference::NEqR { i, j, c } })
                    }
                    _ => None,
                })
            }
            RuleId::AtT => s.nominals().into_iter().find(|i| new_left(&at(i, nom(i)))).map(|i| Inference::AtT { i }),
            RuleId::At5 => {
                let facts = nominal_facts(s);
                facts.iter().find_map(|(i, j)| {
                    facts.iter().find(|(i2, k)| i2 == i && new_left(&at(j, nom(k)))).map(|(_, k)| Inference::At5 {
                        i: i.clone(),
                        j: j.clone(),
                        k: k.clone(),
                    })
                })
            }
            RuleId::S1 => nominal_facts(s).into_iter().find_map(|(i, j)| {
                s.ante().iter().find_map(|e| match e {
                    NodeExpr::At(x, body) if *x == i && is_s1_body(body) && new_left(&at(&j, (**body).clone())) => {
                        Some(Inference::S1 { i: i.clone(), j: j.clone(), body: (**body).clone() })
                    }
                    _ => None,
                })
            }),
            RuleId::S2 => {
                let noms = nominal_facts(s);
                edge_facts(s).into_iter().find_map(|(i, a, j)| {
                    noms.iter()
                        .find(|(j2, k)| *j2 == j && new_left(&at(&i, NodeExpr::Diamond(a.clone(), nom(k).into()))))
                        .map(|(_, k)| Inference::S2 { i: i.clone(), j: j.clone(), k: k.clone(), a: a.clone() })
                })
            }
            RuleId::S3 => {
                let eqs = eq_facts(s);
                nominal_facts(s).into_iter().find_map(|(i, j)| {
                    eqs.iter()
                        .find(|(i2, c, k)| *i2 == i && new_left(&NodeExpr::cmp_atom(&j, CmpKind::Eq, c, k)))
                        .map(|(_, c, k)| Inference::S3 { i: i.clone(), j: j.clone(), k: k.clone(), c: c.clone() })
                })
            }
            RuleId::EqT => {
                let cs = comparison_symbols(s);
                s.nominals().into_iter().find_map(|i| {
                    cs.iter()
                        .find(|c| new_left(&NodeExpr::cmp_atom(&i, CmpKind::Eq, c, &i)))
                        .map(|c| Inference::EqT { i: i.clone(), c: c.clone() })
                })
            }
            RuleId::Eq5 => {
                let eqs = eq_facts(s);
                eqs.iter().find_map(|(i, c, j)| {
                    eqs.iter()
                        .find(|(i2, c2, k)| i2 == i && c2 == c && new_left(&NodeExpr::cmp_atom(j, CmpKind::Eq, c, k)))
                        .map(|(_, _, k)| Inference::Eq5 { i: i.clone(), j: j.clone(), k: k.clone(), c: c.clone() })
                })
            }
            _ => None,
        }
    }

    fn imp_left(s: &Sequent) -> Option<Inference> {
        s.ante().iter().find_map(|e| match e {
            NodeExpr::At(i, b) => match &**b {
                NodeExpr::Implies(l, r) => Some(Inference::ImpL { i: i.clone(), lhs: (**l).clone(), rhs: (**r).clone() }),
                _ => None,
            },
            _ => None,
        })
    }

    /// The left diamond or comparison to decompose next, with the number of
    /// fresh nominals it needs.
    fn fresh_target(rule: RuleId, s: &Sequent) -> Option<(NodeExpr, usize)> {
        s.ante().iter().find_map(|e| match (rule, e) {
            (RuleId::DiaL, NodeExpr::At(_, b)) => match &**b {
                NodeExpr::Diamond(_, body) if !matches!(**body, NodeExpr::Nominal(_)) => Some((e.clone(), 1)),
                _ => None,
            },
            (RuleId::CmpL, NodeExpr::At(_, b)) => match &**b {
                NodeExpr::Compare(..) => Some((e.clone(), 2)),
                _ => None,
            },
            _ => None,
        })
    }

    fn instantiate_fresh(&mut self, e: &NodeExpr) -> Inference {
        let NodeExpr::At(i, b) = e else { unreachable!("fresh targets are @-formulas") };
        match &**b {
            NodeExpr::Diamond(a, body) => {
                Inference::DiaL { i: i.clone(), a: a.clone(), body: (**body).clone(), j: self.fresh.fresh() }
            }
            NodeExpr::Compare(alpha, kind, c, beta) => Inference::CmpL {
                i: i.clone(),
                alpha: (**alpha).clone(),
                kind: *kind,
                c: c.clone(),
                beta: (**beta).clone(),
                j: self.fresh.fresh(),
                k: self.fresh.fresh(),
            },
            _ => unreachable!("fresh targets are diamonds or comparisons"),
        }
    }

    fn witness(&self, rule: RuleId, s: &Sequent) -> Option<Move> {
        let edges = edge_facts(s);
        for e in s.succ() {
            let NodeExpr::At(i, b) = e else { continue };
            match (rule, &**b) {
                (RuleId::DiaR, NodeExpr::Diamond(a, body)) => {
                    for (x, a2, j) in &edges {
                        if x == i && a2 == a && !s.contains(Side::Right, &at(j, (**body).clone())) {
                            return Some(Move::Linear(Inference::DiaR {
                                i: i.clone(),
                                a: a.clone(),
                                body: (**body).clone(),
                                j: j.clone(),
                            }));
                        }
                    }
                }
                (RuleId::CmpR, NodeExpr::Compare(alpha, kind, c, beta)) => {
                    let ends_b = reach(s, i, beta);
                    for j in reach(s, i, alpha) {
                        for k in &ends_b {
                            if s.contains(Side::Right, &NodeExpr::cmp_atom(&j, *kind, c, k)) {
                                continue;
                            }
                            let inf = Inference::CmpR {
                                i: i.clone(),
                                alpha: (**alpha).clone(),
                                kind: *kind,
                                c: c.clone(),
                                beta: (**beta).clone(),
                                j: j.clone(),
                                k: k.clone(),
                            };
                            if s.contains(Side::Left, &path_to(i, alpha, &j)) && s.contains(Side::Left, &path_to(i, beta, k)) {
                                return Some(Move::Linear(inf));
                            }
                            if self.cfg.cut_free {
                                continue;
                            }
                            if let Ok(d) = gen_cmp_r(s, i, alpha, *kind, c, beta, &j, k) {
                                return Some(Move::Fragment(d));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        None
    }

    fn search(&mut self, goal: Sequent, mut depth: usize, mut fresh_used: usize) -> Option<Derivation> {
        let mut chain: Vec<Link> = Vec::new();
        let mut cur = goal;
        let leaf = loop {
            if self.report.steps >= self.cfg.max_steps {
                self.report.steps_exhausted = true;
                return None;
            }
            if let Some(inf) = closing(&cur) {
                break Derivation::rule(cur, inf, vec![]).ok()?;
            }
            let mut blocked = false;
            let mut next = None;
            for &rule in &self.cfg.priorities {
                match rule {
                    RuleId::ImpL => {
                        if let Some(inf) = Self::imp_left(&cur) {
                            if depth == 0 {
                                self.report.depth_exhausted = true;
                                blocked = true;
                                continue;
                            }
                            next = Some(Move::Branch(inf));
                        }
                    }
                    RuleId::DiaL | RuleId::CmpL => {
                        if let Some((e, n)) = Self::fresh_target(rule, &cur) {
                            if depth == 0 {
                                self.report.depth_exhausted = true;
                                blocked = true;
                                continue;
                            }
                            if fresh_used + n > self.cfg.max_fresh_nominals {
                                self.report.fresh_exhausted = true;
                                blocked = true;
                                continue;
                            }
                            next = Some(Move::Fresh(self.instantiate_fresh(&e), n));
                        }
                    }
                    RuleId::DiaR | RuleId::CmpR => next = self.witness(rule, &cur),
                    _ => next = self.linear(rule, &cur).map(Move::Linear),
                }
                if next.is_some() {
                    break;
                }
            }
            self.report.steps += 1;
            match next {
                None => {
                    if !blocked && self.report.open_leaf.is_none() {
                        self.report.open_leaf = Some(cur);
                    }
                    return None;
                }
                Some(Move::Linear(inf)) => {
                    let p = apply_rule(&cur, &inf).ok()?.remove(0);
                    chain.push(Link::Rule(cur, inf));
                    cur = p;
                }
                Some(Move::Fresh(inf, n)) => {
                    let p = apply_rule(&cur, &inf).ok()?.remove(0);
                    chain.push(Link::Rule(cur, inf));
                    cur = p;
                    depth -= 1;
                    fresh_used += n;
                    self.report.fresh_used = self.report.fresh_used.max(fresh_used);
                }
                Some(Move::Fragment(d)) => {
                    let p = d.open_leaves()[0].clone();
                    chain.push(Link::Fragment(d));
                    cur = p;
                }
                Some(Move::Branch(inf)) => {
                    let ps = apply_rule(&cur, &inf).ok()?;
                    let mut kids = Vec::with_capacity(ps.len());
                    for p in ps {
                        kids.push(self.search(p, depth - 1, fresh_used)?);
                    }
                    break Derivation::rule(cur, inf, kids).ok()?;
                }
            }
        };
        let mut d = leaf;
        while let Some(link) = chain.pop() {
            d = match link {
                Link::Rule(s, inf) => Derivation::rule(s, inf, vec![d]).ok()?,
                Link::Fragment(f) => f.plug(vec![d]).ok()?,
            };
        }
        Some(d)
    }
}

/// Disjoint-set forest over a fixed universe.
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra.max(rb)] = ra.min(rb);
    }
}

/// The model read off an open saturated branch: nominals identified by their
/// `@_i j` facts, relations, valuation and comparisons from the atomic facts.
pub fn branch_model(goal: &Sequent, leaf: &Sequent) -> Option<HybridDataModel> {
    let noms: Vec<Sym> = goal.nominals().union(&leaf.nominals()).cloned().collect();
    let idx = |x: &Sym| noms.binary_search(x).ok();
    let mut uf = UnionFind::new(noms.len().max(1));
    for (i, j) in nominal_facts(leaf) {
        uf.union(idx(&i)?, idx(&j)?);
    }
    let mut node_of = BTreeMap::new();
    for n in 0..noms.len() {
        let r = uf.find(n);
        let next = node_of.len();
        node_of.entry(r).or_insert(next);
    }
    let size = node_of.len().max(1);
    let mut m = HybridDataModel::with_size(size).ok()?;
    let mut node = |x: &Sym| -> Option<usize> {
        let r = uf.find(idx(x)?);
        node_of.get(&r).copied()
    };
    for x in &noms {
        let n = node(x)?;
        m.assign(x, n).ok()?;
    }
    for (i, a, j) in edge_facts(leaf) {
        let (f, t) = (node(&i)?, node(&j)?);
        m.add_edge(&a, f, t).ok()?;
    }
    for e in leaf.ante() {
        if let NodeExpr::At(i, b) = e {
            if let NodeExpr::Prop(p) = &**b {
                let n = node(i)?;
                m.set_true(p, n).ok()?;
            }
        }
    }
    for c in comparison_symbols(goal).union(&comparison_symbols(leaf)) {
        let mut cuf = UnionFind::new(size);
        for (i, c2, j) in eq_facts(leaf) {
            if &c2 == c {
                cuf.union(node(&i)?, node(&j)?);
            }
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for n in 0..size {
            classes.entry(cuf.find(n)).or_default().push(n);
        }
        let classes: Vec<Vec<usize>> = classes.into_values().collect();
        m.set_partition(c, &classes).ok()?;
    }
    match m.check_sequent_validity(goal) {
        Ok(false) => Some(m),
        _ => None,
    }
}

/// Searches for a derivation of `goal`; on failure looks for a countermodel
/// from the open branch and then by enumeration.
pub fn prove(goal: &Sequent, cfg: &SearchConfig) -> SearchResult {
    if let Err(e) = cfg.validate() {
        return SearchResult::Unknown(SearchReport { error: Some(e.to_string()), ..SearchReport::default() });
    }
    let mut p = Prover { cfg, fresh: FreshSupply::avoiding(goal.nominals()), report: SearchReport::default() };
    if let Some(d) = p.search(goal.clone(), cfg.max_depth, 0) {
        return SearchResult::Proved(d);
    }
    if cfg.enable_countermodel {
        if let Some(m) = p.report.open_leaf.as_ref().and_then(|leaf| branch_model(goal, leaf)) {
            return SearchResult::Refuted(m);
        }
        if let Some(m) = find_countermodel(goal, cfg.countermodel_nodes) {
            return SearchResult::Refuted(m);
        }
    }
    SearchResult::Unknown(p.report)
}

/// Default Paste instance: `χ = ⊤`, `α = b`, `β = e`, modality `a`.
pub fn default_paste_instance() -> PasteInstance {
    PasteInstance {
        i: sym("i"),
        j: sym("j"),
        k: sym("k"),
        a: sym("a"),
        alpha: PathExpr::atom("b"),
        kind: CmpKind::Eq,
        c: sym("c"),
        beta: PathExpr::atom("e"),
        chi: NodeExpr::top(),
    }
}

/// The golden derivations by name: reflexivity, symmetry, transitivity, a
/// closed Paste instance and a closed Nom2 instance.
pub fn prove_axiom_suite() -> Result<BTreeMap<&'static str, Derivation>, KernelError> {
    let (i, c) = (sym("i"), sym("c"));
    let (a, b) = (PathExpr::atom("a"), PathExpr::atom("b"));
    let mut out = BTreeMap::new();
    out.insert("reflexivity", reflexivity(&i, &c)?);
    out.insert("symmetry", symmetry(&i, &a, CmpKind::Eq, &c, &b)?);
    out.insert("transitivity", transitivity(&i, &a, &c, &b)?);
    out.insert("paste", paste_closed(&default_paste_instance())?);
    out.insert("nom2", crate::hylo::nom2_closed()?);
    Ok(out)
}

/// Premiss derivations of the rule `rule`, instantiated by `inf`, from a
/// derivation of its conclusion.
pub fn invert(rule: RuleId, d: &Derivation, inf: &Inference) -> Result<Vec<Derivation>, KernelError> {
    if inf.rule() != rule {
        return Err(KernelError::Macro {
            name: "Invert".into(),
            reason: format!("instance is for {}, not {rule}", inf.rule()),
        });
    }
    crate::derived::invert(inf, d)
}
