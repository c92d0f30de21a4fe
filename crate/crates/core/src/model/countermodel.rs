use std::collections::BTreeMap;

use super::{HybridDataModel, ModelError};
use crate::kernel::Sequent;
use crate::syntax::{CmpKind, NodeExpr, PathExpr, Sym};

/// Largest node count the enumerator handles; larger bounds are clamped.
pub const MAX_ENUM_NODES: usize = 8;

type Mask = u8;
type Rows = [Mask; MAX_ENUM_NODES];

#[derive(Default)]
struct Symbols {
    props: BTreeMap<Sym, usize>,
    noms: BTreeMap<Sym, usize>,
    mods: BTreeMap<Sym, usize>,
    cmps: BTreeMap<Sym, usize>,
}

fn intern(map: &mut BTreeMap<Sym, usize>, s: &Sym) -> usize {
    let next = map.len();
    *map.entry(s.clone()).or_insert(next)
}

enum CNode {
    Prop(usize),
    Nom(usize),
    Bot,
    Imp(Box<CNode>, Box<CNode>),
    At(usize, Box<CNode>),
    Dia(usize, Box<CNode>),
    Cmp(Box<CPath>, CmpKind, usize, Box<CPath>),
}

enum CPath {
    Atom(usize),
    Jump(usize),
    Test(Box<CNode>),
    Concat(Box<CPath>, Box<CPath>),
}

fn compile_node(e: &NodeExpr, t: &mut Symbols) -> CNode {
    match e {
        NodeExpr::Prop(p) => CNode::Prop(intern(&mut t.props, p)),
        NodeExpr::Nominal(i) => CNode::Nom(intern(&mut t.noms, i)),
        NodeExpr::Bottom => CNode::Bot,
        NodeExpr::Implies(a, b) => CNode::Imp(Box::new(compile_node(a, t)), Box::new(compile_node(b, t))),
        NodeExpr::At(i, b) => {
            let i = intern(&mut t.noms, i);
            CNode::At(i, Box::new(compile_node(b, t)))
        }
        NodeExpr::Diamond(a, b) => {
            let a = intern(&mut t.mods, a);
            CNode::Dia(a, Box::new(compile_node(b, t)))
        }
        NodeExpr::Compare(a, kind, c, b) => {
            let c = intern(&mut t.cmps, c);
            CNode::Cmp(Box::new(compile_path(a, t)), *kind, c, Box::new(compile_path(b, t)))
        }
    }
}

fn compile_path(e: &PathExpr, t: &mut Symbols) -> CPath {
    match e {
        PathExpr::Atom(a) => CPath::Atom(intern(&mut t.mods, a)),
        PathExpr::Jump(i) => CPath::Jump(intern(&mut t.noms, i)),
        PathExpr::Test(phi) => CPath::Test(Box::new(compile_node(phi, t))),
        PathExpr::Concat(a, b) => CPath::Concat(Box::new(compile_path(a, t)), Box::new(compile_path(b, t))),
    }
}

/// A small model with bitmask sets, for enumeration.
struct Small {
    n: usize,
    full: Mask,
    g: Vec<usize>,
    rel: Vec<Rows>,
    class_mask: Vec<Rows>,
    val: Vec<Mask>,
}

impl Small {
    fn ext(&self, e: &CNode) -> Mask {
        match e {
            CNode::Prop(p) => self.val[*p],
            CNode::Nom(i) => 1 << self.g[*i],
            CNode::Bot => 0,
            CNode::Imp(a, b) => (!self.ext(a) | self.ext(b)) & self.full,
            CNode::At(i, b) => {
                if self.ext(b) & (1 << self.g[*i]) != 0 {
                    self.full
                } else {
                    0
                }
            }
            CNode::Dia(a, b) => {
                let t = self.ext(b);
                let rows = &self.rel[*a];
                let mut s = 0;
                for m in 0..self.n {
                    if rows[m] & t != 0 {
                        s |= 1 << m;
                    }
                }
                s
            }
            CNode::Cmp(a, kind, c, b) => {
                let ra = self.path(a);
                let rb = self.path(b);
                let cls = &self.class_mask[*c];
                let mut s = 0;
                for m in 0..self.n {
                    let ok = match kind {
                        CmpKind::Eq => {
                            let mut closure = 0;
                            for x in 0..self.n {
                                if ra[m] & (1 << x) != 0 {
                                    closure |= cls[x];
                                }
                            }
                            closure & rb[m] != 0
                        }
                        CmpKind::Neq => (0..self.n).any(|x| ra[m] & (1 << x) != 0 && rb[m] & !cls[x] != 0),
                    };
                    if ok {
                        s |= 1 << m;
                    }
                }
                s
            }
        }
    }

    fn path(&self, p: &CPath) -> Rows {
        let mut out = [0; MAX_ENUM_NODES];
        match p {
            CPath::Atom(a) => out = self.rel[*a],
            CPath::Jump(i) => {
                for row in out.iter_mut().take(self.n) {
                    *row = 1 << self.g[*i];
                }
            }
            CPath::Test(phi) => {
                let s = self.ext(phi);
                for (m, row) in out.iter_mut().enumerate().take(self.n) {
                    *row = s & (1 << m);
                }
            }
            CPath::Concat(a, b) => {
                let ra = self.path(a);
                let rb = self.path(b);
                for m in 0..self.n {
                    let mut acc = 0;
                    for mid in 0..self.n {
                        if ra[m] & (1 << mid) != 0 {
                            acc |= rb[mid];
                        }
                    }
                    out[m] = acc;
                }
            }
        }
        out
    }

    fn holds(&self, e: &CNode) -> bool {
        self.ext(e) & 1 != 0
    }
}

/// Restricted-growth strings of length `len` with values below `n`.
fn rgs(len: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, len: usize, n: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        let limit = if prefix.is_empty() { 1 } else { (max + 2).min(n) };
        for v in 0..limit {
            prefix.push(v);
            let nm = if prefix.len() == 1 { v } else { max.max(v) };
            go(prefix, len, n, nm, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), len, n, 0, &mut out);
    out
}

/// Class masks for every partition of `n` nodes.
fn partitions(n: usize) -> Vec<Rows> {
    rgs(n, n)
        .into_iter()
        .map(|code| {
            let mut rows = [0; MAX_ENUM_NODES];
            for x in 0..n {
                for y in 0..n {
                    if code[x] == code[y] {
                        rows[x] |= 1 << y;
                    }
                }
            }
            rows
        })
        .collect()
}

struct Search<'a> {
    ante: &'a [CNode],
    succ: &'a [CNode],
    parts: Vec<Rows>,
}

impl Search<'_> {
    fn refutes(&self, m: &Small) -> bool {
        self.ante.iter().all(|e| m.holds(e)) && !self.succ.iter().any(|e| m.holds(e))
    }

    fn rels(&self, m: &mut Small, k: usize) -> bool {
        if k == m.rel.len() {
            return self.cmps(m, 0);
        }
        let n = m.n;
        for code in 0u64..(1u64 << (n * n)) {
            let mut rows = [0; MAX_ENUM_NODES];
            for (x, row) in rows.iter_mut().enumerate().take(n) {
                *row = ((code >> (x * n)) & ((1 << n) - 1)) as Mask;
            }
            m.rel[k] = rows;
            if self.rels(m, k + 1) {
                return true;
            }
        }
        false
    }

    fn cmps(&self, m: &mut Small, k: usize) -> bool {
        if k == m.class_mask.len() {
            return self.vals(m, 0);
        }
        for p in &self.parts {
            m.class_mask[k] = *p;
            if self.cmps(m, k + 1) {
                return true;
            }
        }
        false
    }

    fn vals(&self, m: &mut Small, k: usize) -> bool {
        if k == m.val.len() {
            return self.refutes(m);
        }
        for v in 0..=m.full {
            m.val[k] = v;
            if self.vals(m, k + 1) {
                return true;
            }
        }
        false
    }
}

fn to_model(m: &Small, t: &Symbols) -> HybridDataModel {
    let mut out = HybridDataModel::with_size(m.n).expect("n >= 1");
    for (i, &ix) in &t.noms {
        out.assign(i, m.g[ix]).expect("in range");
    }
    for (a, &ix) in &t.mods {
        out.declare_relation(a);
        for x in 0..m.n {
            for y in 0..m.n {
                if m.rel[ix][x] & (1 << y) != 0 {
                    out.add_edge(a, x, y).expect("in range");
                }
            }
        }
    }
    for (c, &ix) in &t.cmps {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut done: Mask = 0;
        for x in 0..m.n {
            if done & (1 << x) == 0 {
                let cl = m.class_mask[ix][x];
                done |= cl;
                classes.push((0..m.n).filter(|y| cl & (1 << y) != 0).collect());
            }
        }
        out.set_partition(c, &classes).expect("partition");
    }
    for (p, &ix) in &t.props {
        out.declare_prop(p);
        for x in 0..m.n {
            if m.val[ix] & (1 << x) != 0 {
                out.set_true(p, x).expect("in range");
            }
        }
    }
    out
}

/// Exhaustively searches models of at most `max_nodes` nodes (clamped to
/// [`MAX_ENUM_NODES`]) for one refuting `s`, smallest first. Only symbols
/// of `s` are interpreted; nodes are enumerated up to isomorphism on the
/// nominal assignment.
pub fn find_countermodel(s: &Sequent, max_nodes: usize) -> Option<HybridDataModel> {
    let mut t = Symbols::default();
    let ante: Vec<CNode> = s.ante().iter().map(|e| compile_node(e, &mut t)).collect();
    let succ: Vec<CNode> = s.succ().iter().map(|e| compile_node(e, &mut t)).collect();
    for n in 1..=max_nodes.clamp(1, MAX_ENUM_NODES) {
        let search = Search { ante: &ante, succ: &succ, parts: partitions(n) };
        for g in rgs(t.noms.len(), n) {
            let mut m = Small {
                n,
                full: ((1u16 << n) - 1) as Mask,
                g,
                rel: vec![[0; MAX_ENUM_NODES]; t.mods.len()],
                class_mask: vec![[0; MAX_ENUM_NODES]; t.cmps.len()],
                val: vec![0; t.props.len()],
            };
            if search.rels(&mut m, 0) {
                let model = to_model(&m, &t);
                debug_assert_eq!(model.check_sequent_validity(s), Ok(false));
                return Some(model);
            }
        }
    }
    None
}

/// True iff `m` refutes `s`.
pub fn is_countermodel(m: &HybridDataModel, s: &Sequent) -> Result<bool, ModelError> {
    m.check_sequent_validity(s).map(|v| !v)
}
