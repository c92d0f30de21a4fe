use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Interned-by-value symbol name.
pub type Sym = Arc<str>;

/// Builds a [`Sym`] from anything string-like.
pub fn sym(s: impl AsRef<str>) -> Sym {
    Arc::from(s.as_ref())
}

/// Equality or inequality of data values (`=` / `≠`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CmpKind {
    Eq,
    Neq,
}

impl CmpKind {
    /// The dual comparison.
    pub fn flip(self) -> CmpKind {
        match self {
            CmpKind::Eq => CmpKind::Neq,
            CmpKind::Neq => CmpKind::Eq,
        }
    }
}

/// Path expressions: atomic steps, jumps `i:`, tests `φ?` and composition.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathExpr {
    Atom(Sym),
    Jump(Sym),
    Test(Arc<NodeExpr>),
    Concat(Arc<PathExpr>, Arc<PathExpr>),
}

/// Node expressions in primitive form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeExpr {
    Prop(Sym),
    Nominal(Sym),
    Bottom,
    Implies(Arc<NodeExpr>, Arc<NodeExpr>),
    At(Sym, Arc<NodeExpr>),
    Diamond(Sym, Arc<NodeExpr>),
    Compare(Arc<PathExpr>, CmpKind, Sym, Arc<PathExpr>),
}

/// Either kind of expression.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Node(NodeExpr),
    Path(PathExpr),
}

/// The four disjoint symbol spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymKind {
    Prop,
    Nominal,
    Modality,
    Comparison,
}

impl fmt::Display for SymKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymKind::Prop => "proposition",
            SymKind::Nominal => "nominal",
            SymKind::Modality => "modality",
            SymKind::Comparison => "comparison",
        })
    }
}

impl PathExpr {
    pub fn atom(a: impl AsRef<str>) -> PathExpr {
        PathExpr::Atom(sym(a))
    }

    pub fn jump(i: impl AsRef<str>) -> PathExpr {
        PathExpr::Jump(sym(i))
    }

    pub fn test(phi: NodeExpr) -> PathExpr {
        PathExpr::Test(Arc::new(phi))
    }

    pub fn concat(a: PathExpr, b: PathExpr) -> PathExpr {
        PathExpr::Concat(Arc::new(a), Arc::new(b))
    }

    /// The empty path `ε = ⊤?`.
    pub fn eps() -> PathExpr {
        PathExpr::test(NodeExpr::top())
    }

    /// Right-nested composition of a non-empty sequence of steps.
    pub fn seq(steps: Vec<PathExpr>) -> PathExpr {
        let mut it = steps.into_iter().rev();
        let mut acc = it.next().expect("seq of an empty step list");
        for s in it {
            acc = PathExpr::concat(s, acc);
        }
        acc
    }

    pub fn size(&self) -> usize {
        match self {
            PathExpr::Atom(_) | PathExpr::Jump(_) => 1,
            PathExpr::Test(phi) => 1 + phi.size(),
            PathExpr::Concat(a, b) => a.size() + b.size(),
        }
    }

    pub fn collect_symbols(&self, out: &mut Vec<(SymKind, Sym)>) {
        match self {
            PathExpr::Atom(a) => out.push((SymKind::Modality, a.clone())),
            PathExpr::Jump(i) => out.push((SymKind::Nominal, i.clone())),
            PathExpr::Test(phi) => phi.collect_symbols(out),
            PathExpr::Concat(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
        }
    }

    pub fn collect_nominals(&self, out: &mut BTreeSet<Sym>) {
        match self {
            PathExpr::Atom(_) => {}
            PathExpr::Jump(i) => {
                out.insert(i.clone());
            }
            PathExpr::Test(phi) => phi.collect_nominals(out),
            PathExpr::Concat(a, b) => {
                a.collect_nominals(out);
                b.collect_nominals(out);
            }
        }
    }

    pub fn nominals(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_nominals(&mut out);
        out
    }

    pub fn rename_nominal(&self, from: &str, to: &Sym) -> PathExpr {
        match self {
            PathExpr::Atom(_) => self.clone(),
            PathExpr::Jump(i) if &**i == from => PathExpr::Jump(to.clone()),
            PathExpr::Jump(_) => self.clone(),
            PathExpr::Test(phi) => PathExpr::test(phi.rename_nominal(from, to)),
            PathExpr::Concat(a, b) => {
                PathExpr::concat(a.rename_nominal(from, to), b.rename_nominal(from, to))
            }
        }
    }

    /// True when every Concat is right-nested.
    pub fn is_right_nested(&self) -> bool {
        match self {
            PathExpr::Atom(_) | PathExpr::Jump(_) => true,
            PathExpr::Test(phi) => phi.paths_right_nested(),
            PathExpr::Concat(a, b) => {
                !matches!(**a, PathExpr::Concat(..)) && a.is_right_nested() && b.is_right_nested()
            }
        }
    }

    /// `⟨α⟩φ` unfolded into primitives.
    pub fn diamond(&self, phi: NodeExpr) -> NodeExpr {
        match self {
            PathExpr::Atom(a) => NodeExpr::Diamond(a.clone(), Arc::new(phi)),
            PathExpr::Jump(k) => NodeExpr::At(k.clone(), Arc::new(phi)),
            PathExpr::Test(psi) => NodeExpr::and((**psi).clone(), phi),
            PathExpr::Concat(a, b) => a.diamond(b.diamond(phi)),
        }
    }
}

impl NodeExpr {
    pub fn prop(p: impl AsRef<str>) -> NodeExpr {
        NodeExpr::Prop(sym(p))
    }

    pub fn nom(i: impl AsRef<str>) -> NodeExpr {
        NodeExpr::Nominal(sym(i))
    }

    pub fn implies(a: NodeExpr, b: NodeExpr) -> NodeExpr {
        NodeExpr::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn at(i: impl AsRef<str>, phi: NodeExpr) -> NodeExpr {
        NodeExpr::At(sym(i), Arc::new(phi))
    }

    pub fn at_sym(i: &Sym, phi: NodeExpr) -> NodeExpr {
        NodeExpr::At(i.clone(), Arc::new(phi))
    }

    pub fn dia(a: impl AsRef<str>, phi: NodeExpr) -> NodeExpr {
        NodeExpr::Diamond(sym(a), Arc::new(phi))
    }

    pub fn compare(alpha: PathExpr, kind: CmpKind, c: impl AsRef<str>, beta: PathExpr) -> NodeExpr {
        NodeExpr::Compare(Arc::new(alpha), kind, sym(c), Arc::new(beta))
    }

    /// The atomic comparison `⟨i: ▲_c j:⟩`.
    pub fn cmp_atom(i: &Sym, kind: CmpKind, c: &Sym, j: &Sym) -> NodeExpr {
        NodeExpr::Compare(
            Arc::new(PathExpr::Jump(i.clone())),
            kind,
            c.clone(),
            Arc::new(PathExpr::Jump(j.clone())),
        )
    }

    pub fn top() -> NodeExpr {
        NodeExpr::implies(NodeExpr::Bottom, NodeExpr::Bottom)
    }

    pub fn not(phi: NodeExpr) -> NodeExpr {
        NodeExpr::implies(phi, NodeExpr::Bottom)
    }

    pub fn or(a: NodeExpr, b: NodeExpr) -> NodeExpr {
        NodeExpr::implies(NodeExpr::not(a), b)
    }

    pub fn and(a: NodeExpr, b: NodeExpr) -> NodeExpr {
        NodeExpr::not(NodeExpr::implies(a, NodeExpr::not(b)))
    }

    pub fn iff(a: NodeExpr, b: NodeExpr) -> NodeExpr {
        NodeExpr::and(NodeExpr::implies(a.clone(), b.clone()), NodeExpr::implies(b, a))
    }

    /// `[a]φ = ¬⟨a⟩¬φ` for an arbitrary path.
    pub fn boxed(alpha: &PathExpr, phi: NodeExpr) -> NodeExpr {
        NodeExpr::not(alpha.diamond(NodeExpr::not(phi)))
    }

    /// `[α ▲ β] = ¬⟨α ▽ β⟩`.
    pub fn box_compare(alpha: PathExpr, kind: CmpKind, c: impl AsRef<str>, beta: PathExpr) -> NodeExpr {
        NodeExpr::not(NodeExpr::compare(alpha, kind.flip(), c, beta))
    }

    /// Matches `¬φ`.
    pub fn as_not(&self) -> Option<&NodeExpr> {
        match self {
            NodeExpr::Implies(a, b) if **b == NodeExpr::Bottom => Some(a),
            _ => None,
        }
    }

    /// Matches `φ ∧ ψ = ¬(φ → ¬ψ)`.
    pub fn as_and(&self) -> Option<(&NodeExpr, &NodeExpr)> {
        let inner = self.as_not()?;
        match inner {
            NodeExpr::Implies(a, nb) => nb.as_not().map(|b| (&**a, b)),
            _ => None,
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, NodeExpr::Implies(a, b) if **a == NodeExpr::Bottom && **b == NodeExpr::Bottom)
    }

    /// Matches `⟨i: ▲_c j:⟩`.
    pub fn as_cmp_atom(&self) -> Option<(&Sym, CmpKind, &Sym, &Sym)> {
        match self {
            NodeExpr::Compare(a, kind, c, b) => match (&**a, &**b) {
                (PathExpr::Jump(i), PathExpr::Jump(j)) => Some((i, *kind, c, j)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Matches `@_i φ`.
    pub fn as_at(&self) -> Option<(&Sym, &NodeExpr)> {
        match self {
            NodeExpr::At(i, phi) => Some((i, phi)),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            NodeExpr::Prop(_) | NodeExpr::Nominal(_) | NodeExpr::Bottom => 1,
            NodeExpr::Implies(a, b) => 1 + a.size() + b.size(),
            NodeExpr::At(_, phi) | NodeExpr::Diamond(_, phi) => 1 + phi.size(),
            NodeExpr::Compare(a, _, _, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn collect_symbols(&self, out: &mut Vec<(SymKind, Sym)>) {
        match self {
            NodeExpr::Prop(p) => out.push((SymKind::Prop, p.clone())),
            NodeExpr::Nominal(i) => out.push((SymKind::Nominal, i.clone())),
            NodeExpr::Bottom => {}
            NodeExpr::Implies(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            NodeExpr::At(i, phi) => {
                out.push((SymKind::Nominal, i.clone()));
                phi.collect_symbols(out);
            }
            NodeExpr::Diamond(a, phi) => {
                out.push((SymKind::Modality, a.clone()));
                phi.collect_symbols(out);
            }
            NodeExpr::Compare(a, _, c, b) => {
                a.collect_symbols(out);
                out.push((SymKind::Comparison, c.clone()));
                b.collect_symbols(out);
            }
        }
    }

    pub fn collect_nominals(&self, out: &mut BTreeSet<Sym>) {
        match self {
            NodeExpr::Prop(_) | NodeExpr::Bottom => {}
            NodeExpr::Nominal(i) => {
                out.insert(i.clone());
            }
            NodeExpr::Implies(a, b) => {
                a.collect_nominals(out);
                b.collect_nominals(out);
            }
            NodeExpr::At(i, phi) => {
                out.insert(i.clone());
                phi.collect_nominals(out);
            }
            NodeExpr::Diamond(_, phi) => phi.collect_nominals(out),
            NodeExpr::Compare(a, _, _, b) => {
                a.collect_nominals(out);
                b.collect_nominals(out);
            }
        }
    }

    pub fn nominals(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_nominals(&mut out);
        out
    }

    pub fn mentions_nominal(&self, i: &str) -> bool {
        self.nominals().iter().any(|n| &**n == i)
    }

    /// Replaces every occurrence of nominal `from` by `to`.
    pub fn rename_nominal(&self, from: &str, to: &Sym) -> NodeExpr {
        match self {
            NodeExpr::Prop(_) | NodeExpr::Bottom => self.clone(),
            NodeExpr::Nominal(i) if &**i == from => NodeExpr::Nominal(to.clone()),
            NodeExpr::Nominal(_) => self.clone(),
            NodeExpr::Implies(a, b) => {
                NodeExpr::implies(a.rename_nominal(from, to), b.rename_nominal(from, to))
            }
            NodeExpr::At(i, phi) => {
                let i = if &**i == from { to.clone() } else { i.clone() };
                NodeExpr::At(i, Arc::new(phi.rename_nominal(from, to)))
            }
            NodeExpr::Diamond(a, phi) => {
                NodeExpr::Diamond(a.clone(), Arc::new(phi.rename_nominal(from, to)))
            }
            NodeExpr::Compare(a, kind, c, b) => NodeExpr::Compare(
                Arc::new(a.rename_nominal(from, to)),
                *kind,
                c.clone(),
                Arc::new(b.rename_nominal(from, to)),
            ),
        }
    }

    pub(crate) fn paths_right_nested(&self) -> bool {
        match self {
            NodeExpr::Prop(_) | NodeExpr::Nominal(_) | NodeExpr::Bottom => true,
            NodeExpr::Implies(a, b) => a.paths_right_nested() && b.paths_right_nested(),
            NodeExpr::At(_, phi) | NodeExpr::Diamond(_, phi) => phi.paths_right_nested(),
            NodeExpr::Compare(a, _, _, b) => a.is_right_nested() && b.is_right_nested(),
        }
    }

    /// True when no comparison occurs anywhere (the H(@) fragment).
    pub fn is_comparison_free(&self) -> bool {
        match self {
            NodeExpr::Prop(_) | NodeExpr::Nominal(_) | NodeExpr::Bottom => true,
            NodeExpr::Implies(a, b) => a.is_comparison_free() && b.is_comparison_free(),
            NodeExpr::At(_, phi) | NodeExpr::Diamond(_, phi) => phi.is_comparison_free(),
            NodeExpr::Compare(..) => false,
        }
    }
}

impl Expr {
    pub fn size(&self) -> usize {
        match self {
            Expr::Node(n) => n.size(),
            Expr::Path(p) => p.size(),
        }
    }

    pub fn nominals(&self) -> BTreeSet<Sym> {
        match self {
            Expr::Node(n) => n.nominals(),
            Expr::Path(p) => p.nominals(),
        }
    }
}
