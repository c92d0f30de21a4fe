//! Finite hybrid data models, the satisfaction relation and data-graph
//! ingestion.

mod countermodel;
mod datagraph;
mod json;
mod nodeset;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::kernel::Sequent;
use crate::syntax::{sym, CmpKind, NodeExpr, PathExpr, Sym};

pub use countermodel::{find_countermodel, is_countermodel};
pub use datagraph::{ingest_datagraph, DataGraph, DgEdge, DgNode};
pub use json::ModelJson;
pub use nodeset::NodeSet;

/// Index of a node in a model.
pub type NodeId = usize;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("a model needs at least one node")]
    Empty,
    #[error("unknown node '{0}'")]
    UnknownNode(String),
    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),
    #[error("duplicate node '{0}'")]
    DuplicateNode(String),
    #[error("nominal '{0}' is not assigned")]
    UnassignedNominal(String),
    #[error("comparison '{0}' is not a partition of the nodes")]
    BadPartition(String),
    #[error("index label '{0}' used on more than one node")]
    DuplicateIndex(String),
    #[error("malformed model: {0}")]
    Json(String),
}

/// `⟨N, {R_a}, {≈_c}, g, V⟩` over a finite node set.
///
/// Relations absent from `rels` are empty; comparisons absent from `cmp` are
/// the identity. Each comparison is stored as a class index per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HybridDataModel {
    names: Vec<String>,
    index: BTreeMap<String, NodeId>,
    rels: BTreeMap<Sym, Vec<NodeSet>>,
    cmp: BTreeMap<Sym, Vec<usize>>,
    g: BTreeMap<Sym, NodeId>,
    val: BTreeMap<Sym, NodeSet>,
}

impl HybridDataModel {
    pub fn new(names: impl IntoIterator<Item = impl Into<String>>) -> Result<HybridDataModel, ModelError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ModelError::Empty);
        }
        let mut index = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(ModelError::DuplicateNode(n.clone()));
            }
        }
        Ok(HybridDataModel {
            names,
            index,
            rels: BTreeMap::new(),
            cmp: BTreeMap::new(),
            g: BTreeMap::new(),
            val: BTreeMap::new(),
        })
    }

    /// Nodes named `n0, n1, ...`.
    pub fn with_size(n: usize) -> Result<HybridDataModel, ModelError> {
        HybridDataModel::new((0..n).map(|i| format!("n{i}")))
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, n: NodeId) -> &str {
        &self.names[n]
    }

    pub fn node(&self, name: &str) -> Result<NodeId, ModelError> {
        self.index.get(name).copied().ok_or_else(|| ModelError::UnknownNode(name.to_string()))
    }

    fn check_node(&self, n: NodeId) -> Result<(), ModelError> {
        if n < self.size() {
            Ok(())
        } else {
            Err(ModelError::NodeOutOfRange(n))
        }
    }

    pub fn add_edge(&mut self, a: &str, from: NodeId, to: NodeId) -> Result<(), ModelError> {
        self.check_node(from)?;
        self.check_node(to)?;
        let n = self.size();
        self.rels.entry(sym(a)).or_insert_with(|| vec![NodeSet::empty(n); n])[from].insert(to);
        Ok(())
    }

    /// Declares a relation, possibly empty.
    pub fn declare_relation(&mut self, a: &str) {
        let n = self.size();
        self.rels.entry(sym(a)).or_insert_with(|| vec![NodeSet::empty(n); n]);
    }

    /// Sets `≈_c` from its classes; unlisted nodes become singleton classes.
    pub fn set_partition(&mut self, c: &str, classes: &[Vec<NodeId>]) -> Result<(), ModelError> {
        let n = self.size();
        let mut class: Vec<Option<usize>> = vec![None; n];
        for members in classes {
            let Some(&rep) = members.iter().min() else { continue };
            for &m in members {
                self.check_node(m)?;
                if class[m].is_some() {
                    return Err(ModelError::BadPartition(c.to_string()));
                }
                class[m] = Some(rep);
            }
        }
        let class = class.into_iter().enumerate().map(|(i, c)| c.unwrap_or(i)).collect();
        self.cmp.insert(sym(c), class);
        Ok(())
    }

    pub fn assign(&mut self, i: &str, n: NodeId) -> Result<(), ModelError> {
        self.check_node(n)?;
        self.g.insert(sym(i), n);
        Ok(())
    }

    pub fn set_true(&mut self, p: &str, n: NodeId) -> Result<(), ModelError> {
        self.check_node(n)?;
        let size = self.size();
        self.val.entry(sym(p)).or_insert_with(|| NodeSet::empty(size)).insert(n);
        Ok(())
    }

    /// Declares a proposition, possibly true nowhere.
    pub fn declare_prop(&mut self, p: &str) {
        let size = self.size();
        self.val.entry(sym(p)).or_insert_with(|| NodeSet::empty(size));
    }

    pub fn relation_names(&self) -> impl Iterator<Item = &Sym> {
        self.rels.keys()
    }

    pub fn comparison_names(&self) -> impl Iterator<Item = &Sym> {
        self.cmp.keys()
    }

    pub fn prop_names(&self) -> impl Iterator<Item = &Sym> {
        self.val.keys()
    }

    /// Pairs of `R_a` in ascending order.
    pub fn relation(&self, a: &str) -> Vec<(NodeId, NodeId)> {
        match self.rels.get(a) {
            None => vec![],
            Some(rows) => rows.iter().enumerate().flat_map(|(i, row)| row.iter().map(move |j| (i, j))).collect(),
        }
    }

    pub fn successors(&self, a: &str, n: NodeId) -> NodeSet {
        match self.rels.get(a) {
            Some(rows) => rows[n].clone(),
            None => NodeSet::empty(self.size()),
        }
    }

    /// Classes of `≈_c` ordered by least member.
    pub fn classes(&self, c: &str) -> Vec<Vec<NodeId>> {
        let n = self.size();
        let mut by_rep: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
        for m in 0..n {
            by_rep.entry(self.class_of(c, m)).or_default().push(m);
        }
        by_rep.into_values().collect()
    }

    /// Representative of the class of `n` under `≈_c`.
    pub fn class_of(&self, c: &str, n: NodeId) -> usize {
        self.cmp.get(c).map_or(n, |cls| cls[n])
    }

    pub fn related(&self, c: &str, n: NodeId, m: NodeId) -> bool {
        self.class_of(c, n) == self.class_of(c, m)
    }

    pub fn assignment(&self) -> &BTreeMap<Sym, NodeId> {
        &self.g
    }

    pub fn denotation(&self, i: &str) -> Result<NodeId, ModelError> {
        self.g.get(i).copied().ok_or_else(|| ModelError::UnassignedNominal(i.to_string()))
    }

    pub fn valuation(&self, p: &str) -> NodeSet {
        self.val.get(p).cloned().unwrap_or_else(|| NodeSet::empty(self.size()))
    }

    /// Assigns every unassigned nominal among `nominals` to the first node;
    /// returns the nominals so defaulted.
    pub fn complete_assignment<'a>(&mut self, nominals: impl IntoIterator<Item = &'a Sym>) -> Vec<Sym> {
        let mut defaulted = Vec::new();
        for i in nominals {
            if !self.g.contains_key(i) {
                self.g.insert(i.clone(), 0);
                defaulted.push(i.clone());
            }
        }
        defaulted
    }

    /// The set of nodes satisfying `φ`.
    pub fn extension(&self, phi: &NodeExpr) -> Result<NodeSet, ModelError> {
        let n = self.size();
        Ok(match phi {
            NodeExpr::Prop(p) => self.valuation(p),
            NodeExpr::Nominal(i) => NodeSet::singleton(n, self.denotation(i)?),
            NodeExpr::Bottom => NodeSet::empty(n),
            NodeExpr::Implies(a, b) => {
                let mut s = self.extension(a)?.complement();
                s.union_with(&self.extension(b)?);
                s
            }
            NodeExpr::At(i, body) => {
                if self.extension(body)?.contains(self.denotation(i)?) {
                    NodeSet::full(n)
                } else {
                    NodeSet::empty(n)
                }
            }
            NodeExpr::Diamond(a, body) => {
                let target = self.extension(body)?;
                let mut s = NodeSet::empty(n);
                if let Some(rows) = self.rels.get(a) {
                    for (m, row) in rows.iter().enumerate() {
                        if row.intersects(&target) {
                            s.insert(m);
                        }
                    }
                }
                s
            }
            NodeExpr::Compare(alpha, kind, c, beta) => {
                let ra = self.path_relation(alpha)?;
                let rb = self.path_relation(beta)?;
                let mut s = NodeSet::empty(n);
                for m in 0..n {
                    if self.compare_sets(&ra[m], *kind, c, &rb[m]) {
                        s.insert(m);
                    }
                }
                s
            }
        })
    }

    fn compare_sets(&self, xs: &NodeSet, kind: CmpKind, c: &str, ys: &NodeSet) -> bool {
        let cx: BTreeSet<usize> = xs.iter().map(|x| self.class_of(c, x)).collect();
        let cy: BTreeSet<usize> = ys.iter().map(|y| self.class_of(c, y)).collect();
        match kind {
            CmpKind::Eq => !cx.is_disjoint(&cy),
            CmpKind::Neq => !cx.is_empty() && !cy.is_empty() && cx.union(&cy).count() > 1,
        }
    }

    /// Successor sets of the relation denoted by `α`, one per node.
    pub fn path_relation(&self, alpha: &PathExpr) -> Result<Vec<NodeSet>, ModelError> {
        let n = self.size();
        Ok(match alpha {
            PathExpr::Atom(a) => (0..n).map(|m| self.successors(a, m)).collect(),
            PathExpr::Jump(i) => {
                let t = self.denotation(i)?;
                vec![NodeSet::singleton(n, t); n]
            }
            PathExpr::Test(phi) => {
                let s = self.extension(phi)?;
                (0..n).map(|m| if s.contains(m) { NodeSet::singleton(n, m) } else { NodeSet::empty(n) }).collect()
            }
            PathExpr::Concat(a, b) => {
                let ra = self.path_relation(a)?;
                let rb = self.path_relation(b)?;
                ra.iter()
                    .map(|row| {
                        let mut out = NodeSet::empty(n);
                        for mid in row.iter() {
                            out.union_with(&rb[mid]);
                        }
                        out
                    })
                    .collect()
            }
        })
    }

    /// `M, n, n2 ⊩ α`.
    pub fn eval_path(&self, n: NodeId, n2: NodeId, alpha: &PathExpr) -> Result<bool, ModelError> {
        self.check_node(n)?;
        self.check_node(n2)?;
        Ok(self.path_relation(alpha)?[n].contains(n2))
    }

    /// `M, n ⊩ φ`.
    pub fn eval_node(&self, n: NodeId, phi: &NodeExpr) -> Result<bool, ModelError> {
        self.check_node(n)?;
        Ok(self.extension(phi)?.contains(n))
    }

    /// `[α ▲_c β]` by its universal reading: every pair of endpoints stands
    /// in the relation `▲`.
    pub fn eval_box_compare(
        &self,
        n: NodeId,
        alpha: &PathExpr,
        beta: &PathExpr,
        kind: CmpKind,
        c: &str,
    ) -> Result<bool, ModelError> {
        self.check_node(n)?;
        let xs = &self.path_relation(alpha)?[n];
        let ys = &self.path_relation(beta)?[n];
        for x in xs.iter() {
            for y in ys.iter() {
                let same = self.related(c, x, y);
                if same != (kind == CmpKind::Eq) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `M, n ⊩ Ψ` for every member.
    pub fn satisfies_set<'a>(&self, n: NodeId, psi: impl IntoIterator<Item = &'a NodeExpr>) -> Result<bool, ModelError> {
        for phi in psi {
            if !self.eval_node(n, phi)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True unless the model satisfies every antecedent and no succedent.
    /// Sequent members are node-independent, so node 0 is used.
    pub fn check_sequent_validity(&self, s: &Sequent) -> Result<bool, ModelError> {
        if !self.satisfies_set(0, s.ante())? {
            return Ok(true);
        }
        for phi in s.succ() {
            if self.eval_node(0, phi)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}
