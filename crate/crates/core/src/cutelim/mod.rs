//! Cut elimination: repeatedly reduce a topmost Cut of minimal cut height
//! until the derivation is cut-free.

mod reduce;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{Derivation, Inference, KernelError, RuleId, Step};
use crate::syntax::{print_node, CmpKind, FreshSupply, NodeExpr, PathExpr};

pub use reduce::ReductionCase;

/// Lexicographically ordered measure of a Cut: weighted size of the cut
/// expression, then cut height.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CutComplexity {
    pub k: usize,
    pub h: usize,
}

impl fmt::Display for CutComplexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k, self.h)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CutElimError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("derivation contains no cut")]
    NoCut,
    #[error("cannot reduce a cut above an open leaf {0}")]
    OpenLeaf(String),
    #[error("no transformation for a cut on {formula} between {left} and {right}")]
    Stuck { formula: String, left: RuleId, right: RuleId },
    #[error("reduction produced {0} instead of the cut conclusion")]
    Conclusion(String),
    #[error("new cut {new} is not below the reduced cut {old}")]
    NoDescent { old: CutComplexity, new: CutComplexity },
    #[error("gave up after {0} reduction steps")]
    StepLimit(usize),
}

/// One reduction: which cut was replaced, how, and the complexities of the
/// cuts it introduced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub case: ReductionCase,
    pub formula: NodeExpr,
    pub left: RuleId,
    pub right: RuleId,
    pub reduced: CutComplexity,
    pub introduced: Vec<CutComplexity>,
}

impl ReductionStep {
    /// Every introduced cut is strictly smaller than the reduced one.
    pub fn descends(&self) -> bool {
        self.introduced.iter().all(|c| *c < self.reduced)
    }
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let new: Vec<String> = self.introduced.iter().map(ToString::to_string).collect();
        write!(
            f,
            "{:?} {}/{} on {} {} -> [{}]",
            self.case,
            self.left,
            self.right,
            print_node(&self.formula),
            self.reduced,
            new.join(", ")
        )
    }
}

fn neq_count_path(e: &PathExpr) -> usize {
    match e {
        PathExpr::Atom(_) | PathExpr::Jump(_) => 0,
        PathExpr::Test(phi) => neq_count(phi),
        PathExpr::Concat(a, b) => neq_count_path(a) + neq_count_path(b),
    }
}

fn neq_count(e: &NodeExpr) -> usize {
    match e {
        NodeExpr::Prop(_) | NodeExpr::Nominal(_) | NodeExpr::Bottom => 0,
        NodeExpr::Implies(a, b) => neq_count(a) + neq_count(b),
        NodeExpr::At(_, phi) | NodeExpr::Diamond(_, phi) => neq_count(phi),
        NodeExpr::Compare(a, kind, _, b) => usize::from(*kind == CmpKind::Neq) + neq_count_path(a) + neq_count_path(b),
    }
}

/// The `k` component: size, with every `≠` comparison counting one extra.
pub fn cut_weight(e: &NodeExpr) -> usize {
    e.size() + neq_count(e)
}

/// Complexity of the Cut at the root of `d`.
pub fn cut_complexity(d: &Derivation) -> Result<CutComplexity, KernelError> {
    match d.inference() {
        Some(Inference::Cut { formula }) => Ok(CutComplexity { k: cut_weight(formula), h: d.cut_height()? }),
        _ => Err(KernelError::NotCut),
    }
}

/// Complexities of all cuts in `d`, in pre-order.
pub fn cut_complexities(d: &Derivation) -> Vec<CutComplexity> {
    let mut out = Vec::new();
    d.flatten().visit(&mut |n| {
        if let Ok(c) = cut_complexity(n) {
            out.push(c);
        }
    });
    out
}

/// Finds the topmost cut of minimal cut height, leftmost on ties. Returns
/// its position as premiss indices from the root.
fn select(d: &Derivation, skip: &[Vec<usize>]) -> Option<Vec<usize>> {
    struct Best {
        h: usize,
        path: Vec<usize>,
    }
    fn scan(d: &Derivation, path: &mut Vec<usize>, skip: &[Vec<usize>], best: &mut Option<Best>) -> (usize, bool) {
        let mut heights = Vec::new();
        let mut cut_free = true;
        for (i, p) in d.premisses().iter().enumerate() {
            path.push(i);
            let (h, cf) = scan(p, path, skip, best);
            path.pop();
            heights.push(h);
            cut_free &= cf;
        }
        let height = heights.iter().copied().max().unwrap_or(0);
        let is_cut = d.rule_id() == Some(RuleId::Cut);
        if is_cut && cut_free && !skip.iter().any(|s| s == path) {
            let h: usize = heights.iter().sum();
            if best.as_ref().map_or(true, |b| h < b.h || (h == b.h && path.as_slice() < b.path.as_slice())) {
                *best = Some(Best { h, path: path.clone() });
            }
        }
        (height + 1, cut_free && !is_cut)
    }
    let mut best = None;
    scan(d, &mut Vec::new(), skip, &mut best);
    best.map(|b| b.path)
}

fn subtree<'a>(d: &'a Derivation, path: &[usize]) -> &'a Derivation {
    path.iter().fold(d, |n, &i| &n.premisses()[i])
}

fn replace(d: Derivation, path: &[usize], new: Derivation) -> Derivation {
    let Some((&first, rest)) = path.split_first() else { return new };
    match d.step {
        Step::Rule { inference, mut premisses } => {
            let child = std::mem::replace(&mut premisses[first], Derivation::open(Default::default()));
            premisses[first] = replace(child, rest, new);
            Derivation { conclusion: d.conclusion, step: Step::Rule { inference, premisses } }
        }
        _ => unreachable!("paths from select only cross rule nodes"),
    }
}

/// Replaces the selected cut by one transformation step. Derived nodes are
/// flattened first.
pub fn reduce_once(d: &Derivation) -> Result<(Derivation, ReductionStep), CutElimError> {
    let flat = d.flatten();
    let mut fresh = FreshSupply::avoiding(flat.all_nominals());
    let path = select(&flat, &[]).ok_or(CutElimError::NoCut)?;
    let (new, step) = reduce_at(&flat, &path, &mut fresh)?;
    Ok((replace(flat, &path, new), step))
}

/// The replacement for the cut at `path` and the step record.
fn reduce_at(d: &Derivation, path: &[usize], fresh: &mut FreshSupply) -> Result<(Derivation, ReductionStep), CutElimError> {
    let cut = subtree(d, path);
    let reduced = cut_complexity(cut)?;
    let (new, case) = reduce::reduce_cut(cut, fresh)?;
    if new.conclusion != cut.conclusion {
        return Err(CutElimError::Conclusion(new.conclusion.to_string()));
    }
    let Some(Inference::Cut { formula }) = cut.inference() else { unreachable!("select returns cuts") };
    let step = ReductionStep {
        case,
        formula: formula.clone(),
        left: cut.premisses()[0].rule_id().unwrap_or(RuleId::Ax),
        right: cut.premisses()[1].rule_id().unwrap_or(RuleId::Ax),
        reduced,
        introduced: cut_complexities(&new),
    };
    if let Some(bad) = step.introduced.iter().find(|c| **c >= reduced) {
        return Err(CutElimError::NoDescent { old: reduced, new: *bad });
    }
    Ok((new, step))
}

/// Default bound on reduction steps for [`eliminate_cuts`].
pub const DEFAULT_STEP_LIMIT: usize = 200_000;

/// Outcome of [`eliminate_cuts_partial`]: the derivation after every
/// possible reduction, the trace, and the cuts no transformation applies to.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub derivation: Derivation,
    pub trace: Vec<ReductionStep>,
    pub stuck: Vec<CutElimError>,
}

impl Elimination {
    pub fn is_complete(&self) -> bool {
        self.stuck.is_empty()
    }
}

/// Reduces cuts until none is left or every remaining topmost cut is stuck.
pub fn eliminate_cuts_partial(d: &Derivation, limit: usize) -> Result<Elimination, CutElimError> {
    let mut cur = d.flatten();
    let mut fresh = FreshSupply::avoiding(cur.all_nominals());
    let mut trace = Vec::new();
    let mut skip: Vec<Vec<usize>> = Vec::new();
    let mut stuck = Vec::new();
    while let Some(path) = select(&cur, &skip) {
        if trace.len() >= limit {
            return Err(CutElimError::StepLimit(limit));
        }
        match reduce_at(&cur, &path, &mut fresh) {
            Ok((new, step)) => {
                trace.push(step);
                cur = replace(cur, &path, new);
            }
            Err(e @ CutElimError::Stuck { .. }) => {
                stuck.push(e);
                skip.push(path);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Elimination { derivation: cur, trace, stuck })
}

/// A cut-free derivation of the same end-sequent, with the reduction trace.
pub fn eliminate_cuts_traced(d: &Derivation, limit: usize) -> Result<(Derivation, Vec<ReductionStep>), CutElimError> {
    let out = eliminate_cuts_partial(d, limit)?;
    match out.stuck.into_iter().next() {
        Some(e) => Err(e),
        None => Ok((out.derivation, out.trace)),
    }
}

/// A cut-free derivation of the same end-sequent.
pub fn eliminate_cuts(d: &Derivation) -> Result<Derivation, CutElimError> {
    eliminate_cuts_traced(d, DEFAULT_STEP_LIMIT).map(|(d, _)| d)
}
