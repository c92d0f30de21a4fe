use std::cell::RefCell;
use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rules::{check_step, Inference, RuleId};
use super::sequent::{check_restricted, Sequent, Side};
use super::KernelError;
use crate::syntax::{NodeExpr, Sym};

/// A sequent-labelled tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub conclusion: Sequent,
    pub step: Step,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    /// A primitive rule application.
    Rule { inference: Inference, premisses: Vec<Derivation> },
    /// A premiss of a fragment, not yet derived.
    Open,
    /// A derived rule: `expansion` proves the conclusion from open leaves
    /// equal (in depth-first order) to the conclusions of `premisses`.
    Derived { name: String, expansion: Box<Derivation>, premisses: Vec<Derivation> },
}

impl Derivation {
    pub fn open(conclusion: Sequent) -> Derivation {
        Derivation { conclusion, step: Step::Open }
    }

    /// A rule node; the step is verified against the premisses.
    pub fn rule(conclusion: Sequent, inference: Inference, premisses: Vec<Derivation>) -> Result<Derivation, KernelError> {
        let ps: Vec<&Sequent> = premisses.iter().map(|d| &d.conclusion).collect();
        check_step(&conclusion, &inference, &ps)?;
        Ok(Derivation { conclusion, step: Step::Rule { inference, premisses } })
    }

    /// Backward application: open leaves for each canonical premiss.
    pub fn refine(goal: &Sequent, inference: Inference) -> Result<Derivation, KernelError> {
        let ps = super::apply_rule(goal, &inference)?;
        Derivation::rule(goal.clone(), inference, ps.into_iter().map(Derivation::open).collect())
    }

    /// A derived-rule node wrapping a checked fragment.
    pub fn derived(name: &str, expansion: Derivation, premisses: Vec<Derivation>) -> Result<Derivation, KernelError> {
        let leaves: Vec<&Sequent> = expansion.open_leaves();
        if leaves.len() != premisses.len()
            || leaves.iter().zip(premisses.iter()).any(|(l, p)| **l != p.conclusion)
        {
            return Err(KernelError::Macro {
                name: name.to_string(),
                reason: "premisses do not match the open leaves of the expansion".into(),
            });
        }
        Ok(Derivation {
            conclusion: expansion.conclusion.clone(),
            step: Step::Derived { name: name.to_string(), expansion: Box::new(expansion), premisses },
        })
    }

    /// Wraps an expansion whose open leaves stay open.
    pub fn derived_open(name: &str, expansion: Derivation) -> Derivation {
        let premisses = expansion.open_leaves().into_iter().cloned().map(Derivation::open).collect();
        Derivation {
            conclusion: expansion.conclusion.clone(),
            step: Step::Derived { name: name.to_string(), expansion: Box::new(expansion), premisses },
        }
    }

    pub fn inference(&self) -> Option<&Inference> {
        match &self.step {
            Step::Rule { inference, .. } => Some(inference),
            _ => None,
        }
    }

    pub fn rule_id(&self) -> Option<RuleId> {
        self.inference().map(Inference::rule)
    }

    pub fn premisses(&self) -> &[Derivation] {
        match &self.step {
            Step::Rule { premisses, .. } | Step::Derived { premisses, .. } => premisses,
            Step::Open => &[],
        }
    }

    pub fn is_open(&self) -> bool {
        matches!(self.step, Step::Open)
    }

    /// Open leaves in depth-first, left-to-right order. Expansions of derived
    /// nodes are not entered.
    pub fn open_leaves(&self) -> Vec<&Sequent> {
        let mut out = Vec::new();
        self.collect_open(&mut out);
        out
    }

    fn collect_open<'a>(&'a self, out: &mut Vec<&'a Sequent>) {
        match &self.step {
            Step::Open => out.push(&self.conclusion),
            _ => self.premisses().iter().for_each(|p| p.collect_open(out)),
        }
    }

    /// Replaces the open leaves, in order, by the given derivations.
    pub fn plug(self, subs: Vec<Derivation>) -> Result<Derivation, KernelError> {
        let mut it = subs.into_iter();
        let out = self.plug_rec(&mut it)?;
        if it.next().is_some() {
            return Err(KernelError::Macro { name: "plug".into(), reason: "more derivations than open leaves".into() });
        }
        Ok(out)
    }

    fn plug_rec(self, it: &mut impl Iterator<Item = Derivation>) -> Result<Derivation, KernelError> {
        match self.step {
            Step::Open => {
                let sub = it.next().ok_or_else(|| KernelError::Macro {
                    name: "plug".into(),
                    reason: "fewer derivations than open leaves".into(),
                })?;
                if sub.conclusion != self.conclusion {
                    return Err(KernelError::Macro {
                        name: "plug".into(),
                        reason: format!("expected {}, got {}", self.conclusion, sub.conclusion),
                    });
                }
                Ok(sub)
            }
            Step::Rule { inference, premisses } => {
                let premisses = premisses.into_iter().map(|p| p.plug_rec(it)).collect::<Result<_, _>>()?;
                Ok(Derivation { conclusion: self.conclusion, step: Step::Rule { inference, premisses } })
            }
            Step::Derived { name, expansion, premisses } => {
                let premisses = premisses.into_iter().map(|p| p.plug_rec(it)).collect::<Result<_, _>>()?;
                Ok(Derivation { conclusion: self.conclusion, step: Step::Derived { name, expansion, premisses } })
            }
        }
    }

    /// Length of the longest branch; a derived node counts as one step.
    pub fn height(&self) -> usize {
        1 + self.premisses().iter().map(Derivation::height).max().unwrap_or(0)
    }

    /// Number of rule nodes, derived nodes counted as one.
    pub fn size(&self) -> usize {
        1 + self.premisses().iter().map(Derivation::size).sum::<usize>()
    }

    /// Sum of the heights of the two premisses of a Cut root.
    pub fn cut_height(&self) -> Result<usize, KernelError> {
        match &self.step {
            Step::Rule { inference: Inference::Cut { .. }, premisses } => {
                Ok(premisses.iter().map(Derivation::height).sum())
            }
            _ => Err(KernelError::NotCut),
        }
    }

    /// Number of Cut nodes, including inside expansions.
    pub fn cut_count(&self) -> usize {
        let here = usize::from(self.rule_id() == Some(RuleId::Cut));
        let inner = match &self.step {
            Step::Derived { expansion, .. } => expansion.cut_count(),
            _ => 0,
        };
        here + inner + self.premisses().iter().map(Derivation::cut_count).sum::<usize>()
    }

    pub fn is_cut_free(&self) -> bool {
        self.cut_count() == 0
    }

    /// Counts nodes (after flattening) using the given rule.
    pub fn count_rule(&self, rule: RuleId) -> usize {
        let here = usize::from(self.rule_id() == Some(rule));
        let inner = match &self.step {
            Step::Derived { expansion, .. } => expansion.count_rule(rule),
            _ => 0,
        };
        here + inner + self.premisses().iter().map(|p| p.count_rule(rule)).sum::<usize>()
    }

    /// All rules used, including inside expansions.
    pub fn rules_used(&self) -> BTreeSet<RuleId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |d| {
            if let Some(r) = d.rule_id() {
                out.insert(r);
            }
        });
        out
    }

    /// Visits every node, entering expansions before premisses.
    pub fn visit(&self, f: &mut dyn FnMut(&Derivation)) {
        f(self);
        if let Step::Derived { expansion, .. } = &self.step {
            expansion.visit_skip_open(f);
        }
        for p in self.premisses() {
            p.visit(f);
        }
    }

    fn visit_skip_open(&self, f: &mut dyn FnMut(&Derivation)) {
        if self.is_open() {
            return;
        }
        f(self);
        if let Step::Derived { expansion, .. } = &self.step {
            expansion.visit_skip_open(f);
        }
        for p in self.premisses() {
            p.visit_skip_open(f);
        }
    }

    /// Replaces every derived node by its expansion with the premisses plugged in.
    pub fn flatten(&self) -> Derivation {
        match &self.step {
            Step::Open => self.clone(),
            Step::Rule { inference, premisses } => Derivation {
                conclusion: self.conclusion.clone(),
                step: Step::Rule { inference: inference.clone(), premisses: premisses.iter().map(Derivation::flatten).collect() },
            },
            Step::Derived { expansion, premisses, .. } => {
                let subs = premisses.iter().map(Derivation::flatten).collect();
                expansion.flatten().plug(subs).expect("derived node premisses match its open leaves")
            }
        }
    }

    /// Every nominal occurring in any sequent or instantiation.
    pub fn all_nominals(&self) -> BTreeSet<Sym> {
        let out = RefCell::new(BTreeSet::new());
        self.visit(&mut |d| {
            out.borrow_mut().extend(d.conclusion.nominals());
            if let Some(inf) = d.inference() {
                inf.map_nominals(&|s| {
                    out.borrow_mut().insert(s.clone());
                    s.clone()
                });
            }
        });
        out.into_inner()
    }

    /// Renames `from` to `to` throughout; `to` must not already occur.
    pub fn rename_nominal(&self, from: &str, to: &Sym) -> Result<Derivation, KernelError> {
        if &**to == from {
            return Ok(self.clone());
        }
        if self.all_nominals().contains(to) {
            return Err(KernelError::Capture(to.to_string()));
        }
        Ok(self.substitute_nominal(from, to))
    }

    /// Unchecked, possibly non-injective substitution of nominals.
    pub(crate) fn substitute_nominal(&self, from: &str, to: &Sym) -> Derivation {
        let f = |s: &Sym| if &**s == from { to.clone() } else { s.clone() };
        self.map_nominals(&f)
    }

    pub(crate) fn map_nominals(&self, f: &dyn Fn(&Sym) -> Sym) -> Derivation {
        let conclusion = map_sequent(&self.conclusion, f);
        let step = match &self.step {
            Step::Open => Step::Open,
            Step::Rule { inference, premisses } => Step::Rule {
                inference: inference.map_nominals(f),
                premisses: premisses.iter().map(|p| p.map_nominals(f)).collect(),
            },
            Step::Derived { name, expansion, premisses } => Step::Derived {
                name: name.clone(),
                expansion: Box::new(expansion.map_nominals(f)),
                premisses: premisses.iter().map(|p| p.map_nominals(f)).collect(),
            },
        };
        Derivation { conclusion, step }
    }

    /// Cut of `left` (proving `φ` on the right) against `right` (using `φ`
    /// on the left); contexts are merged.
    pub fn cut(left: Derivation, right: Derivation, formula: &NodeExpr) -> Result<Derivation, KernelError> {
        check_restricted(formula)?;
        if !left.conclusion.contains(Side::Right, formula) || !right.conclusion.contains(Side::Left, formula) {
            return Err(KernelError::CutMismatch(crate::syntax::print_node(formula)));
        }
        let l = left.conclusion.without(Side::Right, formula);
        let r = right.conclusion.without(Side::Left, formula);
        let conclusion = l.union(&r);
        Derivation::rule(conclusion, Inference::Cut { formula: formula.clone() }, vec![left, right])
    }

    /// Adds `formula` on `side` by a weakening step.
    pub fn weaken(self, side: Side, formula: NodeExpr) -> Result<Derivation, KernelError> {
        let conclusion = self.conclusion.with(side, formula.clone())?;
        let inference = match side {
            Side::Left => Inference::WL { formula },
            Side::Right => Inference::WR { formula },
        };
        Derivation::rule(conclusion, inference, vec![self])
    }

    /// Weakens up to `target`, one step per missing expression.
    pub fn weaken_to(self, target: &Sequent) -> Result<Derivation, KernelError> {
        if !self.conclusion.is_subsequent_of(target) {
            return Err(KernelError::NotSubsequent(self.conclusion.to_string(), target.to_string()));
        }
        let missing_l: Vec<_> = target.ante().difference(self.conclusion.ante()).cloned().collect();
        let missing_r: Vec<_> = target.succ().difference(self.conclusion.succ()).cloned().collect();
        let mut d = self;
        for e in missing_l {
            d = d.weaken(Side::Left, e)?;
        }
        for e in missing_r {
            d = d.weaken(Side::Right, e)?;
        }
        Ok(d)
    }
}

pub(crate) fn map_sequent(s: &Sequent, f: &dyn Fn(&Sym) -> Sym) -> Sequent {
    Sequent::new(
        s.ante().iter().map(|e| super::map_node(e, f)),
        s.succ().iter().map(|e| super::map_node(e, f)),
    )
    .expect("renaming preserves restricted shape")
}

/// Principal expression on the wire.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalJson {
    pub side: Side,
    pub formula: NodeExpr,
}

/// Wire form of a derivation node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivationJson {
    pub rule: String,
    #[serde(default)]
    pub principal: Vec<PrincipalJson>,
    #[serde(default)]
    pub inst: serde_json::Value,
    pub conclusion: Sequent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expansion: Option<Box<DerivationJson>>,
    #[serde(default)]
    pub children: Vec<DerivationJson>,
}

const OPEN_TAG: &str = "Open";
const DERIVED_TAG: &str = "Derived";

impl From<&Derivation> for DerivationJson {
    fn from(d: &Derivation) -> Self {
        let children = d.premisses().iter().map(DerivationJson::from).collect();
        match &d.step {
            Step::Open => DerivationJson {
                rule: OPEN_TAG.into(),
                principal: vec![],
                inst: serde_json::Value::Null,
                conclusion: d.conclusion.clone(),
                name: None,
                expansion: None,
                children,
            },
            Step::Derived { name, expansion, .. } => DerivationJson {
                rule: DERIVED_TAG.into(),
                principal: vec![],
                inst: serde_json::Value::Null,
                conclusion: d.conclusion.clone(),
                name: Some(name.clone()),
                expansion: Some(Box::new(DerivationJson::from(&**expansion))),
                children,
            },
            Step::Rule { inference, .. } => {
                let v = serde_json::to_value(inference).expect("inference serializes");
                let inst = v.get("inst").cloned().unwrap_or(serde_json::Value::Null);
                DerivationJson {
                    rule: inference.rule().to_string(),
                    principal: inference
                        .principal()
                        .into_iter()
                        .map(|(side, formula)| PrincipalJson { side, formula })
                        .collect(),
                    inst,
                    conclusion: d.conclusion.clone(),
                    name: None,
                    expansion: None,
                    children,
                }
            }
        }
    }
}

impl TryFrom<&DerivationJson> for Derivation {
    type Error = KernelError;

    /// Rebuilds the tree without checking rule applications; principals
    /// must agree with the instantiation.
    fn try_from(j: &DerivationJson) -> Result<Self, Self::Error> {
        let premisses = j.children.iter().map(Derivation::try_from).collect::<Result<Vec<_>, _>>()?;
        let step = match j.rule.as_str() {
            OPEN_TAG => {
                if !premisses.is_empty() {
                    return Err(KernelError::Json("open leaf with children".into()));
                }
                Step::Open
            }
            DERIVED_TAG => {
                let name = j.name.clone().ok_or_else(|| KernelError::Json("derived node without name".into()))?;
                let exp = j.expansion.as_ref().ok_or_else(|| KernelError::Json("derived node without expansion".into()))?;
                Step::Derived { name, expansion: Box::new(Derivation::try_from(&**exp)?), premisses }
            }
            other => {
                let rule: RuleId = other.parse()?;
                let mut m = serde_json::Map::new();
                m.insert("rule".into(), serde_json::Value::String(rule.name().into()));
                if !j.inst.is_null() {
                    m.insert("inst".into(), j.inst.clone());
                }
                let inference: Inference =
                    serde_json::from_value(serde_json::Value::Object(m)).map_err(|e| KernelError::Json(e.to_string()))?;
                let want: Vec<PrincipalJson> = inference
                    .principal()
                    .into_iter()
                    .map(|(side, formula)| PrincipalJson { side, formula })
                    .collect();
                if want != j.principal {
                    return Err(KernelError::Json(format!("principal expressions of {rule} do not match its instantiation")));
                }
                Step::Rule { inference, premisses }
            }
        };
        Ok(Derivation { conclusion: j.conclusion.clone(), step })
    }
}

impl Serialize for Derivation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DerivationJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Derivation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = DerivationJson::deserialize(d)?;
        Derivation::try_from(&j).map_err(serde::de::Error::custom)
    }
}
