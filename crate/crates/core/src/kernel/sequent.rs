use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use super::KernelError;
use crate::syntax::{print_sequent_styled, NodeExpr, Style, Sym};

/// Which side of a sequent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// True for `@_i φ` and `⟨i: ▲_c j:⟩`.
pub fn is_restricted(e: &NodeExpr) -> bool {
    matches!(e, NodeExpr::At(..)) || e.as_cmp_atom().is_some()
}

pub(crate) fn check_restricted(e: &NodeExpr) -> Result<(), KernelError> {
    if is_restricted(e) {
        Ok(())
    } else {
        Err(KernelError::Shape(crate::syntax::print_node(e)))
    }
}

/// `Γ ⊢ Δ` with both sides canonical ordered sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Default)]
pub struct Sequent {
    ante: BTreeSet<NodeExpr>,
    succ: BTreeSet<NodeExpr>,
}

impl Sequent {
    pub fn new(
        ante: impl IntoIterator<Item = NodeExpr>,
        succ: impl IntoIterator<Item = NodeExpr>,
    ) -> Result<Sequent, KernelError> {
        let s = Sequent { ante: ante.into_iter().collect(), succ: succ.into_iter().collect() };
        for e in s.ante.iter().chain(s.succ.iter()) {
            check_restricted(e)?;
        }
        Ok(s)
    }

    pub fn ante(&self) -> &BTreeSet<NodeExpr> {
        &self.ante
    }

    pub fn succ(&self) -> &BTreeSet<NodeExpr> {
        &self.succ
    }

    pub fn side(&self, side: Side) -> &BTreeSet<NodeExpr> {
        match side {
            Side::Left => &self.ante,
            Side::Right => &self.succ,
        }
    }

    pub fn contains(&self, side: Side, e: &NodeExpr) -> bool {
        self.side(side).contains(e)
    }

    /// Adds `e` on `side`; the result is unchanged if already present.
    pub fn with(&self, side: Side, e: NodeExpr) -> Result<Sequent, KernelError> {
        check_restricted(&e)?;
        let mut s = self.clone();
        match side {
            Side::Left => s.ante.insert(e),
            Side::Right => s.succ.insert(e),
        };
        Ok(s)
    }

    pub(crate) fn with_unchecked(&self, side: Side, e: NodeExpr) -> Sequent {
        let mut s = self.clone();
        match side {
            Side::Left => s.ante.insert(e),
            Side::Right => s.succ.insert(e),
        };
        s
    }

    pub fn without(&self, side: Side, e: &NodeExpr) -> Sequent {
        let mut s = self.clone();
        match side {
            Side::Left => s.ante.remove(e),
            Side::Right => s.succ.remove(e),
        };
        s
    }

    pub fn is_subsequent_of(&self, other: &Sequent) -> bool {
        self.ante.is_subset(&other.ante) && self.succ.is_subset(&other.succ)
    }

    pub fn union(&self, other: &Sequent) -> Sequent {
        Sequent {
            ante: self.ante.union(&other.ante).cloned().collect(),
            succ: self.succ.union(&other.succ).cloned().collect(),
        }
    }

    pub fn nominals(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        for e in self.ante.iter().chain(self.succ.iter()) {
            e.collect_nominals(&mut out);
        }
        out
    }

    pub fn formulas(&self) -> impl Iterator<Item = &NodeExpr> {
        self.ante.iter().chain(self.succ.iter())
    }

    pub fn rename_nominal(&self, from: &str, to: &Sym) -> Sequent {
        Sequent {
            ante: self.ante.iter().map(|e| e.rename_nominal(from, to)).collect(),
            succ: self.succ.iter().map(|e| e.rename_nominal(from, to)).collect(),
        }
    }

    pub fn is_comparison_free(&self) -> bool {
        self.formulas().all(|e| e.is_comparison_free())
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_sequent_styled(self, Style::Ascii))
    }
}

#[derive(Deserialize)]
struct SequentJson {
    #[serde(default)]
    ante: Vec<NodeExpr>,
    #[serde(default)]
    succ: Vec<NodeExpr>,
}

impl<'de> Deserialize<'de> for Sequent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = SequentJson::deserialize(d)?;
        Sequent::new(j.ante, j.succ).map_err(serde::de::Error::custom)
    }
}
