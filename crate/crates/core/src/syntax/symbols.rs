use std::collections::{BTreeMap, BTreeSet};

use super::ast::{sym, NodeExpr, PathExpr, Sym, SymKind};
use super::SyntaxError;

/// Prefix of the reserved namespace for generated nominals.
pub const FRESH_PREFIX: &str = "_n";

/// Symbol spaces seen so far plus a fresh-nominal counter.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    kinds: BTreeMap<Sym, SymKind>,
    next_fresh: usize,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn kind_of(&self, name: &str) -> Option<SymKind> {
        self.kinds.get(name).copied()
    }

    /// Records `name` in space `kind`, rejecting cross-space reuse.
    pub fn declare(&mut self, name: &Sym, kind: SymKind) -> Result<(), SyntaxError> {
        match self.kinds.get(name) {
            Some(prev) if *prev != kind => Err(SyntaxError::SymbolClash {
                name: name.to_string(),
                first: *prev,
                second: kind,
            }),
            Some(_) => Ok(()),
            None => {
                self.kinds.insert(name.clone(), kind);
                Ok(())
            }
        }
    }

    pub fn register_node(&mut self, e: &NodeExpr) -> Result<(), SyntaxError> {
        let mut syms = Vec::new();
        e.collect_symbols(&mut syms);
        for (kind, name) in syms {
            self.declare(&name, kind)?;
        }
        Ok(())
    }

    pub fn register_path(&mut self, e: &PathExpr) -> Result<(), SyntaxError> {
        let mut syms = Vec::new();
        e.collect_symbols(&mut syms);
        for (kind, name) in syms {
            self.declare(&name, kind)?;
        }
        Ok(())
    }

    pub fn symbols(&self, kind: SymKind) -> BTreeSet<Sym> {
        self.kinds
            .iter()
            .filter(|(_, k)| **k == kind)
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// A nominal from the reserved namespace not registered so far.
    pub fn fresh(&mut self) -> Sym {
        loop {
            let candidate = sym(format!("{FRESH_PREFIX}{}", self.next_fresh));
            self.next_fresh += 1;
            if !self.kinds.contains_key(&candidate) {
                self.kinds.insert(candidate.clone(), SymKind::Nominal);
                return candidate;
            }
        }
    }
}

/// Stateless-by-snapshot fresh supply that avoids a given set of names.
#[derive(Clone, Debug, Default)]
pub struct FreshSupply {
    next: usize,
    used: BTreeSet<Sym>,
}

impl FreshSupply {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn avoiding(names: impl IntoIterator<Item = Sym>) -> Self {
        FreshSupply { next: 0, used: names.into_iter().collect() }
    }

    pub fn avoid(&mut self, names: impl IntoIterator<Item = Sym>) {
        self.used.extend(names);
    }

    pub fn fresh(&mut self) -> Sym {
        loop {
            let candidate = sym(format!("{FRESH_PREFIX}{}", self.next));
            self.next += 1;
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}
