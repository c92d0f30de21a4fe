use std::fmt;

use super::derivation::{Derivation, Step};
use super::rules::check_step;
use super::sequent::Sequent;
use super::KernelError;

/// A failed node: its position in the tree, its conclusion and the cause.
///
/// Paths are dot-separated premiss indices from the root; `e` enters the
/// expansion of a derived node. The root is the empty path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub conclusion: String,
    pub error: KernelError,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() { "root" } else { &self.path };
        write!(f, "at {path} [{}]: {}", self.conclusion, self.error)
    }
}

fn child(path: &str, seg: &str) -> String {
    if path.is_empty() {
        seg.to_string()
    } else {
        format!("{path}.{seg}")
    }
}

fn walk(d: &Derivation, path: &str, allow_open: bool, out: &mut Vec<Violation>) {
    let report = |error: KernelError, out: &mut Vec<Violation>| {
        out.push(Violation { path: path.to_string(), conclusion: d.conclusion.to_string(), error })
    };
    match &d.step {
        Step::Open => {
            if !allow_open {
                report(KernelError::OpenLeaf(d.conclusion.to_string()), out);
            }
        }
        Step::Rule { inference, premisses } => {
            let ps: Vec<&Sequent> = premisses.iter().map(|p| &p.conclusion).collect();
            if let Err(e) = check_step(&d.conclusion, inference, &ps) {
                report(e, out);
            }
            for (i, p) in premisses.iter().enumerate() {
                walk(p, &child(path, &i.to_string()), allow_open, out);
            }
        }
        Step::Derived { name, expansion, premisses } => {
            if expansion.conclusion != d.conclusion {
                report(
                    KernelError::Macro { name: name.clone(), reason: "expansion proves a different sequent".into() },
                    out,
                );
            }
            walk(expansion, &child(path, "e"), true, out);
            let leaves = expansion.open_leaves();
            if leaves.len() != premisses.len() || leaves.iter().zip(premisses).any(|(l, p)| **l != p.conclusion) {
                report(
                    KernelError::Macro {
                        name: name.clone(),
                        reason: "premisses do not match the open leaves of the expansion".into(),
                    },
                    out,
                );
            }
            for (i, p) in premisses.iter().enumerate() {
                walk(p, &child(path, &i.to_string()), allow_open, out);
            }
        }
    }
}

/// Checks every step and requires every leaf to be closed by an axiom.
pub fn check_derivation(d: &Derivation) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    walk(d, "", false, &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Checks every step of a fragment whose open leaves must be exactly
/// `expected_open`, in depth-first order.
pub fn check_fragment(d: &Derivation, expected_open: &[Sequent]) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    walk(d, "", true, &mut out);
    let leaves = d.open_leaves();
    if leaves.len() != expected_open.len() || leaves.iter().zip(expected_open).any(|(l, e)| *l != e) {
        out.push(Violation {
            path: String::new(),
            conclusion: d.conclusion.to_string(),
            error: KernelError::Macro {
                name: "fragment".into(),
                reason: format!(
                    "open leaves [{}] differ from expected [{}]",
                    leaves.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("; "),
                    expected_open.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("; ")
                ),
            },
        });
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
