//! Sequents, the rules of G as checked inference steps, derivation trees and
//! the derivation checker.

mod check;
mod derivation;
mod rules;
mod sequent;

use thiserror::Error;

pub use check::{check_derivation, check_fragment, Violation};
pub use derivation::{Derivation, DerivationJson, PrincipalJson, Step};
pub use rules::{apply_rule, check_step, path_to, Inference, RuleId};
pub use sequent::{is_restricted, Sequent, Side};

pub(crate) use rules::map_node;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("not a restricted expression (@i phi or <i: =c j:>): {0}")]
    Shape(String),
    #[error("{rule}: principal {formula} missing on the {side:?} side")]
    PrincipalMissing { rule: RuleId, side: Side, formula: String },
    #[error("{rule}: side condition violated: {reason}")]
    SideCondition { rule: RuleId, reason: String },
    #[error("{rule}: expected {expected} premisses, found {found}")]
    Arity { rule: RuleId, expected: usize, found: usize },
    #[error("{rule}: premiss {index} does not match, expected {expected}")]
    PremissMismatch { rule: RuleId, index: usize, expected: String },
    #[error("cut expression {0} not on the succedent of the left and antecedent of the right premiss")]
    CutMismatch(String),
    #[error("unknown rule '{0}'")]
    UnknownRule(String),
    #[error("open leaf {0}")]
    OpenLeaf(String),
    #[error("macro {name}: {reason}")]
    Macro { name: String, reason: String },
    #[error("renaming to {0} would capture an existing nominal")]
    Capture(String),
    #[error("not a cut node")]
    NotCut,
    #[error("{0} is not a subsequent of {1}")]
    NotSubsequent(String, String),
    #[error("malformed derivation JSON: {0}")]
    Json(String),
}
