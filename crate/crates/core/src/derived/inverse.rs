use super::basic::axg;
use super::{apply_in, macro_err, node};
use crate::kernel::{apply_rule, Derivation, Inference, KernelError, Sequent, Side};

/// The rule acting on the same principal on the opposite side.
fn dual(inf: &Inference) -> Option<Inference> {
    Some(match inf.clone() {
        Inference::ImpL { i, lhs, rhs } => Inference::ImpR { i, lhs, rhs },
        Inference::ImpR { i, lhs, rhs } => Inference::ImpL { i, lhs, rhs },
        Inference::AtL { j, i, body } => Inference::AtR { j, i, body },
        Inference::AtR { j, i, body } => Inference::AtL { j, i, body },
        Inference::DiaL { i, a, body, j } => Inference::DiaR { i, a, body, j },
        Inference::CmpL { i, alpha, kind, c, beta, j, k } => Inference::CmpR { i, alpha, kind, c, beta, j, k },
        Inference::NEqL { i, j, c } => Inference::NEqR { i, j, c },
        Inference::NEqR { i, j, c } => Inference::NEqL { i, j, c },
        _ => return None,
    })
}

/// Proves `goal` by `inf` followed by generalized axioms on every premiss.
fn close_by(goal: &Sequent, inf: Inference) -> Result<Derivation, KernelError> {
    let ps = apply_in(goal, &inf, &Sequent::default())?;
    let mut kids = Vec::new();
    for p in &ps {
        let shared = p
            .ante()
            .iter()
            .find(|e| p.contains(Side::Right, e))
            .ok_or_else(|| macro_err("Invert", format!("no shared expression in {p}")))?;
        kids.push(axg(p, shared)?);
    }
    node(goal, inf, kids)
}

/// For each premiss of `inf` at `conclusion`, a fragment deriving it whose
/// single open leaf is `conclusion`. Rules whose premisses extend the
/// conclusion are inverted by weakening; the others by a cut against the
/// dual rule closed with generalized axioms.
pub fn inverse_fragments(inf: &Inference, conclusion: &Sequent) -> Result<Vec<Derivation>, KernelError> {
    if matches!(inf, Inference::WL { .. } | Inference::WR { .. }) {
        return Err(macro_err("Invert", "weakening has no inverse"));
    }
    let premisses = apply_rule(conclusion, inf)?;
    let mut out = Vec::new();
    for p in premisses {
        if conclusion.is_subsequent_of(&p) {
            out.push(Derivation::open(conclusion.clone()).weaken_to(&p)?);
            continue;
        }
        let (side, pi) = inf.consumed().ok_or_else(|| macro_err("Invert", "unexpected premiss shape"))?;
        let dual = dual(inf).ok_or_else(|| macro_err("Invert", "no dual rule"))?;
        let d = match side {
            Side::Left => {
                let left = close_by(&p.with(Side::Right, pi.clone())?, dual)?;
                let right = Derivation::open(conclusion.clone()).weaken_to(&p.with(Side::Left, pi.clone())?)?;
                Derivation::cut(left, right, &pi)?
            }
            Side::Right => {
                let left = Derivation::open(conclusion.clone()).weaken_to(&p.with(Side::Right, pi.clone())?)?;
                let right = close_by(&p.with(Side::Left, pi.clone())?, dual)?;
                Derivation::cut(left, right, &pi)?
            }
        };
        if d.conclusion != p {
            return Err(macro_err("Invert", format!("built {} instead of {}", d.conclusion, p)));
        }
        out.push(d);
    }
    Ok(out)
}

/// Derivations of the premisses of `inf` from a derivation of its conclusion.
pub fn invert(inf: &Inference, d: &Derivation) -> Result<Vec<Derivation>, KernelError> {
    inverse_fragments(inf, &d.conclusion)?.into_iter().map(|f| f.plug(vec![d.clone()])).collect()
}
