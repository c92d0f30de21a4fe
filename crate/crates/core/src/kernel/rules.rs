use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sequent::{check_restricted, Sequent, Side};
use super::KernelError;
use crate::syntax::{print_node, CmpKind, NodeExpr, PathExpr, Sym};

/// The rules of the calculus G.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    Ax,
    Bot,
    ImpL,
    ImpR,
    AtT,
    At5,
    Nom,
    S1,
    S2,
    S3,
    AtL,
    AtR,
    DiaL,
    DiaR,
    CmpL,
    CmpR,
    EqT,
    Eq5,
    NEqL,
    NEqR,
    Cut,
    WL,
    WR,
}

impl RuleId {
    pub const ALL: [RuleId; 23] = [
        RuleId::Ax,
        RuleId::Bot,
        RuleId::ImpL,
        RuleId::ImpR,
        RuleId::AtT,
        RuleId::At5,
        RuleId::Nom,
        RuleId::S1,
        RuleId::S2,
        RuleId::S3,
        RuleId::AtL,
        RuleId::AtR,
        RuleId::DiaL,
        RuleId::DiaR,
        RuleId::CmpL,
        RuleId::CmpR,
        RuleId::EqT,
        RuleId::Eq5,
        RuleId::NEqL,
        RuleId::NEqR,
        RuleId::Cut,
        RuleId::WL,
        RuleId::WR,
    ];

    /// Every rule except Cut and the weakenings.
    pub fn non_structural() -> impl Iterator<Item = RuleId> {
        RuleId::ALL.into_iter().filter(|r| !matches!(r, RuleId::Cut | RuleId::WL | RuleId::WR))
    }

    /// Rules that mention data comparisons.
    pub fn is_comparison_rule(self) -> bool {
        matches!(
            self,
            RuleId::CmpL | RuleId::CmpR | RuleId::EqT | RuleId::Eq5 | RuleId::NEqL | RuleId::NEqR | RuleId::S3
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Ax => "Ax",
            RuleId::Bot => "Bot",
            RuleId::ImpL => "ImpL",
            RuleId::ImpR => "ImpR",
            RuleId::AtT => "AtT",
            RuleId::At5 => "At5",
            RuleId::Nom => "Nom",
            RuleId::S1 => "S1",
            RuleId::S2 => "S2",
            RuleId::S3 => "S3",
            RuleId::AtL => "AtL",
            RuleId::AtR => "AtR",
            RuleId::DiaL => "DiaL",
            RuleId::DiaR => "DiaR",
            RuleId::CmpL => "CmpL",
            RuleId::CmpR => "CmpR",
            RuleId::EqT => "EqT",
            RuleId::Eq5 => "Eq5",
            RuleId::NEqL => "NEqL",
            RuleId::NEqR => "NEqR",
            RuleId::Cut => "Cut",
            RuleId::WL => "WL",
            RuleId::WR => "WR",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| KernelError::UnknownRule(s.to_string()))
    }
}

/// A fully instantiated rule application.
///
/// Nominal fields follow the schema letters: `@_j @_i φ` for AtL/AtR, the
/// fresh or witness nominal is `j` (and `k`) for DiaL/DiaR/CmpL/CmpR.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule", content = "inst")]
pub enum Inference {
    Ax { formula: NodeExpr },
    Bot { i: Sym },
    ImpL { i: Sym, lhs: NodeExpr, rhs: NodeExpr },
    ImpR { i: Sym, lhs: NodeExpr, rhs: NodeExpr },
    AtT { i: Sym },
    At5 { i: Sym, j: Sym, k: Sym },
    Nom { i: Sym, j: Sym },
    S1 { i: Sym, j: Sym, body: NodeExpr },
    S2 { i: Sym, j: Sym, k: Sym, a: Sym },
    S3 { i: Sym, j: Sym, k: Sym, c: Sym },
    AtL { j: Sym, i: Sym, body: NodeExpr },
    AtR { j: Sym, i: Sym, body: NodeExpr },
    DiaL { i: Sym, a: Sym, body: NodeExpr, j: Sym },
    DiaR { i: Sym, a: Sym, body: NodeExpr, j: Sym },
    CmpL { i: Sym, alpha: PathExpr, kind: CmpKind, c: Sym, beta: PathExpr, j: Sym, k: Sym },
    CmpR { i: Sym, alpha: PathExpr, kind: CmpKind, c: Sym, beta: PathExpr, j: Sym, k: Sym },
    EqT { i: Sym, c: Sym },
    Eq5 { i: Sym, j: Sym, k: Sym, c: Sym },
    NEqL { i: Sym, j: Sym, c: Sym },
    NEqR { i: Sym, j: Sym, c: Sym },
    Cut { formula: NodeExpr },
    WL { formula: NodeExpr },
    WR { formula: NodeExpr },
}

fn at(i: &Sym, phi: NodeExpr) -> NodeExpr {
    NodeExpr::at_sym(i, phi)
}

fn nom(i: &Sym) -> NodeExpr {
    NodeExpr::Nominal(i.clone())
}

fn dia(a: &Sym, phi: NodeExpr) -> NodeExpr {
    NodeExpr::Diamond(a.clone(), phi.into())
}

/// `@_i ⟨α⟩ j`.
pub fn path_to(i: &Sym, alpha: &PathExpr, j: &Sym) -> NodeExpr {
    at(i, alpha.diamond(nom(j)))
}

fn compare(alpha: &PathExpr, kind: CmpKind, c: &Sym, beta: &PathExpr) -> NodeExpr {
    NodeExpr::Compare(alpha.clone().into(), kind, c.clone(), beta.clone().into())
}

fn need(goal: &Sequent, side: Side, e: &NodeExpr, rule: RuleId) -> Result<(), KernelError> {
    if goal.contains(side, e) {
        Ok(())
    } else {
        Err(KernelError::PrincipalMissing { rule, side, formula: print_node(e) })
    }
}

fn fresh_in(goal: &Sequent, j: &Sym, rule: RuleId) -> Result<(), KernelError> {
    if goal.nominals().contains(j) {
        Err(KernelError::SideCondition { rule, reason: format!("{j} occurs in the conclusion") })
    } else {
        Ok(())
    }
}

impl Inference {
    pub fn rule(&self) -> RuleId {
        match self {
            Inference::Ax { .. } => RuleId::Ax,
            Inference::Bot { .. } => RuleId::Bot,
            Inference::ImpL { .. } => RuleId::ImpL,
            Inference::ImpR { .. } => RuleId::ImpR,
            Inference::AtT { .. } => RuleId::AtT,
            Inference::At5 { .. } => RuleId::At5,
            Inference::Nom { .. } => RuleId::Nom,
            Inference::S1 { .. } => RuleId::S1,
            Inference::S2 { .. } => RuleId::S2,
            Inference::S3 { .. } => RuleId::S3,
            Inference::AtL { .. } => RuleId::AtL,
            Inference::AtR { .. } => RuleId::AtR,
            Inference::DiaL { .. } => RuleId::DiaL,
            Inference::DiaR { .. } => RuleId::DiaR,
            Inference::CmpL { .. } => RuleId::CmpL,
            Inference::CmpR { .. } => RuleId::CmpR,
            Inference::EqT { .. } => RuleId::EqT,
            Inference::Eq5 { .. } => RuleId::Eq5,
            Inference::NEqL { .. } => RuleId::NEqL,
            Inference::NEqR { .. } => RuleId::NEqR,
            Inference::Cut { .. } => RuleId::Cut,
            Inference::WL { .. } => RuleId::WL,
            Inference::WR { .. } => RuleId::WR,
        }
    }

    /// Expressions of the conclusion the rule acts on, with their side.
    pub fn principal(&self) -> Vec<(Side, NodeExpr)> {
        use Side::{Left, Right};
        match self {
            Inference::Ax { formula } => vec![(Left, formula.clone()), (Right, formula.clone())],
            Inference::Bot { i } => vec![(Left, at(i, NodeExpr::Bottom))],
            Inference::ImpL { i, lhs, rhs } => {
                vec![(Left, at(i, NodeExpr::implies(lhs.clone(), rhs.clone())))]
            }
            Inference::ImpR { i, lhs, rhs } => {
                vec![(Right, at(i, NodeExpr::implies(lhs.clone(), rhs.clone())))]
            }
            Inference::AtT { .. } | Inference::Nom { .. } | Inference::EqT { .. } => vec![],
            Inference::Cut { .. } => vec![],
            Inference::At5 { i, j, k } => vec![(Left, at(i, nom(j))), (Left, at(i, nom(k)))],
            Inference::S1 { i, j, body } => vec![(Left, at(i, nom(j))), (Left, at(i, body.clone()))],
            Inference::S2 { i, j, k, a } => vec![(Left, at(j, nom(k))), (Left, at(i, dia(a, nom(j))))],
            Inference::S3 { i, j, k, c } => {
                vec![(Left, at(i, nom(j))), (Left, NodeExpr::cmp_atom(i, CmpKind::Eq, c, k))]
            }
            Inference::AtL { j, i, body } => vec![(Left, at(j, at(i, body.clone())))],
            Inference::AtR { j, i, body } => vec![(Right, at(j, at(i, body.clone())))],
            Inference::DiaL { i, a, body, .. } => vec![(Left, at(i, dia(a, body.clone())))],
            Inference::DiaR { i, a, body, j } => {
                vec![(Right, at(i, dia(a, body.clone()))), (Left, at(i, dia(a, nom(j))))]
            }
            Inference::CmpL { i, alpha, kind, c, beta, .. } => {
                vec![(Left, at(i, compare(alpha, *kind, c, beta)))]
            }
            Inference::CmpR { i, alpha, kind, c, beta, j, k } => vec![
                (Right, at(i, compare(alpha, *kind, c, beta))),
                (Left, path_to(i, alpha, j)),
                (Left, path_to(i, beta, k)),
            ],
            Inference::Eq5 { i, j, k, c } => vec![
                (Left, NodeExpr::cmp_atom(i, CmpKind::Eq, c, j)),
                (Left, NodeExpr::cmp_atom(i, CmpKind::Eq, c, k)),
            ],
            Inference::NEqL { i, j, c } => vec![(Left, NodeExpr::cmp_atom(i, CmpKind::Neq, c, j))],
            Inference::NEqR { i, j, c } => vec![(Right, NodeExpr::cmp_atom(i, CmpKind::Neq, c, j))],
            Inference::WL { formula } => vec![(Left, formula.clone())],
            Inference::WR { formula } => vec![(Right, formula.clone())],
        }
    }

    /// The principal expression removed from the canonical premisses, if any.
    pub fn consumed(&self) -> Option<(Side, NodeExpr)> {
        match self {
            Inference::ImpL { .. }
            | Inference::ImpR { .. }
            | Inference::AtL { .. }
            | Inference::AtR { .. }
            | Inference::DiaL { .. }
            | Inference::CmpL { .. }
            | Inference::NEqL { .. }
            | Inference::NEqR { .. } => self.principal().into_iter().next(),
            _ => None,
        }
    }

    /// Nominals that must be fresh for the conclusion.
    pub fn eigen_nominals(&self) -> Vec<Sym> {
        match self {
            Inference::Nom { j, .. } | Inference::DiaL { j, .. } => vec![j.clone()],
            Inference::CmpL { j, k, .. } => vec![j.clone(), k.clone()],
            _ => vec![],
        }
    }

    /// Applies `f` to every nominal in the instantiation.
    pub fn map_nominals(&self, f: &dyn Fn(&Sym) -> Sym) -> Inference {
        let n = |e: &NodeExpr| map_node(e, f);
        let p = |e: &PathExpr| map_path(e, f);
        match self {
            Inference::Ax { formula } => Inference::Ax { formula: n(formula) },
            Inference::Bot { i } => Inference::Bot { i: f(i) },
            Inference::ImpL { i, lhs, rhs } => Inference::ImpL { i: f(i), lhs: n(lhs), rhs: n(rhs) },
            Inference::ImpR { i, lhs, rhs } => Inference::ImpR { i: f(i), lhs: n(lhs), rhs: n(rhs) },
            Inference::AtT { i } => Inference::AtT { i: f(i) },
            Inference::At5 { i, j, k } => Inference::At5 { i: f(i), j: f(j), k: f(k) },
            Inference::Nom { i, j } => Inference::Nom { i: f(i), j: f(j) },
            Inference::S1 { i, j, body } => Inference::S1 { i: f(i), j: f(j), body: n(body) },
            Inference::S2 { i, j, k, a } => Inference::S2 { i: f(i), j: f(j), k: f(k), a: a.clone() },
            Inference::S3 { i, j, k, c } => Inference::S3 { i: f(i), j: f(j), k: f(k), c: c.clone() },
            Inference::AtL { j, i, body } => Inference::AtL { j: f(j), i: f(i), body: n(body) },
            Inference::AtR { j, i, body } => Inference::AtR { j: f(j), i: f(i), body: n(body) },
            Inference::DiaL { i, a, body, j } => {
                Inference::DiaL { i: f(i), a: a.clone(), body: n(body), j: f(j) }
            }
            Inference::DiaR { i, a, body, j } => {
                Inference::DiaR { i: f(i), a: a.clone(), body: n(body), j: f(j) }
            }
            Inference::CmpL { i, alpha, kind, c, beta, j, k } => Inference::CmpL {
                i: f(i),
                alpha: p(alpha),
                kind: *kind,
                c: c.clone(),
                beta: p(beta),
                j: f(j),
                k: f(k),
            },
            Inference::CmpR { i, alpha, kind, c, beta, j, k } => Inference::CmpR {
                i: f(i),
                alpha: p(alpha),
                kind: *kind,
                c: c.clone(),
                beta: p(beta),
                j: f(j),
                k: f(k),
            },
            Inference::EqT { i, c } => Inference::EqT { i: f(i), c: c.clone() },
            Inference::Eq5 { i, j, k, c } => Inference::Eq5 { i: f(i), j: f(j), k: f(k), c: c.clone() },
            Inference::NEqL { i, j, c } => Inference::NEqL { i: f(i), j: f(j), c: c.clone() },
            Inference::NEqR { i, j, c } => Inference::NEqR { i: f(i), j: f(j), c: c.clone() },
            Inference::Cut { formula } => Inference::Cut { formula: n(formula) },
            Inference::WL { formula } => Inference::WL { formula: n(formula) },
            Inference::WR { formula } => Inference::WR { formula: n(formula) },
        }
    }
}

pub(crate) fn map_node(e: &NodeExpr, f: &dyn Fn(&Sym) -> Sym) -> NodeExpr {
    match e {
        NodeExpr::Prop(_) | NodeExpr::Bottom => e.clone(),
        NodeExpr::Nominal(i) => NodeExpr::Nominal(f(i)),
        NodeExpr::Implies(a, b) => NodeExpr::implies(map_node(a, f), map_node(b, f)),
        NodeExpr::At(i, phi) => NodeExpr::At(f(i), map_node(phi, f).into()),
        NodeExpr::Diamond(a, phi) => NodeExpr::Diamond(a.clone(), map_node(phi, f).into()),
        NodeExpr::Compare(a, kind, c, b) => {
            NodeExpr::Compare(map_path(a, f).into(), *kind, c.clone(), map_path(b, f).into())
        }
    }
}

pub(crate) fn map_path(e: &PathExpr, f: &dyn Fn(&Sym) -> Sym) -> PathExpr {
    match e {
        PathExpr::Atom(_) => e.clone(),
        PathExpr::Jump(i) => PathExpr::Jump(f(i)),
        PathExpr::Test(phi) => PathExpr::test(map_node(phi, f)),
        PathExpr::Concat(a, b) => PathExpr::concat(map_path(a, f), map_path(b, f)),
    }
}

fn is_ax_shape(e: &NodeExpr) -> bool {
    match e {
        NodeExpr::At(_, body) => matches!(**body, NodeExpr::Prop(_) | NodeExpr::Nominal(_)),
        _ => matches!(e.as_cmp_atom(), Some((_, CmpKind::Eq, _, _))),
    }
}

fn is_s1_body(e: &NodeExpr) -> bool {
    match e {
        NodeExpr::Prop(_) | NodeExpr::Bottom => true,
        NodeExpr::Diamond(_, k) => matches!(**k, NodeExpr::Nominal(_)),
        _ => false,
    }
}

/// Backward application: the canonical premisses of `inf` applied to `goal`.
pub fn apply_rule(goal: &Sequent, inf: &Inference) -> Result<Vec<Sequent>, KernelError> {
    use Side::{Left, Right};
    let rule = inf.rule();
    for (side, e) in inf.principal() {
        need(goal, side, &e, rule)?;
    }
    let add = |s: &Sequent, side: Side, e: NodeExpr| s.with(side, e);
    let drop = |side: Side, e: &NodeExpr| goal.without(side, e);
    Ok(match inf {
        Inference::Ax { formula } => {
            if !is_ax_shape(formula) {
                return Err(KernelError::SideCondition {
                    rule,
                    reason: format!("{} is not of the form @i p, @i j or <i: =c j:>", print_node(formula)),
                });
            }
            vec![]
        }
        Inference::Bot { .. } => vec![],
        Inference::ImpL { i, lhs, rhs } => {
            let base = drop(Left, &at(i, NodeExpr::implies(lhs.clone(), rhs.clone())));
            vec![add(&base, Right, at(i, lhs.clone()))?, add(&base, Left, at(i, rhs.clone()))?]
        }
        Inference::ImpR { i, lhs, rhs } => {
            let base = drop(Right, &at(i, NodeExpr::implies(lhs.clone(), rhs.clone())));
            vec![add(&add(&base, Left, at(i, lhs.clone()))?, Right, at(i, rhs.clone()))?]
        }
        Inference::AtT { i } => vec![add(goal, Left, at(i, nom(i)))?],
        Inference::At5 { j, k, .. } => vec![add(goal, Left, at(j, nom(k)))?],
        Inference::Nom { i, j } => {
            fresh_in(goal, j, rule)?;
            vec![add(goal, Left, at(i, nom(j)))?]
        }
        Inference::S1 { j, body, .. } => {
            if !is_s1_body(body) {
                return Err(KernelError::SideCondition {
                    rule,
                    reason: format!("{} is not of the form p, false or <a>k", print_node(body)),
                });
            }
            vec![add(goal, Left, at(j, body.clone()))?]
        }
        Inference::S2 { i, k, a, .. } => vec![add(goal, Left, at(i, dia(a, nom(k))))?],
        Inference::S3 { j, k, c, .. } => vec![add(goal, Left, NodeExpr::cmp_atom(j, CmpKind::Eq, c, k))?],
        Inference::AtL { j, i, body } => {
            let base = drop(Left, &at(j, at(i, body.clone())));
            vec![add(&base, Left, at(i, body.clone()))?]
        }
        Inference::AtR { j, i, body } => {
            let base = drop(Right, &at(j, at(i, body.clone())));
            vec![add(&base, Right, at(i, body.clone()))?]
        }
        Inference::DiaL { i, a, body, j } => {
            fresh_in(goal, j, rule)?;
            let base = drop(Left, &at(i, dia(a, body.clone())));
            let s = add(&base, Left, at(i, dia(a, nom(j))))?;
            vec![add(&s, Left, at(j, body.clone()))?]
        }
        Inference::DiaR { body, j, .. } => vec![add(goal, Right, at(j, body.clone()))?],
        Inference::CmpL { i, alpha, kind, c, beta, j, k } => {
            if j == k {
                return Err(KernelError::SideCondition { rule, reason: "fresh nominals must differ".into() });
            }
            fresh_in(goal, j, rule)?;
            fresh_in(goal, k, rule)?;
            let base = drop(Left, &at(i, compare(alpha, *kind, c, beta)));
            let s = add(&base, Left, path_to(i, alpha, j))?;
            let s = add(&s, Left, path_to(i, beta, k))?;
            vec![add(&s, Left, NodeExpr::cmp_atom(j, *kind, c, k))?]
        }
        Inference::CmpR { kind, c, j, k, .. } => {
            vec![add(goal, Right, NodeExpr::cmp_atom(j, *kind, c, k))?]
        }
        Inference::EqT { i, c } => vec![add(goal, Left, NodeExpr::cmp_atom(i, CmpKind::Eq, c, i))?],
        Inference::Eq5 { j, k, c, .. } => vec![add(goal, Left, NodeExpr::cmp_atom(j, CmpKind::Eq, c, k))?],
        Inference::NEqL { i, j, c } => {
            let base = drop(Left, &NodeExpr::cmp_atom(i, CmpKind::Neq, c, j));
            vec![add(&base, Right, NodeExpr::cmp_atom(i, CmpKind::Eq, c, j))?]
        }
        Inference::NEqR { i, j, c } => {
            let base = drop(Right, &NodeExpr::cmp_atom(i, CmpKind::Neq, c, j));
            vec![add(&base, Left, NodeExpr::cmp_atom(i, CmpKind::Eq, c, j))?]
        }
        Inference::Cut { formula } => {
            check_restricted(formula)?;
            vec![add(goal, Right, formula.clone())?, add(goal, Left, formula.clone())?]
        }
        Inference::WL { formula } => vec![drop(Left, formula)],
        Inference::WR { formula } => vec![drop(Right, formula)],
    })
}

/// Verifies one inference step against the conclusions of its premisses.
pub fn check_step(conclusion: &Sequent, inf: &Inference, premisses: &[&Sequent]) -> Result<(), KernelError> {
    let rule = inf.rule();
    match inf {
        Inference::Cut { formula } => {
            check_restricted(formula)?;
            if premisses.len() != 2 {
                return Err(KernelError::Arity { rule, expected: 2, found: premisses.len() });
            }
            let (l, r) = (premisses[0], premisses[1]);
            if !l.contains(Side::Right, formula) || !r.contains(Side::Left, formula) {
                return Err(KernelError::CutMismatch(print_node(formula)));
            }
            let ante_ok = [r.ante().clone(), r.without(Side::Left, formula).ante().clone()]
                .iter()
                .any(|ra| &l.ante().union(ra).cloned().collect::<std::collections::BTreeSet<_>>() == conclusion.ante());
            let succ_ok = [l.succ().clone(), l.without(Side::Right, formula).succ().clone()]
                .iter()
                .any(|ls| &ls.union(r.succ()).cloned().collect::<std::collections::BTreeSet<_>>() == conclusion.succ());
            if ante_ok && succ_ok {
                Ok(())
            } else {
                Err(KernelError::PremissMismatch { rule, index: 0, expected: "multiplicative cut context".into() })
            }
        }
        Inference::WL { formula } | Inference::WR { formula } => {
            let side = if rule == RuleId::WL { Side::Left } else { Side::Right };
            need(conclusion, side, formula, rule)?;
            if premisses.len() != 1 {
                return Err(KernelError::Arity { rule, expected: 1, found: premisses.len() });
            }
            let p = premisses[0];
            if *p == conclusion.without(side, formula) || p == conclusion {
                Ok(())
            } else {
                Err(KernelError::PremissMismatch {
                    rule,
                    index: 0,
                    expected: conclusion.without(side, formula).to_string(),
                })
            }
        }
        _ => {
            let canonical = apply_rule(conclusion, inf)?;
            if canonical.len() != premisses.len() {
                return Err(KernelError::Arity { rule, expected: canonical.len(), found: premisses.len() });
            }
            let kept = inf.consumed();
            for (index, (want, got)) in canonical.iter().zip(premisses.iter()).enumerate() {
                if want == *got {
                    continue;
                }
                if let Some((side, e)) = &kept {
                    if want.with_unchecked(*side, e.clone()) == **got {
                        continue;
                    }
                }
                return Err(KernelError::PremissMismatch { rule, index, expected: want.to_string() });
            }
            Ok(())
        }
    }
}
