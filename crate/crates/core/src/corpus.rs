//! Randomized rule instances and the cut-bearing derivation corpus.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::derived::{invert, paste_closed, PasteInstance};
use crate::gen::{random_node, random_path, random_sequent, ProofGen, Signature};
use crate::kernel::{Derivation, Inference, KernelError, RuleId, Sequent, Side};
use crate::search::{prove, prove_axiom_suite, SearchConfig, SearchResult};
use crate::syntax::{parse_sequent, sym, CmpKind, NodeExpr, PathExpr, Sym};

fn pick<R: Rng>(rng: &mut R, xs: &[Sym]) -> Sym {
    xs.choose(rng).expect("signature component is non-empty").clone()
}

fn kind<R: Rng>(rng: &mut R) -> CmpKind {
    if rng.gen_bool(0.5) {
        CmpKind::Eq
    } else {
        CmpKind::Neq
    }
}

fn at(i: &Sym, e: NodeExpr) -> NodeExpr {
    NodeExpr::at_sym(i, e)
}

fn nom(i: &Sym) -> NodeExpr {
    NodeExpr::Nominal(i.clone())
}

/// A random instance of `rule` together with a conclusion it applies to.
/// Eigen-nominals are `x` and `y`, which must not be in `sig`.
pub fn rule_instance<R: Rng>(rng: &mut R, sig: &Signature, rule: RuleId) -> Result<(Inference, Sequent), KernelError> {
    let n = |rng: &mut R| pick(rng, &sig.nominals);
    let (i, j, k) = (n(rng), n(rng), n(rng));
    let a = pick(rng, &sig.modalities);
    let c = pick(rng, &sig.comparisons);
    let body = random_node(rng, sig, 1);
    let (x, y) = (sym("x"), sym("y"));
    let inf = match rule {
        RuleId::Ax => {
            let formula = match rng.gen_range(0..3) {
                0 => at(&i, NodeExpr::Prop(pick(rng, &sig.props))),
                1 => at(&i, nom(&j)),
                _ => NodeExpr::cmp_atom(&i, CmpKind::Eq, &c, &j),
            };
            Inference::Ax { formula }
        }
        RuleId::Bot => Inference::Bot { i },
        RuleId::ImpL => Inference::ImpL { i, lhs: body, rhs: random_node(rng, sig, 1) },
        RuleId::ImpR => Inference::ImpR { i, lhs: body, rhs: random_node(rng, sig, 1) },
        RuleId::AtT => Inference::AtT { i },
        RuleId::At5 => Inference::At5 { i, j, k },
        RuleId::Nom => Inference::Nom { i, j: x },
        RuleId::S1 => {
            let body = match rng.gen_range(0..3) {
                0 => NodeExpr::Prop(pick(rng, &sig.props)),
                1 => NodeExpr::Bottom,
                _ => NodeExpr::Diamond(a, nom(&k).into()),
            };
            Inference::S1 { i, j, body }
        }
        RuleId::S2 => Inference::S2 { i, j, k, a },
        RuleId::S3 => Inference::S3 { i, j, k, c },
        RuleId::AtL => Inference::AtL { j, i, body },
        RuleId::AtR => Inference::AtR { j, i, body },
        RuleId::DiaL => Inference::DiaL { i, a, body, j: x },
        RuleId::DiaR => Inference::DiaR { i, a, body, j },
        RuleId::CmpL => {
            let (alpha, beta) = (random_path(rng, sig, 1), random_path(rng, sig, 1));
            Inference::CmpL { i, alpha, kind: kind(rng), c, beta, j: x, k: y }
        }
        RuleId::CmpR => {
            let (alpha, beta) = (random_path(rng, sig, 1), random_path(rng, sig, 1));
            Inference::CmpR { i, alpha, kind: kind(rng), c, beta, j, k }
        }
        RuleId::EqT => Inference::EqT { i, c },
        RuleId::Eq5 => Inference::Eq5 { i, j, k, c },
        RuleId::NEqL => Inference::NEqL { i, j, c },
        RuleId::NEqR => Inference::NEqR { i, j, c },
        RuleId::Cut | RuleId::WL | RuleId::WR => {
            return Err(KernelError::Macro { name: "Instance".into(), reason: format!("{rule} is structural") })
        }
    };
    let mut goal = random_sequent(rng, sig, 1, 2);
    for (side, e) in inf.principal() {
        goal = goal.with(side, e)?;
    }
    Ok((inf, goal))
}

/// A random instance of `rule` whose conclusion the search proves, with
/// that proof. Gives up after `tries` attempts.
pub fn provable_instance<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    rule: RuleId,
    cfg: &SearchConfig,
    tries: usize,
) -> Result<Option<(Inference, Derivation)>, KernelError> {
    for _ in 0..tries {
        let (inf, goal) = rule_instance(rng, sig, rule)?;
        if let SearchResult::Proved(d) = prove(&goal, cfg) {
            return Ok(Some((inf, d)));
        }
    }
    Ok(None)
}

/// The Paste instances of the corpus: `χ` ranges over valid formulas, `α`
/// and `β` over short paths.
pub fn paste_instances() -> Vec<PasteInstance> {
    let chis = [
        NodeExpr::top(),
        NodeExpr::implies(NodeExpr::prop("q"), NodeExpr::prop("q")),
    ];
    let paths = [
        (PathExpr::atom("b"), PathExpr::atom("e")),
        (PathExpr::atom("b"), PathExpr::atom("b")),
        (PathExpr::concat(PathExpr::atom("b"), PathExpr::atom("e")), PathExpr::atom("e")),
    ];
    let mut out = Vec::new();
    for chi in &chis {
        for (alpha, beta) in &paths {
            for kind in [CmpKind::Eq, CmpKind::Neq] {
                out.push(PasteInstance {
                    i: sym("i"),
                    j: sym("j"),
                    k: sym("k"),
                    a: sym("a"),
                    alpha: alpha.clone(),
                    kind,
                    c: sym("c"),
                    beta: beta.clone(),
                    chi: chi.clone(),
                });
            }
        }
    }
    out
}

/// The inverse construction for `rule` on a random provable instance.
pub fn inverse_construction<R: Rng>(rng: &mut R, sig: &Signature, rule: RuleId, cfg: &SearchConfig) -> Result<Derivation, KernelError> {
    loop {
        if let Some((inf, d)) = provable_instance(rng, sig, rule, cfg, 100)? {
            return Ok(invert(&inf, &d)?.remove(0));
        }
    }
}

/// A cut between a forward-generated derivation and a searched proof that
/// uses one of its succedents.
pub fn random_composition<R: Rng>(rng: &mut R, sig: &Signature, cfg: &SearchConfig) -> Result<Derivation, KernelError> {
    loop {
        let d1 = ProofGen::new(rng, sig, 2).derivation(30);
        let succ: Vec<NodeExpr> = d1.conclusion.succ().iter().cloned().collect();
        let Some(phi) = succ.choose(rng).cloned() else { continue };
        let s2 = random_sequent(rng, sig, 1, 2).with(Side::Left, phi.clone())?;
        if let SearchResult::Proved(d2) = prove(&s2, cfg) {
            return Derivation::cut(d1, d2, &phi);
        }
    }
}

/// Named cut-bearing derivations: the three cut-based inverse constructions
/// `per_kind` times each, the Paste translations, and `random` cut
/// compositions. Searched subproofs are cut-free, so every cut comes from a
/// construction.
pub fn cut_corpus<R: Rng>(rng: &mut R, per_kind: usize, random: usize) -> Result<Vec<(String, Derivation)>, KernelError> {
    let sig = Signature::small();
    let cfg = SearchConfig { cut_free: true, ..SearchConfig::default() };
    let mut out = Vec::new();
    for rule in [RuleId::AtL, RuleId::DiaL, RuleId::CmpL] {
        for n in 0..per_kind {
            out.push((format!("inv-{rule}-{n}"), inverse_construction(rng, &sig, rule, &cfg)?));
        }
    }
    for (n, inst) in paste_instances().iter().enumerate() {
        out.push((format!("paste-{n}"), paste_closed(inst)?));
    }
    for n in 0..random {
        out.push((format!("random-{n}"), random_composition(rng, &sig, &cfg)?));
    }
    Ok(out)
}

/// The inverse `@L` construction on `@_j@_i p ⊢ @_i p`.
pub fn inv_at_l_example() -> Result<Derivation, KernelError> {
    let goal = parse_sequent("@j @i p |- @i p").map_err(|e| KernelError::Shape(e.to_string()))?;
    let SearchResult::Proved(d) = prove(&goal, &SearchConfig::default()) else {
        return Err(KernelError::Macro { name: "Invert".into(), reason: format!("{goal} not proved") });
    };
    let inf = Inference::AtL { j: sym("j"), i: sym("i"), body: NodeExpr::prop("p") };
    Ok(invert(&inf, &d)?.remove(0))
}

/// Golden derivations by file stem: the axiom suite and the inverse `@L`
/// example.
pub fn golden_derivations() -> Result<Vec<(String, Derivation)>, KernelError> {
    let mut out: Vec<(String, Derivation)> =
        prove_axiom_suite()?.into_iter().map(|(k, d)| (k.to_string(), d)).collect();
    out.push(("inv-atL".into(), inv_at_l_example()?));
    Ok(out)
}
