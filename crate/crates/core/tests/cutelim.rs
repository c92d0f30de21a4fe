use hxproof::corpus::{inverse_construction, paste_instances, random_composition};
use hxproof::cutelim::{
    cut_complexities, cut_complexity, cut_weight, eliminate_cuts, eliminate_cuts_partial, eliminate_cuts_traced,
    reduce_once, CutComplexity, CutElimError, ReductionCase, DEFAULT_STEP_LIMIT,
};
use hxproof::derived::{invert, paste_closed, reflexivity};
use hxproof::gen::Signature;
use hxproof::kernel::{check_derivation, Derivation, Inference, RuleId, Sequent};
use hxproof::search::{prove, SearchConfig, SearchResult};
use hxproof::syntax::{parse_node, parse_path, parse_sequent, sym, CmpKind, NodeExpr};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn seq(text: &str) -> Sequent {
    parse_sequent(text).unwrap()
}

fn node(text: &str) -> NodeExpr {
    parse_node(text).unwrap()
}

fn ax(text: &str, formula: &str) -> Derivation {
    Derivation::rule(seq(text), Inference::Ax { formula: node(formula) }, vec![]).unwrap()
}

fn proved(goal: &Sequent) -> Derivation {
    match prove(goal, &SearchConfig::default()) {
        SearchResult::Proved(d) => d,
        other => panic!("{goal} not proved: {}", other.label()),
    }
}

/// `goal` by `inf`, with each premiss closed by search.
fn by(goal: &Sequent, inf: Inference) -> Derivation {
    let d = Derivation::refine(goal, inf).unwrap();
    let kids = d.open_leaves().into_iter().map(proved).collect();
    d.plug(kids).unwrap()
}

fn cut_free_search() -> SearchConfig {
    SearchConfig { cut_free: true, ..SearchConfig::default() }
}

fn assert_cut_free_result(d: &Derivation, out: &Derivation) {
    assert!(out.is_cut_free());
    assert_eq!(out.conclusion, d.conclusion);
    assert!(check_derivation(out).is_ok(), "{:?}", check_derivation(out).unwrap_err());
}

#[test]
fn complexity_of_a_cut_over_two_axioms() {
    let c = Derivation::cut(ax("@i p |- @i p", "@i p"), ax("@i p |- @i p", "@i p"), &node("@i p")).unwrap();
    assert_eq!(cut_complexity(&c).unwrap(), CutComplexity { k: 2, h: 2 });
    assert_eq!(cut_complexities(&c), vec![CutComplexity { k: 2, h: 2 }]);
    let out = eliminate_cuts(&c).unwrap();
    assert_cut_free_result(&c, &out);
}

#[test]
fn neq_comparisons_weigh_one_extra() {
    assert_eq!(cut_weight(&node("<i: =c j:>")), node("<i: =c j:>").size());
    assert_eq!(cut_weight(&node("<i: !=c j:>")), node("<i: !=c j:>").size() + 1);
}

#[test]
fn complexity_of_the_inverse_at_l_cut() {
    let goal = seq("@j @i p |- @i p");
    let proof = proved(&goal);
    let inf = Inference::AtL { j: sym("j"), i: sym("i"), body: node("p") };
    let d = invert(&inf, &proof).unwrap().remove(0);
    assert_eq!(d.conclusion, seq("@i p |- @i p"));
    assert_eq!(d.cut_count(), 1);
    let cx = cut_complexities(&d);
    assert_eq!(cx.len(), 1);
    assert_eq!(cx[0].k, 3);
    let out = eliminate_cuts(&d).unwrap();
    assert_cut_free_result(&d, &out);
}

#[test]
fn axiom_against_bottom_leaves_one_rule() {
    let left = ax("@i p |- @i p", "@i p");
    let right = Derivation::rule(seq("@i p, @j false |- @k q"), Inference::Bot { i: sym("j") }, vec![]).unwrap();
    let c = Derivation::cut(left, right, &node("@i p")).unwrap();
    assert_eq!(cut_complexity(&c).unwrap().h, 2);
    let (out, step) = reduce_once(&c).unwrap();
    assert_eq!(step.case, ReductionCase::Axiom);
    assert!(step.introduced.is_empty());
    assert_eq!(out.size(), 1);
    assert_eq!(out.rule_id(), Some(RuleId::Bot));
    assert_cut_free_result(&c, &out);
}

#[test]
fn cut_permutes_above_a_non_principal_comparison_rule() {
    let left = proved(&seq("|- @i (p -> p)"));
    let goal = seq("@i (p -> p), @k <a =c b> |- @k <b =c a>");
    let cmp_l = Inference::CmpL {
        i: sym("k"),
        alpha: parse_path("a").unwrap(),
        kind: CmpKind::Eq,
        c: sym("c"),
        beta: parse_path("b").unwrap(),
        j: sym("x"),
        k: sym("y"),
    };
    let right = by(&goal, cmp_l);
    let c = Derivation::cut(left.clone(), right.clone(), &node("@i (p -> p)")).unwrap();
    let before = cut_complexity(&c).unwrap();
    assert_eq!(before.h, left.height() + right.height());
    let (out, step) = reduce_once(&c).unwrap();
    assert_eq!(step.case, ReductionCase::PermuteRight);
    assert_eq!(out.rule_id(), Some(RuleId::CmpL));
    assert!(step.descends());
    assert!(step.introduced.iter().all(|cx| cx.k == before.k && cx.h < before.h));
    assert!(check_derivation(&out).is_ok());
    let done = eliminate_cuts(&c).unwrap();
    assert_cut_free_result(&c, &done);
}

#[test]
fn principal_diamond_pair_yields_two_smaller_cuts() {
    let phi = node("@i <a> p");
    let left = by(&seq("@i <a> #j, @j p |- @i <a> p"), Inference::DiaR { i: sym("i"), a: sym("a"), body: node("p"), j: sym("j") });
    let right = by(&seq("@i <a> p |- @i <a> true"), Inference::DiaL { i: sym("i"), a: sym("a"), body: node("p"), j: sym("m") });
    let c = Derivation::cut(left, right, &phi).unwrap();
    let before = cut_complexity(&c).unwrap();
    let (out, step) = reduce_once(&c).unwrap();
    assert_eq!(step.case, ReductionCase::Principal);
    assert_eq!(step.introduced.len(), 2);
    assert!(step.introduced.iter().any(|cx| cx.k == before.k && cx.h < before.h));
    assert!(step.introduced.iter().any(|cx| cx.k == cut_weight(&node("@j p"))));
    assert!(check_derivation(&out).is_ok());
    let done = eliminate_cuts(&c).unwrap();
    assert_cut_free_result(&c, &done);
}

#[test]
fn right_right_case_uses_s2() {
    let phi = node("@i <a> #m");
    let left = by(&seq("@i <a> #j, @j #m |- @i <a> #m"), Inference::DiaR { i: sym("i"), a: sym("a"), body: NodeExpr::nom("m"), j: sym("j") });
    let cmp_r = Inference::CmpR {
        i: sym("i"),
        alpha: parse_path("a").unwrap(),
        kind: CmpKind::Eq,
        c: sym("c"),
        beta: parse_path("a").unwrap(),
        j: sym("m"),
        k: sym("m"),
    };
    let right = by(&seq("@i <a> #m |- @i <a =c a>"), cmp_r);
    let c = Derivation::cut(left, right, &phi).unwrap();
    let (out, step) = reduce_once(&c).unwrap();
    assert_eq!(step.case, ReductionCase::RightRight);
    assert!(out.rules_used().contains(&RuleId::S2));
    assert!(out.rules_used().contains(&RuleId::WL));
    assert!(step.descends());
    assert!(check_derivation(&out).is_ok());
    let done = eliminate_cuts(&c).unwrap();
    assert_cut_free_result(&c, &done);
}

#[test]
fn implication_pair_reduces_to_smaller_cuts() {
    let phi = node("@i (p -> q)");
    let left = by(&seq("@i q |- @i (p -> q)"), Inference::ImpR { i: sym("i"), lhs: node("p"), rhs: node("q") });
    let right = by(&seq("@i (p -> q), @i p |- @i q"), Inference::ImpL { i: sym("i"), lhs: node("p"), rhs: node("q") });
    let c = Derivation::cut(left, right, &phi).unwrap();
    let (out, trace) = eliminate_cuts_traced(&c, DEFAULT_STEP_LIMIT).unwrap();
    assert!(trace.iter().any(|s| s.case == ReductionCase::Principal));
    assert!(trace.iter().all(|s| s.descends()));
    assert_cut_free_result(&c, &out);
}

#[test]
fn inverse_constructions_become_cut_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sig = Signature::small();
    let cfg = cut_free_search();
    for rule in [RuleId::AtL, RuleId::DiaL, RuleId::CmpL] {
        for _ in 0..3 {
            let d = inverse_construction(&mut rng, &sig, rule, &cfg).unwrap();
            assert!(d.cut_count() >= 1);
            let out = eliminate_cuts(&d).unwrap();
            assert_cut_free_result(&d, &out);
        }
    }
}

#[test]
fn cut_free_input_is_a_fixpoint() {
    let d = proved(&seq("@i <a> p |- @i <a> (p | q)"));
    assert!(d.is_cut_free());
    assert_eq!(eliminate_cuts(&d).unwrap(), d.flatten());
    assert!(matches!(reduce_once(&d), Err(CutElimError::NoCut)));
}

#[test]
fn paste_translation_gets_stuck_on_a_path_fact() {
    let inst = paste_instances().remove(0);
    let d = paste_closed(&inst).unwrap();
    assert_eq!(d.cut_count(), 3);
    let partial = eliminate_cuts_partial(&d, DEFAULT_STEP_LIMIT).unwrap();
    assert!(!partial.is_complete());
    assert!(partial.derivation.cut_count() < 3);
    assert_eq!(partial.derivation.conclusion, d.conclusion);
    assert!(check_derivation(&partial.derivation).is_ok());
    assert!(partial.trace.iter().all(|s| s.descends()));
    match eliminate_cuts(&d) {
        Err(CutElimError::Stuck { left, right, .. }) => {
            assert_eq!((left, right), (RuleId::AtR, RuleId::CmpR));
        }
        other => panic!("expected a stuck cut, got {other:?}"),
    }
}

#[test]
fn reflexivity_cuts_are_stuck() {
    let d = reflexivity(&sym("i"), &sym("c")).unwrap();
    assert!(d.cut_count() > 0);
    let partial = eliminate_cuts_partial(&d, DEFAULT_STEP_LIMIT).unwrap();
    assert!(!partial.is_complete());
    assert!(check_derivation(&partial.derivation).is_ok());
    assert_eq!(partial.derivation.conclusion, d.conclusion);
}

#[test]
fn open_leaves_are_reported() {
    let left = Derivation::open(seq("|- @i p"));
    let right = ax("@i p |- @i p", "@i p");
    let c = Derivation::cut(left, right, &node("@i p")).unwrap();
    assert!(matches!(reduce_once(&c), Err(CutElimError::OpenLeaf(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_compositions_become_cut_free(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_composition(&mut rng, &Signature::small(), &cut_free_search()).unwrap();
        let (out, trace) = eliminate_cuts_traced(&d, DEFAULT_STEP_LIMIT).unwrap();
        prop_assert!(out.is_cut_free());
        prop_assert_eq!(&out.conclusion, &d.conclusion);
        prop_assert!(check_derivation(&out).is_ok());
        prop_assert!(trace.iter().all(|s| s.descends()));
    }

    #[test]
    fn single_reductions_preserve_the_end_sequent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_composition(&mut rng, &Signature::small(), &cut_free_search()).unwrap();
        let (out, step) = reduce_once(&d).unwrap();
        prop_assert_eq!(&out.conclusion, &d.conclusion);
        prop_assert!(check_derivation(&out).is_ok());
        prop_assert!(step.descends());
    }
}
