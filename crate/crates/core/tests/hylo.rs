use hxproof::gen::{random_sequent, Signature};
use hxproof::hylo::{
    brauner_premisses, display_shape, is_hylo, nom2_closed, prove_hylo, random_brauner_instance, simulate_brauner,
    BraunerRule,
};
use hxproof::kernel::{check_derivation, check_fragment, Derivation, RuleId, Sequent};
use hxproof::search::{prove, SearchConfig, SearchError, SearchResult};
use hxproof::syntax::{parse_node, parse_sequent, sym, NodeExpr};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn seq(text: &str) -> Sequent {
    parse_sequent(text).unwrap()
}

fn node(text: &str) -> NodeExpr {
    parse_node(text).unwrap()
}

fn simulation_checks(rule: &BraunerRule, goal: &Sequent) -> Derivation {
    let d = simulate_brauner(rule, goal).unwrap();
    let ps = brauner_premisses(rule, goal).unwrap();
    assert_eq!(d.conclusion, *goal);
    assert_eq!(d.open_leaves().into_iter().cloned().collect::<Vec<_>>(), ps);
    assert!(check_fragment(&d, &ps).is_ok(), "{}: {:?}", rule.name(), check_fragment(&d, &ps).unwrap_err());
    d
}

fn no_comparison_rules(d: &Derivation) -> bool {
    d.rules_used().iter().all(|r| !r.is_comparison_rule())
}

#[test]
fn fragment_membership() {
    assert!(is_hylo(&node("@i <a> p")));
    assert!(!is_hylo(&node("<i: =c j:>")));
    let q1 = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../golden/example1-queries.txt")).unwrap();
    let first = q1.lines().find(|l| !l.trim().is_empty()).unwrap();
    assert!(!is_hylo(&node(first)));
    assert!(is_hylo(&seq("@i p, @j <a> #i |- @i [a] q")));
    assert!(!is_hylo(&seq("<i: =c j:> |- @i p")));
}

#[test]
fn prove_hylo_examples() {
    let cfg = SearchConfig::default();
    let r = prove_hylo(&seq("|- @i (p -> p)"), &cfg).unwrap();
    assert!(r.is_proved());
    let r = prove_hylo(&seq("@j #i, @i <a> #k |- @j <a> #k"), &cfg).unwrap();
    let SearchResult::Proved(d) = r else { panic!("Nom2-style goal not proved") };
    assert!(check_derivation(&d).is_ok());
    assert!(is_hylo(&d));
    assert!(prove_hylo(&seq("|- @i p"), &cfg).unwrap().is_refuted());
    assert!(matches!(prove_hylo(&seq("|- @i <a =c b>"), &cfg), Err(SearchError::Fragment(_))));
    let bad = SearchConfig { max_fresh_nominals: 0, ..cfg };
    assert!(matches!(prove_hylo(&seq("|- @i (p -> p)"), &bad), Err(SearchError::NonPositive(_))));
}

#[test]
fn nom1_simulation() {
    let goal = seq("@k q |- @j (p -> <a> #k)");
    simulation_checks(&BraunerRule::Nom1 { i: sym("i"), j: sym("j"), phi: node("p -> <a> #k") }, &goal);
}

#[test]
fn nom2_simulation_follows_the_displayed_tree() {
    let goal = seq("@j #i, @i <a> #k |- @j <a> #k");
    let d = simulation_checks(&BraunerRule::Nom2 { i: sym("i"), j: sym("j"), k: sym("k"), a: sym("a") }, &goal);
    assert_eq!(display_shape(&d), ["Cut", "open", "Cut", "WL", "open", "S1", "WL", "open"]);
}

#[test]
fn box_simulations() {
    let goal = seq("@i [a] p |- @k q");
    simulation_checks(&BraunerRule::BoxL { i: sym("i"), a: sym("a"), phi: node("p"), j: sym("j") }, &goal);
    let goal = seq("@k q |- @i [a] (p | q)");
    simulation_checks(&BraunerRule::BoxR { i: sym("i"), a: sym("a"), phi: node("p | q"), j: sym("m") }, &goal);
    let stale = BraunerRule::BoxR { i: sym("i"), a: sym("a"), phi: node("p"), j: sym("k") };
    assert!(simulate_brauner(&stale, &seq("@k q |- @i [a] p")).is_err());
}

#[test]
fn ref_is_at_t() {
    let goal = seq("@i p |- @j q");
    let d = simulation_checks(&BraunerRule::Ref { i: sym("i") }, &goal);
    assert_eq!(d.rule_id(), Some(RuleId::AtT));
    assert_eq!(d.size(), 2);
}

#[test]
fn conjunction_simulations() {
    let goal = seq("@i (p & <a> q) |- @j r");
    simulation_checks(&BraunerRule::AndL { i: sym("i"), phi: node("p"), psi: node("<a> q") }, &goal);
    let goal = seq("@j r |- @i (p & q)");
    simulation_checks(&BraunerRule::AndR { i: sym("i"), phi: node("p"), psi: node("q") }, &goal);
}

#[test]
fn mismatched_conclusions_are_rejected() {
    let rule = BraunerRule::AndR { i: sym("i"), phi: node("p"), psi: node("q") };
    assert!(brauner_premisses(&rule, &seq("|- @i p")).is_err());
    assert!(simulate_brauner(&rule, &seq("|- @i p")).is_err());
}

#[test]
fn closed_nom2_instance_checks() {
    let d = nom2_closed().unwrap();
    assert!(check_derivation(&d).is_ok());
    assert!(is_hylo(&d));
    assert!(no_comparison_rules(&d));
}

#[test]
fn brauner_rules_roundtrip_through_json() {
    let rule = BraunerRule::BoxL { i: sym("i"), a: sym("a"), phi: node("p"), j: sym("j") };
    let text = serde_json::to_string(&rule).unwrap();
    assert!(text.contains("\"rule\":\"BoxL\""));
    assert_eq!(serde_json::from_str::<BraunerRule>(&text).unwrap(), rule);
}

#[test]
fn box_rules_with_principals_already_in_context() {
    let goal = seq("@k [a] p |- @k ~p");
    simulation_checks(&BraunerRule::BoxL { i: sym("k"), a: sym("a"), phi: node("p"), j: sym("k") }, &goal);
    let goal = seq("@i <a> ~p |- @i [a] p");
    simulation_checks(&BraunerRule::BoxR { i: sym("i"), a: sym("a"), phi: node("p"), j: sym("m") }, &goal);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simulations_check_on_random_instances(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rule, goal) = random_brauner_instance(&mut rng, &Signature::small_hylo());
        let d = simulate_brauner(&rule, &goal).unwrap();
        let ps = brauner_premisses(&rule, &goal).unwrap();
        prop_assert!(check_fragment(&d, &ps).is_ok());
        prop_assert_eq!(&d.conclusion, &goal);
    }

    #[test]
    fn hylo_search_stays_in_the_fragment(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let goal = random_sequent(&mut rng, &Signature::small_hylo(), 2, 2);
        prop_assert!(is_hylo(&goal));
        let cfg = SearchConfig { max_depth: 6, ..SearchConfig::default() };
        let r = prove_hylo(&goal, &cfg).unwrap();
        if let SearchResult::Proved(d) = &r {
            prop_assert!(check_derivation(d).is_ok());
            prop_assert!(is_hylo(d));
            prop_assert!(no_comparison_rules(d));
        }
        let full = prove(&goal, &cfg);
        let clash = (r.is_proved() && full.is_refuted()) || (r.is_refuted() && full.is_proved());
        prop_assert!(!clash);
    }
}
