use hxproof::derived::reflexivity;
use hxproof::gen::{random_model, ProofGen, Signature};
use hxproof::kernel::{
    apply_rule, check_derivation, check_fragment, Derivation, Inference, KernelError, RuleId, Sequent, Side, Step,
};
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

fn ax(text: &str, formula: &str) -> Derivation {
    Derivation::rule(seq(text), Inference::Ax { formula: node(formula) }, vec![]).unwrap()
}

#[test]
fn eq_t_on_reflexivity_goal() {
    let goal = seq("|- @i <eps =c eps>");
    let ps = apply_rule(&goal, &Inference::EqT { i: sym("i"), c: sym("c") }).unwrap();
    assert_eq!(ps, vec![seq("<i: =c i:> |- @i <eps =c eps>")]);
}

#[test]
fn axiom_closes_a_branch() {
    let goal = seq("@i p, @j q |- @i p, @k r");
    assert!(apply_rule(&goal, &Inference::Ax { formula: node("@i p") }).unwrap().is_empty());
    let bad = apply_rule(&seq("@i (p -> p) |- @i (p -> p)"), &Inference::Ax { formula: node("@i (p -> p)") });
    assert!(matches!(bad, Err(KernelError::SideCondition { rule: RuleId::Ax, .. })));
}

#[test]
fn s3_adds_the_transported_comparison() {
    let goal = seq("@i #j, <i: =c k:> |- @i p");
    let inf = Inference::S3 { i: sym("i"), j: sym("j"), k: sym("k"), c: sym("c") };
    assert_eq!(apply_rule(&goal, &inf).unwrap(), vec![seq("<j: =c k:>, @i #j, <i: =c k:> |- @i p")]);
}

#[test]
fn rejects_missing_principals_and_stale_nominals() {
    let goal = seq("|- @i p");
    let missing = apply_rule(&goal, &Inference::Bot { i: sym("i") });
    assert!(matches!(missing, Err(KernelError::PrincipalMissing { .. })));
    let dia = seq("@i <a> p |- @j q");
    let stale = Inference::DiaL { i: sym("i"), a: sym("a"), body: node("p"), j: sym("j") };
    assert!(matches!(apply_rule(&dia, &stale), Err(KernelError::SideCondition { .. })));
    let cmp = seq("@i <a =c a> |- ");
    let same = Inference::CmpL {
        i: sym("i"),
        alpha: hxproof::syntax::PathExpr::atom("a"),
        kind: hxproof::syntax::CmpKind::Eq,
        c: sym("c"),
        beta: hxproof::syntax::PathExpr::atom("a"),
        j: sym("x"),
        k: sym("x"),
    };
    assert!(matches!(apply_rule(&cmp, &same), Err(KernelError::SideCondition { .. })));
    let s1 = Inference::S1 { i: sym("i"), j: sym("j"), body: node("p -> p") };
    assert!(matches!(apply_rule(&seq("@i #j, @i (p -> p) |-"), &s1), Err(KernelError::SideCondition { .. })));
}

#[test]
fn sequents_are_restricted_sets() {
    assert!(matches!(Sequent::new([node("p")], []), Err(KernelError::Shape(_))));
    let s = seq("@i p |- @j q");
    assert_eq!(s.with(Side::Left, node("@i p")).unwrap(), s);
    assert!(seq("<i: !=c j:> |-").contains(Side::Left, &node("<i: !=c j:>")));
}

#[test]
fn transcribed_reflexivity_checks() {
    let d = reflexivity(&sym("i"), &sym("c")).unwrap();
    assert!(check_derivation(&d).is_ok());
    assert_eq!(d.conclusion, seq("|- @i <eps =c eps>"));
    assert_eq!(d.height(), 6);
    let names: Vec<String> = {
        let mut out = Vec::new();
        let mut cur = &d;
        loop {
            out.push(match &cur.step {
                Step::Rule { inference, .. } => inference.rule().to_string(),
                Step::Derived { name, .. } => name.clone(),
                Step::Open => "open".into(),
            });
            match cur.premisses().first() {
                Some(p) => cur = p,
                None => break,
            }
        }
        out
    };
    assert_eq!(names, ["AtT", "TopL", "InvAndL", "CmpR", "EqT", "Ax"]);
}

fn drop_eq_t(d: &Derivation) -> Derivation {
    match &d.step {
        Step::Rule { inference: Inference::EqT { .. }, premisses } => {
            Derivation { conclusion: d.conclusion.clone(), step: premisses[0].step.clone() }
        }
        Step::Rule { inference, premisses } => Derivation {
            conclusion: d.conclusion.clone(),
            step: Step::Rule { inference: inference.clone(), premisses: premisses.iter().map(drop_eq_t).collect() },
        },
        Step::Derived { name, expansion, premisses } => Derivation {
            conclusion: d.conclusion.clone(),
            step: Step::Derived {
                name: name.clone(),
                expansion: expansion.clone(),
                premisses: premisses.iter().map(drop_eq_t).collect(),
            },
        },
        Step::Open => d.clone(),
    }
}

#[test]
fn deleting_eq_t_breaks_the_axiom_leaf() {
    let d = reflexivity(&sym("i"), &sym("c")).unwrap();
    let bad = drop_eq_t(&d);
    let violations = check_derivation(&bad).unwrap_err();
    assert_eq!(violations.len(), 1);
    let v = &violations[0];
    assert_eq!(v.path, "0.0.0.0");
    assert!(matches!(v.error, KernelError::PrincipalMissing { rule: RuleId::Ax, side: Side::Left, .. }));
}

#[test]
fn single_axiom_leaf_checks() {
    let d = ax("@i p |- @i p", "@i p");
    assert!(check_derivation(&d).is_ok());
    assert_eq!(d.height(), 1);
}

#[test]
fn open_leaves_are_rejected_unless_expected() {
    let goal = seq("|- @i (p -> p)");
    let d = Derivation::refine(&goal, Inference::ImpR { i: sym("i"), lhs: node("p"), rhs: node("p") }).unwrap();
    assert!(check_derivation(&d).is_err());
    assert!(check_fragment(&d, &[seq("@i p |- @i p")]).is_ok());
    let closed = d.plug(vec![ax("@i p |- @i p", "@i p")]).unwrap();
    assert!(check_derivation(&closed).is_ok());
}

#[test]
fn cut_merges_contexts_and_measures_height() {
    let left = ax("@i p |- @i p", "@i p");
    let right = ax("@i p, @j q |- @i p", "@i p");
    let c = Derivation::cut(left.clone(), right.clone(), &node("@i p")).unwrap();
    assert_eq!(c.conclusion, seq("@i p, @j q |- @i p"));
    assert_eq!(c.cut_height().unwrap(), 2);
    assert!(check_derivation(&c).is_ok());
    assert!(matches!(left.cut_height(), Err(KernelError::NotCut)));
    assert!(matches!(Derivation::cut(left, right, &node("@j q")), Err(KernelError::CutMismatch(_))));
}

#[test]
fn weakening_adds_one_expression() {
    let d = ax("@i p |- @i p", "@i p").weaken(Side::Left, node("@j q")).unwrap();
    assert_eq!(d.conclusion, seq("@i p, @j q |- @i p"));
    assert!(check_derivation(&d).is_ok());
    let dup = ax("@i p |- @i p", "@i p").weaken(Side::Right, node("@i p")).unwrap();
    assert_eq!(dup.conclusion, seq("@i p |- @i p"));
    assert_eq!(dup.rule_id(), Some(RuleId::WR));
    assert!(check_derivation(&dup).is_ok());
    let many = ax("@i p |- @i p", "@i p").weaken_to(&seq("@i p, @j q |- @i p, @k r")).unwrap();
    assert_eq!(many.count_rule(RuleId::WL) + many.count_rule(RuleId::WR), 2);
    assert!(check_derivation(&many).is_ok());
}

#[test]
fn renaming_a_fresh_nominal_keeps_the_derivation_valid() {
    let goal = seq("@i <a> p |- @i <a> p");
    let dl = Inference::DiaL { i: sym("i"), a: sym("a"), body: node("p"), j: sym("m") };
    let d = Derivation::refine(&goal, dl).unwrap();
    let leaf = d.open_leaves()[0].clone();
    let dr = Inference::DiaR { i: sym("i"), a: sym("a"), body: node("p"), j: sym("m") };
    let close = Derivation::refine(&leaf, dr).unwrap();
    let top = close.open_leaves()[0].clone();
    let closed = d.plug(vec![close.plug(vec![Derivation::rule(top, Inference::Ax { formula: node("@m p") }, vec![]).unwrap()]).unwrap()]).unwrap();
    assert!(check_derivation(&closed).is_ok());
    let renamed = closed.rename_nominal("m", &sym("n")).unwrap();
    assert!(check_derivation(&renamed).is_ok());
    assert!(!renamed.all_nominals().contains(&sym("m")));
    assert_eq!(closed.rename_nominal("m", &sym("m")).unwrap(), closed);
    assert!(matches!(closed.rename_nominal("m", &sym("i")), Err(KernelError::Capture(_))));
}

#[test]
fn derivation_json_roundtrips() {
    let d = reflexivity(&sym("i"), &sym("c")).unwrap();
    let text = serde_json::to_string(&d).unwrap();
    let back: Derivation = serde_json::from_str(&text).unwrap();
    assert_eq!(back, d);
    assert!(check_derivation(&back).is_ok());
}

#[test]
fn rule_names_roundtrip() {
    for r in RuleId::ALL {
        assert_eq!(r.name().parse::<RuleId>().unwrap(), r);
    }
    assert_eq!(RuleId::non_structural().count(), 20);
}

fn eigen_fresh(d: &Derivation) -> bool {
    let mut ok = true;
    d.flatten().visit(&mut |n| {
        if let Some(inf) = n.inference() {
            let noms = n.conclusion.nominals();
            ok &= inf.eigen_nominals().iter().all(|j| !noms.contains(j));
        }
    });
    ok
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_derivations_check(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = Signature::small();
        let d = ProofGen::new(&mut rng, &sig, 2).derivation(25);
        prop_assert!(check_derivation(&d).is_ok());
        prop_assert!(eigen_fresh(&d));
        let back: Derivation = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn checked_derivations_are_valid_in_small_models(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = Signature::small();
        let d = ProofGen::new(&mut rng, &sig, 2).derivation(25);
        let noms = d.conclusion.nominals();
        for _ in 0..20 {
            let m = random_model(&mut rng, &sig, 5, noms.iter());
            prop_assert!(m.check_sequent_validity(&d.conclusion).unwrap());
        }
    }

    #[test]
    fn readding_an_expression_is_a_no_op(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = hxproof::gen::random_sequent(&mut rng, &Signature::small(), 2, 3);
        for e in s.ante().clone() {
            prop_assert_eq!(s.with(Side::Left, e).unwrap(), s.clone());
        }
    }
}
