use hxproof::gen::{random_model, random_node, random_path, Signature};
use hxproof::kernel::Sequent;
use hxproof::model::{find_countermodel, ingest_datagraph, is_countermodel, DataGraph, HybridDataModel, ModelError, ModelJson};
use hxproof::syntax::{parse_node, parse_sequent, CmpKind, NodeExpr, PathExpr};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const QUERIES: [&str; 3] = [
    "@i1 <i1: born (Date?) =val i1: friends born (Date?)>",
    "@i2 [i2: born (Date?) !=val i2: friends born (Date?)]",
    "@i1 (<i1: (Person?) =name i2: (Person?)> & <i1: born (Date?) !=val i2: born (Date?)>)",
];

fn example1() -> HybridDataModel {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../golden/example1-datagraph.json")).unwrap();
    let dg: DataGraph = serde_json::from_str(&text).unwrap();
    ingest_datagraph(&dg).unwrap()
}

fn ids(m: &HybridDataModel, names: &[&str]) -> Vec<usize> {
    names.iter().map(|n| m.node(n).unwrap()).collect()
}

#[test]
fn example1_model_is_the_listed_one() {
    let m = example1();
    assert_eq!(m.size(), 6);
    let pair = |a: &str, b: &str| (m.node(a).unwrap(), m.node(b).unwrap());
    let friends = vec![pair("n1", "n2"), pair("n2", "n1"), pair("n2", "n3"), pair("n3", "n2")];
    let mut got = m.relation("friends");
    got.sort();
    let mut want = friends;
    want.sort();
    assert_eq!(got, want);
    assert_eq!(m.relation("born"), vec![pair("n1", "n4"), pair("n2", "n5"), pair("n3", "n6")]);
    let nontrivial = |c: &str| m.classes(c).into_iter().filter(|cl| cl.len() > 1).collect::<Vec<_>>();
    assert_eq!(nontrivial("name"), vec![ids(&m, &["n1", "n3"])]);
    assert_eq!(nontrivial("val"), vec![ids(&m, &["n4", "n5"])]);
    assert_eq!(m.denotation("i1").unwrap(), m.node("n1").unwrap());
    assert_eq!(m.denotation("i2").unwrap(), m.node("n3").unwrap());
    assert_eq!(m.valuation("Person").iter().collect::<Vec<_>>(), ids(&m, &["n1", "n2", "n3"]));
    assert_eq!(m.valuation("Date").iter().collect::<Vec<_>>(), ids(&m, &["n4", "n5", "n6"]));
}

#[test]
fn example1_queries_hold_everywhere() {
    let m = example1();
    for q in QUERIES {
        let phi = parse_node(q).unwrap();
        for n in 0..m.size() {
            assert!(m.eval_node(n, &phi).unwrap(), "{q} at {}", m.name(n));
        }
    }
}

#[test]
fn example1_query1_for_i2_fails_everywhere() {
    let m = example1();
    let phi = parse_node("<i2: born (Date?) =val i2: friends born (Date?)>").unwrap();
    for n in 0..m.size() {
        assert!(!m.eval_node(n, &phi).unwrap());
    }
}

#[test]
fn evaluates_paths() {
    let m = example1();
    let (n1, n2, n5) = (m.node("n1").unwrap(), m.node("n2").unwrap(), m.node("n5").unwrap());
    assert!(m.eval_path(n1, n2, &PathExpr::atom("friends")).unwrap());
    assert!(m.eval_path(n1, n5, &PathExpr::concat(PathExpr::atom("friends"), PathExpr::atom("born"))).unwrap());
    for n in 0..m.size() {
        assert!(m.eval_path(n, n, &PathExpr::eps()).unwrap());
        assert!(!m.eval_node(n, &NodeExpr::Bottom).unwrap());
    }
    assert!(!m.eval_path(n1, n2, &PathExpr::eps()).unwrap());
}

#[test]
fn box_compare_matches_the_example() {
    let m = example1();
    let q2 = parse_node("[i2: born (Date?) !=val i2: friends born (Date?)]").unwrap();
    let NodeExpr::Implies(inner, _) = &q2 else { panic!("box is a negation") };
    let NodeExpr::Compare(a, _, c, b) = &**inner else { panic!("negated comparison") };
    for n in 0..m.size() {
        assert!(m.eval_box_compare(n, a, b, CmpKind::Neq, c).unwrap());
        assert!(m.eval_node(n, &q2).unwrap());
    }
}

#[test]
fn box_compare_is_vacuous_on_empty_paths() {
    let m = HybridDataModel::with_size(2).unwrap();
    assert!(m.eval_box_compare(0, &PathExpr::atom("a"), &PathExpr::eps(), CmpKind::Eq, "c").unwrap());
}

#[test]
fn errors_on_bad_input() {
    let m = HybridDataModel::with_size(1).unwrap();
    assert_eq!(m.eval_node(3, &NodeExpr::Bottom), Err(ModelError::NodeOutOfRange(3)));
    assert_eq!(m.eval_node(0, &NodeExpr::nom("i")), Err(ModelError::UnassignedNominal("i".into())));
    assert_eq!(HybridDataModel::new(Vec::<String>::new()), Err(ModelError::Empty));
}

#[test]
fn satisfies_sets() {
    let m = example1();
    assert!(m.satisfies_set(0, []).unwrap());
    assert!(!m.satisfies_set(0, [&NodeExpr::Bottom]).unwrap());
    let s = parse_sequent("@i1 Person, @i1 <friends> #n2 |- @i2 Person").unwrap();
    let mut m = m;
    m.assign("n2", 1).unwrap();
    assert!(m.satisfies_set(0, s.ante()).unwrap());
}

#[test]
fn sequent_validity_examples() {
    let mut m = HybridDataModel::with_size(2).unwrap();
    m.assign("i", 0).unwrap();
    let bot = parse_sequent("@i false |- @i p").unwrap();
    assert!(m.check_sequent_validity(&bot).unwrap());
    let refl = parse_sequent("|- @i <eps =c eps>").unwrap();
    assert!(m.check_sequent_validity(&refl).unwrap());
    let open = parse_sequent("|- @i p").unwrap();
    assert!(!m.check_sequent_validity(&open).unwrap());
}

#[test]
fn ingests_small_graphs() {
    let single: DataGraph = serde_json::from_str(r#"{"nodes":[{"id":"a"}]}"#).unwrap();
    let m = ingest_datagraph(&single).unwrap();
    assert_eq!(m.size(), 1);
    assert_eq!(m.classes("c"), vec![vec![0]]);
    let shared: DataGraph = serde_json::from_str(
        r#"{"nodes":[{"id":"a","attrs":{"c":1}},{"id":"b","attrs":{"c":1}},{"id":"d","attrs":{"c":1}},{"id":"e","attrs":{"c":2}}]}"#,
    )
    .unwrap();
    let m = ingest_datagraph(&shared).unwrap();
    assert_eq!(m.classes("c"), vec![vec![0, 1, 2], vec![3]]);
    let dup: DataGraph =
        serde_json::from_str(r#"{"nodes":[{"id":"a","index":"i"},{"id":"b","index":"i"}]}"#).unwrap();
    assert_eq!(ingest_datagraph(&dup), Err(ModelError::DuplicateIndex("i".into())));
}

#[test]
fn partitions_are_equivalences() {
    let m = example1();
    for c in ["name", "val"] {
        for x in 0..m.size() {
            assert!(m.related(c, x, x));
            for y in 0..m.size() {
                assert_eq!(m.related(c, x, y), m.related(c, y, x));
                for z in 0..m.size() {
                    if m.related(c, x, y) && m.related(c, y, z) {
                        assert!(m.related(c, x, z));
                    }
                }
            }
        }
    }
}

#[test]
fn model_json_roundtrips() {
    let m = example1();
    let j = ModelJson::from(&m);
    let back = HybridDataModel::try_from(&j).unwrap();
    assert_eq!(back, m);
    let text = serde_json::to_string(&m).unwrap();
    let again: HybridDataModel = serde_json::from_str(&text).unwrap();
    assert_eq!(again, m);
}

#[test]
fn default_node_assignment_is_reported() {
    let mut m = HybridDataModel::with_size(2).unwrap();
    m.assign("i", 1).unwrap();
    let s = parse_sequent("|- @i #j").unwrap();
    let defaulted = m.complete_assignment(s.nominals().iter());
    assert_eq!(defaulted, vec![hxproof::syntax::sym("j")]);
    assert_eq!(m.denotation("j").unwrap(), 0);
}

#[test]
fn countermodel_examples() {
    let m = find_countermodel(&parse_sequent("|- @i p").unwrap(), 3).unwrap();
    assert_eq!(m.size(), 1);
    let refl = parse_sequent("|- @i <eps =c eps>").unwrap();
    for n in 1..=3 {
        assert!(find_countermodel(&refl, n).is_none());
    }
    let s = parse_sequent("@i <a> p |- @i p").unwrap();
    assert!(find_countermodel(&s, 1).is_none());
    let m = find_countermodel(&s, 2).unwrap();
    assert_eq!(m.size(), 2);
    assert!(is_countermodel(&m, &s).unwrap());
}

fn oracle_path(m: &HybridDataModel, x: usize, y: usize, alpha: &PathExpr) -> bool {
    match alpha {
        PathExpr::Atom(a) => m.relation(a).contains(&(x, y)),
        PathExpr::Jump(i) => m.denotation(i).unwrap() == y,
        PathExpr::Test(phi) => x == y && oracle_node(m, x, phi),
        PathExpr::Concat(a, b) => (0..m.size()).any(|z| oracle_path(m, x, z, a) && oracle_path(m, z, y, b)),
    }
}

fn oracle_node(m: &HybridDataModel, x: usize, phi: &NodeExpr) -> bool {
    match phi {
        NodeExpr::Prop(p) => m.valuation(p).contains(x),
        NodeExpr::Nominal(i) => m.denotation(i).unwrap() == x,
        NodeExpr::Bottom => false,
        NodeExpr::Implies(a, b) => !oracle_node(m, x, a) || oracle_node(m, x, b),
        NodeExpr::At(i, a) => oracle_node(m, m.denotation(i).unwrap(), a),
        NodeExpr::Diamond(a, b) => m.relation(a).iter().any(|&(s, t)| s == x && oracle_node(m, t, b)),
        NodeExpr::Compare(a, kind, c, b) => {
            let n = m.size();
            (0..n).any(|u| {
                (0..n).any(|v| {
                    oracle_path(m, x, u, a) && oracle_path(m, x, v, b) && m.related(c, u, v) == (*kind == CmpKind::Eq)
                })
            })
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn evaluation_agrees_with_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = Signature::small();
        let m = random_model(&mut rng, &sig, 6, []);
        let phi = random_node(&mut rng, &sig, 3);
        for x in 0..m.size() {
            prop_assert_eq!(m.eval_node(x, &phi).unwrap(), oracle_node(&m, x, &phi));
        }
    }

    #[test]
    fn box_compare_agrees_with_expansion(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = Signature::small();
        let m = random_model(&mut rng, &sig, 5, []);
        let (a, b) = (random_path(&mut rng, &sig, 2), random_path(&mut rng, &sig, 2));
        for kind in [CmpKind::Eq, CmpKind::Neq] {
            let expanded = NodeExpr::box_compare(a.clone(), kind, "c", b.clone());
            for x in 0..m.size() {
                prop_assert_eq!(m.eval_box_compare(x, &a, &b, kind, "c").unwrap(), m.eval_node(x, &expanded).unwrap());
            }
        }
    }

    #[test]
    fn countermodels_refute(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s: Sequent = hxproof::gen::random_sequent(&mut rng, &Signature::small(), 2, 2);
        if let Some(m) = find_countermodel(&s, 2) {
            prop_assert!(!m.check_sequent_validity(&s).unwrap());
        }
    }
}
