//! One PASS/FAIL line per acceptance criterion. Exits nonzero on any
//! failure other than the pinned known failures.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use hxproof::corpus::{cut_corpus, provable_instance};
use hxproof::cutelim::{eliminate_cuts_traced, CutElimError, DEFAULT_STEP_LIMIT};
use hxproof::gen::{random_model, random_sequent, ProofGen, Signature};
use hxproof::hylo::{
    brauner_premisses, display_shape, is_hylo, prove_hylo, random_brauner_instance, simulate_brauner, BraunerRule,
};
use hxproof::kernel::{apply_rule, check_derivation, check_fragment, Derivation, RuleId};
use hxproof::model::{find_countermodel, ingest_datagraph, DataGraph};
use hxproof::search::{invert, prove, SearchConfig, SearchResult};
use hxproof::syntax::{parse_node, parse_sequent, sym};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;
const C1_BUDGET: Duration = Duration::from_secs(1);
const C2_BUDGET: Duration = Duration::from_secs(1);
const C3_BUDGET: Duration = Duration::from_secs(60);
const C5_BUDGET: Duration = Duration::from_secs(120);
const C3_SEQUENTS: usize = 1000;
const C3_MODELS: usize = 50;
const C3_MAX_NODES: usize = 5;
const C4_INSTANCES: usize = 25;
const C5_PER_KIND: usize = 10;
const C5_RANDOM: usize = 30;
const C5_MIN_CORPUS: usize = 50;
const C6_SEQUENTS: usize = 500;
const C6_MAX_DEPTH: usize = 12;
const C6_MAX_NODES: usize = 3;
const C7_SEQUENTS: usize = 200;

/// Criteria expected to fail, with the failure pinned in `c5`.
const KNOWN_FAILING: [u8; 1] = [5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../golden").join(name)
}

fn c1() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for name in ["reflexivity", "symmetry", "transitivity", "paste", "nom2"] {
        let text = std::fs::read_to_string(golden(&format!("{name}.json"))).expect("golden file");
        let d: Derivation = serde_json::from_str(&text).expect("golden JSON");
        if check_derivation(&d).is_err() {
            bad.push(name);
        }
    }
    let t = start.elapsed();
    outcome(bad.is_empty() && t < C1_BUDGET, format!("5 golden derivations, failing {bad:?}, {t:.2?} (budget {C1_BUDGET:?})"))
}

fn c2() -> Outcome {
    let start = Instant::now();
    let text = std::fs::read_to_string(golden("example1-datagraph.json")).expect("data graph");
    let dg: DataGraph = serde_json::from_str(&text).expect("data graph JSON");
    let m = ingest_datagraph(&dg).expect("ingest");
    let names = |pairs: Vec<(usize, usize)>| -> BTreeSet<(String, String)> {
        pairs.into_iter().map(|(x, y)| (m.name(x).to_string(), m.name(y).to_string())).collect()
    };
    let class = |c: &str, n: &str| -> BTreeSet<String> {
        let id = m.node(n).expect("node");
        m.classes(c).into_iter().find(|cl| cl.contains(&id)).unwrap_or_default().into_iter().map(|x| m.name(x).to_string()).collect()
    };
    let pair = |a: &str, b: &str| (a.to_string(), b.to_string());
    let friends: BTreeSet<_> = [pair("n1", "n2"), pair("n2", "n1"), pair("n2", "n3"), pair("n3", "n2")].into();
    let born: BTreeSet<_> = [pair("n1", "n4"), pair("n2", "n5"), pair("n3", "n6")].into();
    let set = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<BTreeSet<_>>();
    let g = |i: &str| m.denotation(i).map(|n| m.name(n).to_string()).unwrap_or_default();
    let shape = m.size() == 6
        && names(m.relation("friends")) == friends
        && names(m.relation("born")) == born
        && class("name", "n1") == set(&["n1", "n3"])
        && class("val", "n4") == set(&["n4", "n5"])
        && g("i1") == "n1"
        && g("i2") == "n3";
    let queries = std::fs::read_to_string(golden("example1-queries.txt")).expect("queries");
    let mut holds = 0;
    let mut total = 0;
    for q in queries.lines().filter(|l| !l.trim().is_empty()) {
        let phi = parse_node(q).expect("query parses");
        total += 1;
        if (0..m.size()).all(|n| m.eval_node(n, &phi).unwrap_or(false)) {
            holds += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        shape && total == 3 && holds == 3 && t < C2_BUDGET,
        format!("model exact: {shape}, queries true everywhere {holds}/{total}, {t:.2?} (budget {C2_BUDGET:?})"),
    )
}

fn c3(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let sig = Signature::small();
    let (mut unchecked, mut violations) = (0, 0);
    for _ in 0..C3_SEQUENTS {
        let d = ProofGen::new(rng, &sig, 2).derivation(25);
        if check_derivation(&d).is_err() {
            unchecked += 1;
        }
        let noms = d.conclusion.nominals();
        for _ in 0..C3_MODELS {
            let m = random_model(rng, &sig, C3_MAX_NODES, noms.iter());
            if !m.check_sequent_validity(&d.conclusion).unwrap_or(false) {
                violations += 1;
            }
        }
    }
    let t = start.elapsed();
    outcome(
        unchecked == 0 && violations == 0 && t < C3_BUDGET,
        format!("{C3_SEQUENTS} sequents x {C3_MODELS} models: {violations} violations, {unchecked} unchecked, {t:.2?} (budget {C3_BUDGET:?})"),
    )
}

fn c4(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let sig = Signature::small();
    let cfg = SearchConfig::default();
    let (mut ok, mut total, mut missing) = (0, 0, Vec::new());
    for rule in RuleId::non_structural() {
        for _ in 0..C4_INSTANCES {
            total += 1;
            let Some((inf, d)) = provable_instance(rng, &sig, rule, &cfg, 200).expect("instance") else {
                missing.push(rule);
                continue;
            };
            let Ok(out) = invert(rule, &d, &inf) else { continue };
            let expect = apply_rule(&d.conclusion, &inf).expect("rule applies");
            let ends: Vec<_> = out.iter().map(|p| p.conclusion.clone()).collect();
            if ends == expect && out.iter().all(|p| check_derivation(p).is_ok()) {
                ok += 1;
            }
        }
    }
    let t = start.elapsed();
    outcome(
        ok == total && missing.is_empty(),
        format!("20 rules x {C4_INSTANCES}: {ok}/{total} inverted and checked, no instance for {missing:?}, {t:.2?}"),
    )
}

fn c5(rng: &mut ChaCha8Rng) -> (Outcome, bool) {
    let start = Instant::now();
    let corpus = cut_corpus(rng, C5_PER_KIND, C5_RANDOM).expect("corpus");
    let mut failed = Vec::new();
    let mut stuck_shape_as_pinned = true;
    for (name, d) in &corpus {
        match eliminate_cuts_traced(d, DEFAULT_STEP_LIMIT) {
            Ok((out, trace)) => {
                let good = out.is_cut_free()
                    && out.conclusion == d.conclusion
                    && check_derivation(&out).is_ok()
                    && trace.iter().all(|s| s.descends());
                if !good {
                    failed.push(name.clone());
                    stuck_shape_as_pinned = false;
                }
            }
            Err(e) => {
                let pinned = name.starts_with("paste-")
                    && matches!(e, CutElimError::Stuck { left: RuleId::AtR, right: RuleId::CmpR, .. });
                stuck_shape_as_pinned &= pinned;
                failed.push(name.clone());
            }
        }
    }
    let t = start.elapsed();
    let n = corpus.len();
    let pass = failed.is_empty() && n >= C5_MIN_CORPUS && t < C5_BUDGET;
    let stuck: Vec<&str> = failed.iter().map(String::as_str).collect();
    let detail = format!(
        "{n} cut-bearing derivations, {} cut-free and checked, stuck {stuck:?}, {t:.2?} (budget {C5_BUDGET:?})",
        n - failed.len()
    );
    (outcome(pass, detail), stuck_shape_as_pinned && n >= C5_MIN_CORPUS && t < C5_BUDGET)
}

fn c6(rng: &mut ChaCha8Rng) -> Outcome {
    let sig = Signature::new(&["p", "q"], &["i", "j", "k"], &["a"], &["c"]);
    let cfg = SearchConfig { max_depth: C6_MAX_DEPTH, countermodel_nodes: C6_MAX_NODES, ..SearchConfig::default() };
    let (mut proved, mut refuted, mut unknown, mut clashes) = (0, 0, 0, 0);
    for _ in 0..C6_SEQUENTS {
        let goal = random_sequent(rng, &sig, 2, 3);
        let r = prove(&goal, &cfg);
        let cm = find_countermodel(&goal, C6_MAX_NODES);
        match &r {
            SearchResult::Proved(_) => proved += 1,
            SearchResult::Refuted(_) => refuted += 1,
            SearchResult::Unknown(_) => unknown += 1,
        }
        if r.is_proved() && cm.is_some() {
            clashes += 1;
        }
    }
    outcome(
        clashes == 0,
        format!("{C6_SEQUENTS} sequents: {proved} proved, {refuted} refuted, {unknown} unknown, {clashes} contradictions"),
    )
}

fn c7(rng: &mut ChaCha8Rng) -> Outcome {
    let sig = Signature::small_hylo();
    let cfg = SearchConfig::default();
    let (mut proved, mut leaks, mut bad_sims) = (0, 0, 0);
    for _ in 0..C7_SEQUENTS {
        let goal = random_sequent(rng, &sig, 2, 3);
        if let Ok(SearchResult::Proved(d)) = prove_hylo(&goal, &cfg) {
            proved += 1;
            let clean = is_hylo(&d) && check_derivation(&d).is_ok() && d.rules_used().iter().all(|r| !r.is_comparison_rule());
            if !clean {
                leaks += 1;
            }
        }
        let (rule, concl) = random_brauner_instance(rng, &sig);
        let sim = simulate_brauner(&rule, &concl);
        let ps = brauner_premisses(&rule, &concl);
        let ok = match (sim, ps) {
            (Ok(d), Ok(ps)) => d.conclusion == concl && check_fragment(&d, &ps).is_ok(),
            _ => false,
        };
        if !ok {
            bad_sims += 1;
        }
    }
    let goal = parse_sequent("@j #i, @i <a> #k |- @j <a> #k").expect("goal");
    let nom2 = BraunerRule::Nom2 { i: sym("i"), j: sym("j"), k: sym("k"), a: sym("a") };
    let shape = simulate_brauner(&nom2, &goal).map(|d| display_shape(&d)).unwrap_or_default();
    let shape_ok = shape == ["Cut", "open", "Cut", "WL", "open", "S1", "WL", "open"];
    outcome(
        leaks == 0 && bad_sims == 0 && shape_ok,
        format!("{C7_SEQUENTS} goals: {proved} proved, {leaks} with comparison rules; {bad_sims} failed simulations; Nom2 shape {shape_ok}"),
    )
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (o5, c5_as_pinned) = c5(&mut rng.clone());
    let results = vec![
        (1u8, "golden derivations", c1()),
        (2, "Example 1 reproduction", c2()),
        (3, "soundness fuzz", c3(&mut rng)),
        (4, "invertibility suite", c4(&mut rng)),
        (5, "cut elimination", o5),
        (6, "oracle agreement", c6(&mut rng)),
        (7, "fragment parity", c7(&mut rng)),
    ];
    let mut unexpected = false;
    for (n, name, o) in &results {
        let known = KNOWN_FAILING.contains(n) && !o.pass && (*n != 5 || c5_as_pinned);
        let tag = if known { " [known failure]" } else { "" };
        println!("{} C{n} {name}: {}{tag}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass && !known {
            unexpected = true;
        }
        if o.pass && KNOWN_FAILING.contains(n) {
            println!("note: C{n} is listed as known failing but passed; update KNOWN_FAILING");
        }
    }
    if unexpected {
        std::process::exit(1);
    }
}
