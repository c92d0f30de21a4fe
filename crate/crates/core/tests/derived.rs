use hxproof::derived::{
    and_l, and_r, axg, cmp_b, expand_macro, general_dia, gen_cmp_r, iff_r, inv_and_l, inverse_fragments, invert,
    paste, paste_assumption, paste_closed, paste_conclusion, prove_at, reflexivity, symmetry, top_l, transitivity,
    Macro, PasteInstance,
};
use hxproof::kernel::{check_derivation, check_fragment, Derivation, Inference, RuleId, Sequent, Side};
use hxproof::syntax::{parse_node, parse_path, parse_sequent, sym, CmpKind, NodeExpr, PathExpr};

fn s(text: &str) -> Sequent {
    parse_sequent(text).unwrap()
}

fn n(text: &str) -> NodeExpr {
    parse_node(text).unwrap()
}

fn p(text: &str) -> PathExpr {
    parse_path(text).unwrap()
}

fn ok(d: &Derivation) {
    if let Err(v) = check_derivation(d) {
        panic!("{}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n"));
    }
}

fn frag_ok(d: &Derivation) {
    let leaves: Vec<Sequent> = d.open_leaves().into_iter().cloned().collect();
    if let Err(v) = check_fragment(d, &leaves) {
        panic!("{}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n"));
    }
}

#[test]
fn reflexivity_checks_with_height_six() {
    let d = reflexivity(&sym("i"), &sym("c")).unwrap();
    ok(&d);
    assert_eq!(d.conclusion, s("|- @i <eps =c eps>"));
    assert_eq!(d.height(), 6);
}

#[test]
fn symmetry_checks_for_both_kinds() {
    for kind in [CmpKind::Eq, CmpKind::Neq] {
        let d = symmetry(&sym("i"), &p("a"), kind, &sym("c"), &p("b")).unwrap();
        ok(&d);
        assert!(d.open_leaves().is_empty());
    }
}

#[test]
fn symmetry_on_compound_paths() {
    let d = symmetry(&sym("i"), &p("a b"), CmpKind::Neq, &sym("c"), &p("j: (q)?")).unwrap();
    ok(&d);
}

#[test]
fn transitivity_checks() {
    let d = transitivity(&sym("i"), &p("r"), &sym("c"), &p("s")).unwrap();
    ok(&d);
    assert_eq!(d.conclusion, s("|- @i ((<r =c eps> & <eps =c s>) -> <r =c s>)"));
    let used = d.rules_used();
    for r in [RuleId::At5, RuleId::S3, RuleId::Eq5] {
        assert!(used.contains(&r), "{r} missing");
    }
}

fn paste_inst(chi: NodeExpr, kind: CmpKind) -> PasteInstance {
    PasteInstance {
        i: sym("i"),
        j: sym("j"),
        k: sym("k"),
        a: sym("a"),
        alpha: p("b"),
        kind,
        c: sym("c"),
        beta: p("e"),
        chi,
    }
}

#[test]
fn paste_fragment_has_the_assumption_as_leaf() {
    for kind in [CmpKind::Eq, CmpKind::Neq] {
        let inst = paste_inst(n("q"), kind);
        let d = paste(&inst).unwrap();
        assert_eq!(d.conclusion, paste_conclusion(&inst).unwrap());
        assert_eq!(d.open_leaves(), vec![&paste_assumption(&inst).unwrap()]);
        frag_ok(&d);
        assert_eq!(d.cut_count(), 3);
    }
}

#[test]
fn paste_closed_instances_check() {
    for chi in [NodeExpr::top(), n("q -> q")] {
        let d = paste_closed(&paste_inst(chi, CmpKind::Eq)).unwrap();
        ok(&d);
    }
}

#[test]
fn paste_rejects_non_fresh_k() {
    let mut inst = paste_inst(n("@k q"), CmpKind::Eq);
    assert!(paste(&inst).is_err());
    inst.chi = n("q");
    inst.k = sym("j");
    assert!(paste(&inst).is_err());
}

#[test]
fn axg_closes_compound_expressions() {
    for e in [
        "@i (p -> <a> (q -> @j r))",
        "@i <a b =c (p)? >",
        "@i [a] <eps !=d b>",
        "<i: !=c j:>",
        "@i false",
        "@i true",
    ] {
        let phi = n(e);
        let g = Sequent::new([phi.clone(), n("@x y")], [phi.clone(), n("@z w")]).unwrap();
        let d = axg(&g, &phi).unwrap();
        ok(&d);
        assert_eq!(d.conclusion, g);
    }
}

#[test]
fn axg_avoids_context_nominals() {
    let phi = n("@i <a> p");
    let g = Sequent::new([phi.clone(), n("@_n0 q")], [phi.clone()]).unwrap();
    ok(&axg(&g, &phi).unwrap());
}

#[test]
fn top_l_and_friends_are_sound_fragments() {
    let g = s("@i (p & q) |- @j (p & q)");
    for d in [
        top_l(&g, &sym("i")).unwrap(),
        and_l(&g, &sym("i"), &n("p"), &n("q")).unwrap(),
        and_r(&g, &sym("j"), &n("p"), &n("q")).unwrap(),
    ] {
        frag_ok(&d);
        assert_eq!(d.conclusion, g);
    }
    let d = and_l(&g, &sym("i"), &n("p"), &n("q")).unwrap();
    assert_eq!(d.open_leaves(), vec![&s("@i p, @i q |- @j (p & q)")]);
    let d = and_r(&g, &sym("j"), &n("p"), &n("q")).unwrap();
    assert_eq!(d.open_leaves(), vec![&s("@i (p & q) |- @j p"), &s("@i (p & q) |- @j q")]);
    let d = top_l(&g, &sym("k")).unwrap();
    assert_eq!(d.open_leaves(), vec![&s("@k true, @i (p & q) |- @j (p & q)")]);
}

#[test]
fn iff_r_and_inv_and_l() {
    let g = s("@k r |- @i (p <-> q)");
    let d = iff_r(&g, &sym("i"), &n("p"), &n("q")).unwrap();
    frag_ok(&d);
    assert_eq!(d.open_leaves(), vec![&s("@i p, @k r |- @i q"), &s("@i q, @k r |- @i p")]);
    let g = s("@i p, @i q |- @k r");
    let d = inv_and_l(&g, &sym("i"), &n("p"), &n("q")).unwrap();
    frag_ok(&d);
    assert_eq!(d.open_leaves(), vec![&s("@i (p & q) |- @k r")]);
}

#[test]
fn cmp_b_swaps_both_kinds() {
    for (kind, text, leaf) in [
        (CmpKind::Eq, "<i: =c j:>, @i p |- @j p", "<j: =c i:>, @i p |- @j p"),
        (CmpKind::Neq, "<i: !=c j:>, @i p |- @j p", "<j: !=c i:>, @i p |- @j p"),
    ] {
        let d = cmp_b(&s(text), &sym("i"), kind, &sym("c"), &sym("j")).unwrap();
        frag_ok(&d);
        assert_eq!(d.open_leaves(), vec![&s(leaf)]);
    }
}

#[test]
fn general_dia_left_and_right() {
    let g = s("@i <a j: (q)? b> p |- @k r");
    let d = general_dia(&g, Side::Left, &sym("i"), &p("a j: (q)? b"), &n("p"), &[]).unwrap();
    frag_ok(&d);
    assert_eq!(d.open_leaves().len(), 1);
    let g = s("@i <a> m, @m <b> #w |- @i <a b> p");
    let d = general_dia(&g, Side::Right, &sym("i"), &p("a b"), &n("p"), &[sym("m"), sym("w")]).unwrap();
    frag_ok(&d);
    assert!(d.open_leaves()[0].contains(Side::Right, &n("@w p")));
}

#[test]
fn prove_at_and_gen_cmp_r() {
    let g = s("@i <a> m, @m <b> w, @w p |-");
    ok(&prove_at(&g, &sym("i"), &n("<a b> p")).unwrap());
    ok(&prove_at(&g, &sym("i"), &n("<a> (true & <b> #w)")).unwrap());
    ok(&prove_at(&s("@j #i |-"), &sym("i"), &n("#j")).unwrap());
    let g = s("@i <a> #m, @i <b> #w |- @i <a =c b>");
    let d = gen_cmp_r(&g, &sym("i"), &p("a"), CmpKind::Eq, &sym("c"), &p("b"), &sym("m"), &sym("w")).unwrap();
    frag_ok(&d);
    let g = s("@i <a> m, @m <b> #w |- @i <a b =c eps>");
    let d = gen_cmp_r(&g, &sym("i"), &p("a b"), CmpKind::Eq, &sym("c"), &PathExpr::eps(), &sym("w"), &sym("i"))
        .unwrap();
    frag_ok(&d);
    assert_eq!(d.open_leaves()[0].succ().len(), 2);
}

#[test]
fn expand_macro_dispatches() {
    let g = s("@i (p & q) |- @i p");
    let d = expand_macro(&Macro::AndL { i: sym("i"), lhs: n("p"), rhs: n("q") }, &g).unwrap();
    frag_ok(&d);
}

fn inverse_cases() -> Vec<(Inference, Sequent)> {
    vec![
        (Inference::AtL { j: sym("i"), i: sym("j"), body: n("<a> p") }, s("@i @j <a> p, @k q |- @k r")),
        (Inference::AtR { j: sym("i"), i: sym("j"), body: n("p -> q") }, s("@k q |- @i @j (p -> q)")),
        (Inference::DiaL { i: sym("i"), a: sym("a"), body: n("p"), j: sym("m") }, s("@i <a> p |- @i q")),
        (
            Inference::CmpL {
                i: sym("i"),
                alpha: p("a"),
                kind: CmpKind::Neq,
                c: sym("c"),
                beta: p("b"),
                j: sym("x"),
                k: sym("y"),
            },
            s("@i <a !=c b> |- @i q"),
        ),
        (Inference::ImpR { i: sym("i"), lhs: n("p"), rhs: n("<a> q") }, s("@j r |- @i (p -> <a> q)")),
        (Inference::ImpL { i: sym("i"), lhs: n("p"), rhs: n("q") }, s("@i (p -> q) |- @j r")),
        (Inference::NEqL { i: sym("i"), j: sym("j"), c: sym("c") }, s("<i: !=c j:> |- @k p")),
        (Inference::NEqR { i: sym("i"), j: sym("j"), c: sym("c") }, s("@k p |- <i: !=c j:>")),
        (Inference::AtT { i: sym("i") }, s("@k p |- @k q")),
        (Inference::EqT { i: sym("i"), c: sym("c") }, s("@k p |- @k q")),
    ]
}

#[test]
fn inverse_fragments_derive_each_premiss() {
    for (inf, concl) in inverse_cases() {
        let frags = inverse_fragments(&inf, &concl).unwrap();
        let expected = hxproof::kernel::apply_rule(&concl, &inf).unwrap();
        assert_eq!(frags.len(), expected.len());
        for (f, e) in frags.iter().zip(&expected) {
            assert_eq!(&f.conclusion, e, "{}", inf.rule());
            assert_eq!(f.open_leaves(), vec![&concl]);
            check_fragment(f, &[concl.clone()]).unwrap();
        }
    }
}

#[test]
fn invert_plugs_a_closed_proof() {
    let d = reflexivity(&sym("i"), &sym("c")).unwrap();
    let out = invert(&Inference::AtT { i: sym("i") }, &d).unwrap();
    ok(&out[0]);
    let inf = Inference::ImpR { i: sym("i"), lhs: n("p"), rhs: n("p") };
    let proof = Derivation::refine(&s("|- @i (p -> p)"), inf.clone())
        .unwrap()
        .plug(vec![Derivation::rule(s("@i p |- @i p"), Inference::Ax { formula: n("@i p") }, vec![]).unwrap()])
        .unwrap();
    let back = invert(&inf, &proof).unwrap();
    ok(&back[0]);
    assert_eq!(back[0].conclusion, s("@i p |- @i p"));
    assert!(invert(&Inference::WL { formula: n("@i p") }, &proof).is_err());
}
