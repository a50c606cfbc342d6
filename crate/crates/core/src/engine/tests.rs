use super::*;
use crate::term::canonicalize_identifiers;

fn english() -> Grammar {
    Grammar::from_source(crate::ENGLISH).unwrap()
}

fn expr(g: &Grammar, s: &str) -> EngineExpr {
    parse_expr(s, g.phon()).unwrap()
}

fn words(s: &str) -> Vec<Name> {
    s.split_whitespace().map(crate::term::name).collect()
}

fn step(g: &Grammar, text: &str) -> DerivationStep {
    let d = Derivation::from_text(&format!("direction generate\nstart 1\n{text}\nend 1\n"), g.phon()).unwrap();
    d.steps[0].clone()
}

fn apply(g: &Grammar, dir: Direction, start: &str, steps: &[&str]) -> Result<EngineExpr, String> {
    let ctx = StepContext { grammar: g, direction: dir, commutative: false };
    let mut st = State::new(expr(g, start));
    for s in steps {
        st = st.apply(&ctx, &step(g, s))?;
    }
    Ok(st.expr)
}

#[test]
fn expand_instantiates_a_generation_rule() {
    let g = english();
    let e = apply(&g, Direction::Generate, "s(j,l)", &["expand 0 r6 - {A_1=j, B_1=l}"]).unwrap();
    assert_eq!(e.to_string(), "j saw l");
}

#[test]
fn expand_rejects_a_wrong_binding() {
    let g = english();
    let err = apply(&g, Direction::Generate, "s(j,l)", &["expand 0 r6 - {A_1=l, B_1=j}"]).unwrap_err();
    assert!(err.contains("does not match"), "{err}");
    let err = apply(&g, Direction::Generate, "s(j,l)", &["expand 0 r5 - {A_1=j}"]).unwrap_err();
    assert!(err.contains("does not match"), "{err}");
}

#[test]
fn expand_requires_fresh_identifiers() {
    let g = english();
    // `that` introduces an identifier variable that must take the next fresh name.
    let ok = apply(&g, Direction::Parse, "that", &["expand 0 r11 - {X_1=#x1}"]).unwrap();
    assert_eq!(ok.to_string(), "N_1^-1 tt(N_1,#x1,P_1[#x1]) P_1[#x1]^-1 [a1: #x1]");
    let err = apply(&g, Direction::Parse, "that", &["expand 0 r11 - {X_1=#x7}"]).unwrap_err();
    assert!(err.contains("fresh"), "{err}");
}

#[test]
fn cancel_unifies_adjacent_opposite_atoms() {
    let g = english();
    let e = apply(&g, Direction::Parse, "john ran", &["expand 0 r0 - {}", "expand 1 r5 - {}"]).unwrap();
    assert_eq!(e.to_string(), "j A_2^-1 r(A_2)");
    let e = apply(
        &g,
        Direction::Parse,
        "john ran",
        &["expand 0 r0 - {}", "expand 1 r5 - {}", "cancel 0 - - {A_2=j}"],
    )
    .unwrap();
    assert_eq!(e.to_string(), "r(j)");
}

#[test]
fn cancel_rejects_a_non_unifier() {
    let g = english();
    let err = apply(
        &g,
        Direction::Parse,
        "john ran",
        &["expand 0 r0 - {}", "expand 1 r5 - {}", "cancel 0 - - {A_2=l}"],
    )
    .unwrap_err();
    assert!(err.contains("not made equal"), "{err}");
}

#[test]
fn move_rotate_and_dissolve_blocks() {
    let g = english();
    let start = "[a1: every man #x^-1] saw louise";
    let moved = apply(&g, Direction::Generate, start, &["move 0 - 1 {}"]).unwrap();
    assert_eq!(moved.to_string(), "saw [a1: every man #x^-1] louise");
    let rotated = apply(&g, Direction::Generate, start, &["rotate 0 - 2 {}"]).unwrap();
    assert_eq!(rotated.to_string(), "[a1: #x^-1 every man] saw louise");
    let dissolved = apply(&g, Direction::Generate, start, &["dissolve 0 - - {}"]).unwrap();
    assert_eq!(dissolved.to_string(), "every man #x^-1 saw louise");
    let err = apply(&g, Direction::Generate, start, &["rotate 0 - 4 {}"]).unwrap_err();
    assert!(err.contains("exceeds"), "{err}");
    let err = apply(&g, Direction::Generate, start, &["move 1 - 0 {}"]).unwrap_err();
    assert!(err.contains("no block"), "{err}");
}

#[test]
fn dissolving_next_to_an_inverse_cancels() {
    let g = english();
    let e = apply(&g, Direction::Generate, "#x [a1: #x^-1 every man] saw", &["dissolve 1 - - {}"]).unwrap();
    assert_eq!(e.to_string(), "every man saw");
}

#[test]
fn swaps_need_commutative_mode() {
    let g = english();
    let err = apply(&g, Direction::Generate, "john louise", &["swap 0 - - {}"]).unwrap_err();
    assert!(err.contains("commutative"), "{err}");
}

#[test]
fn product_of_three_conjugated_relators() {
    let g = english();
    let text = "direction compute\nstart 1\n\
                insert 0 r6 [j] {A_1=j, B_1=l}\n\
                insert 4 r1 [j saw] {}\n\
                insert 4 r0 - {}\n\
                end s(j,l) louise^-1 saw^-1 john^-1\n";
    let d = Derivation::from_text(text, g.phon()).unwrap();
    let end = replay(&g, &d).unwrap();
    let public = is_public(&g.lexicon, &end).unwrap();
    assert_eq!(public.semantics.to_string(), "s(j,l)");
    assert_eq!(public.words, words("john saw louise"));
}

#[test]
fn insert_is_only_for_computations() {
    let g = english();
    let err = apply(&g, Direction::Generate, "1", &["insert 0 r0 - {}"]).unwrap_err();
    assert!(err.contains("computations"), "{err}");
}

#[test]
fn replay_of_an_empty_derivation() {
    let g = english();
    let e = expr(&g, "s(j,l) louise^-1");
    let d = Derivation { direction: Direction::Generate, commutative: false, start: e.clone(), steps: vec![], end: e };
    assert!(replay(&g, &d).is_ok());
    let wrong = Derivation { end: expr(&g, "s(j,l)"), ..d };
    assert_eq!(replay(&g, &wrong).unwrap_err().step, 0);
}

#[test]
fn public_shape() {
    let g = english();
    let yes = expr(&g, "s(j,l) louise^-1 saw^-1 john^-1");
    let r = is_public(&g.lexicon, &yes).unwrap();
    assert_eq!(r.words, words("john saw louise"));
    for no in ["louise^-1 s(j,l)", "s(A,l) louise^-1", "s(j,l) louise", "s(j,l)^-1 louise^-1", "1"] {
        assert!(is_public(&g.lexicon, &expr(&g, no)).is_none(), "{no}");
    }
    assert!(is_public(&g.lexicon, &expr(&g, "r(j)")).is_some());
}

#[test]
fn generation_derivations_replay() {
    let g = english();
    let out = generate(&g, &"ev(m,#x,s(#x,l))".parse().unwrap(), &SearchLimits::default()).unwrap();
    assert!(!out.truncated);
    let texts: Vec<String> = out.results.iter().map(|f| f.value.join(" ")).collect();
    assert_eq!(texts, ["every man saw louise"]);
    for f in &out.results {
        replay(&g, &f.derivation).unwrap();
        let p = is_public(&g.lexicon, &f.derivation.public_expr().unwrap()).unwrap();
        assert_eq!(p.words, f.value);
    }
}

#[test]
fn parsing_derivations_replay() {
    let g = english();
    let out = parse(&g, &words("every man saw some woman"), &SearchLimits::default()).unwrap();
    let mut got: Vec<String> = out.results.iter().map(|f| canonicalize_identifiers(&f.value).to_string()).collect();
    got.sort();
    assert_eq!(got, ["ev(m,#x1,sm(w,#x2,s(#x1,#x2)))", "sm(w,#x1,ev(m,#x2,s(#x2,#x1)))"]);
    for f in &out.results {
        replay(&g, &f.derivation).unwrap();
        assert!(is_public(&g.lexicon, &f.derivation.public_expr().unwrap()).is_some());
    }
}

#[test]
fn generation_input_errors() {
    let g = english();
    let lim = SearchLimits::default();
    assert!(matches!(generate(&g, &"s(j,X)".parse().unwrap(), &lim), Err(EngineError::Input(_))));
    assert!(matches!(generate(&g, &"s(j)".parse().unwrap(), &lim), Err(EngineError::Input(_))));
    assert!(matches!(parse(&g, &words("john swam"), &lim), Err(EngineError::Input(_))));
}

#[test]
fn no_results_is_not_an_error() {
    let g = english();
    let out = parse(&g, &words("john louise"), &SearchLimits::default()).unwrap();
    assert!(out.results.is_empty());
    assert!(!out.truncated);
}

#[test]
fn tight_limits_truncate() {
    let g = english();
    let lim = SearchLimits { max_states: 3, ..SearchLimits::default() };
    let out = parse(&g, &words("every man saw some woman"), &lim).unwrap();
    assert!(out.truncated);
}

#[test]
fn trace_text_and_json_round_trip() {
    let g = english();
    let out = generate(&g, &"sm(w,#y,ev(m,#x,s(#x,#y)))".parse().unwrap(), &SearchLimits::default()).unwrap();
    let d = &out.results[0].derivation;
    let back = Derivation::from_text(&d.to_string(), g.phon()).unwrap();
    assert_eq!(&back, d);
    let json = serde_json::to_string(&d.to_json()).unwrap();
    let parsed: DerivationJson = serde_json::from_str(&json).unwrap();
    assert_eq!(&Derivation::from_json(&parsed, g.phon()).unwrap(), d);
}

#[test]
fn malformed_traces_are_reported_by_line() {
    let g = english();
    let bad = "direction generate\nstart s(j,l)\nexpand 0 r6 {A_1=j}\nend john\n";
    match Derivation::from_text(bad, g.phon()) {
        Err(TraceError::Line { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(Derivation::from_text("start 1\nend 1\n", g.phon()).is_err());
}
