#![allow(dead_code)]

use std::collections::BTreeSet;

use ggroup::engine::{generate, is_public, parse, replay, Grammar, SearchLimits};
use ggroup::term::{canonicalize_identifiers, name, Name, Term};

pub fn english() -> Grammar {
    Grammar::from_source(ggroup::ENGLISH).unwrap()
}

pub fn grammar(file: &str) -> Grammar {
    let path = format!("{}/grammars/{file}", env!("CARGO_MANIFEST_DIR"));
    Grammar::from_source(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn words(s: &str) -> Vec<Name> {
    s.split_whitespace().map(name).collect()
}

pub fn term(s: &str) -> Term {
    s.parse().unwrap()
}

/// Sentences generated from `lf`, each checked by replay.
pub fn sentences(g: &Grammar, lf: &str) -> BTreeSet<String> {
    let out = generate(g, &term(lf), &SearchLimits::default()).unwrap();
    assert!(!out.truncated, "generation from {lf} truncated");
    for f in &out.results {
        replay(g, &f.derivation).unwrap();
        let p = is_public(&g.lexicon, &f.derivation.public_expr().unwrap()).unwrap();
        assert_eq!(p.semantics, term(lf));
        assert_eq!(p.words, f.value);
    }
    out.results.iter().map(|f| f.value.join(" ")).collect()
}

/// Logical forms parsed from `s`, identifiers renamed canonically, each
/// checked by replay.
pub fn readings(g: &Grammar, s: &str) -> BTreeSet<String> {
    let out = parse(g, &words(s), &SearchLimits::default()).unwrap();
    assert!(!out.truncated, "parsing `{s}` truncated");
    for f in &out.results {
        replay(g, &f.derivation).unwrap();
        let p = is_public(&g.lexicon, &f.derivation.public_expr().unwrap()).unwrap();
        assert_eq!(p.words, words(s));
        assert_eq!(canonical(&p.semantics), canonical(&f.value));
    }
    out.results.iter().map(|f| canonical(&f.value)).collect()
}

pub fn canonical(t: &Term) -> String {
    canonicalize_identifiers(t).to_string()
}

/// Every distinct ordering of `ws`.
pub fn permutations(ws: &[Name]) -> BTreeSet<Vec<Name>> {
    if ws.len() <= 1 {
        return BTreeSet::from([ws.to_vec()]);
    }
    let mut out = BTreeSet::new();
    for i in 0..ws.len() {
        let mut rest = ws.to_vec();
        let first = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first.clone());
            out.insert(p);
        }
    }
    out
}
