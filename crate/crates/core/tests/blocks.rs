//! Block placement against a brute-force conjugator search: every
//! rotate-move-dissolve outcome must equal `L c u c^-1 R` for some word `c`,
//! where `L [u] R` is the starting level.

mod common;

use std::collections::BTreeSet;

use common::english;
use ggroup::engine::{replay, Block, Derivation, DerivationStep, Direction, EngineExpr, Item, StepArg, StepKind};
use ggroup::freegroup::{reduce, ReducedWord, SignedAtom};
use ggroup::term::{name, Term};
use proptest::prelude::*;

fn atom() -> impl Strategy<Value = SignedAtom> {
    (prop::sample::select(vec!["j", "l", "p"]), any::<bool>()).prop_map(|(c, neg)| {
        let a = SignedAtom::form(Term::constant(c));
        if neg {
            a.inverse()
        } else {
            a
        }
    })
}

/// All reduced words over the three constants up to length `n`.
fn words_up_to(n: usize) -> Vec<Vec<SignedAtom>> {
    let letters: Vec<SignedAtom> = ["j", "l", "p"]
        .iter()
        .flat_map(|c| {
            let a = SignedAtom::form(Term::constant(c));
            [a.inverse(), a]
        })
        .collect();
    let mut all = vec![Vec::new()];
    let mut frontier = vec![Vec::<SignedAtom>::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &frontier {
            for a in &letters {
                if w.last().is_some_and(|l| l.cancels(a)) {
                    continue;
                }
                let mut v = w.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

fn conjugate_in_place(left: &[SignedAtom], c: &[SignedAtom], u: &[SignedAtom], right: &[SignedAtom]) -> ReducedWord {
    let mut w = left.to_vec();
    w.extend(c.iter().cloned());
    w.extend(u.iter().cloned());
    w.extend(c.iter().rev().map(SignedAtom::inverse));
    w.extend(right.iter().cloned());
    reduce(w)
}

fn placements(level: &[SignedAtom], at: usize, u: &[SignedAtom]) -> Vec<(usize, usize, ReducedWord)> {
    let g = english();
    let mut items: Vec<Item> = level.iter().cloned().map(Item::Atom).collect();
    items.insert(at, Item::Block(Block { label: name("a1"), items: u.iter().cloned().map(Item::Atom).collect() }));
    let start = EngineExpr::new(items);
    let mut out = Vec::new();
    for k in 0..u.len() {
        for j in 0..=level.len() {
            let mut steps = Vec::new();
            if k > 0 {
                steps.push(DerivationStep::new(StepKind::Rotate, vec![at]).with_arg(StepArg::Index(k)));
            }
            if j != at {
                steps.push(DerivationStep::new(StepKind::Move, vec![at]).with_arg(StepArg::Index(j)));
            }
            steps.push(DerivationStep::new(StepKind::Dissolve, vec![j]));
            let mut expected: Vec<SignedAtom> = level[..j].to_vec();
            let mut rotated = u.to_vec();
            rotated.rotate_left(k);
            expected.extend(rotated);
            expected.extend(level[j..].iter().cloned());
            let mut end = EngineExpr::from_atoms(expected.clone());
            end.normalize();
            let d = Derivation { direction: Direction::Generate, commutative: false, start: start.clone(), steps, end };
            let got = replay(&g, &d).unwrap();
            let atoms: Vec<SignedAtom> = got.flat_atoms().unwrap().into_iter().cloned().collect();
            assert_eq!(reduce(atoms.clone()), reduce(expected));
            out.push((k, j, reduce(atoms)));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn placements_are_conjugates(
        level in prop::collection::vec(atom(), 0..4),
        u in prop::collection::vec(atom(), 1..3),
        at in 0usize..4,
    ) {
        let level = reduce(level).into_atoms();
        let u = reduce(u).into_atoms();
        prop_assume!(!u.is_empty());
        let at = at.min(level.len());
        let (left, right) = level.split_at(at);
        let candidates = words_up_to(level.len() + u.len());
        let reachable: BTreeSet<String> = candidates
            .iter()
            .map(|c| conjugate_in_place(left, c, &u, right).to_string())
            .collect();
        for (k, j, w) in placements(&level, at, &u) {
            prop_assert!(reachable.contains(&w.to_string()), "rotation {} slot {}: {}", k, j, w);
        }
    }
}

#[test]
fn placements_cover_every_rotation_and_slot() {
    let j = SignedAtom::form(Term::constant("j"));
    let l = SignedAtom::form(Term::constant("l"));
    let p = SignedAtom::form(Term::constant("p"));
    let got: BTreeSet<String> =
        placements(&[j.clone(), l.clone()], 0, &[p.clone(), j.inverse()]).into_iter().map(|(_, _, w)| w.to_string()).collect();
    let expected: BTreeSet<String> = ["p j^-1 j l", "j p j^-1 l", "j l p j^-1", "j^-1 p j l", "j j^-1 p l", "j l j^-1 p"]
        .iter()
        .map(|s| {
            let atoms: Vec<SignedAtom> = s
                .split(' ')
                .map(|a| match a.strip_suffix("^-1") {
                    Some(c) => SignedAtom::form(Term::constant(c)).inverse(),
                    None => SignedAtom::form(Term::constant(a)),
                })
                .collect();
            reduce(atoms).to_string()
        })
        .collect();
    assert_eq!(got, expected);
}
