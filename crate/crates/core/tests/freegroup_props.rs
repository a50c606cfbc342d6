use ggroup::freegroup::{conjugate, cyclic_rotations, inverse, product, reduce, ReducedWord, Sign, SignedAtom};
use ggroup::term::Term;
use proptest::prelude::*;

fn atom() -> impl Strategy<Value = SignedAtom> {
    let letter = prop_oneof![
        prop::sample::select(vec!["a", "b", "c"]).prop_map(SignedAtom::word),
        prop::sample::select(vec!["f(j)", "g(j,l)", "j"]).prop_map(|t| SignedAtom::form(t.parse::<Term>().unwrap())),
    ];
    (letter, any::<bool>()).prop_map(|(a, neg)| if neg { a.inverse() } else { a })
}

fn raw() -> impl Strategy<Value = Vec<SignedAtom>> {
    prop::collection::vec(atom(), 0..12)
}

fn word() -> impl Strategy<Value = ReducedWord> {
    raw().prop_map(reduce)
}

/// Cancels adjacent inverse pairs one at a time, choosing the pair from
/// `picks`, until none is left.
fn reduce_in_order(mut w: Vec<SignedAtom>, picks: &[usize]) -> Vec<SignedAtom> {
    let mut k = 0;
    loop {
        let spots: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&i| w[i].cancels(&w[i + 1])).collect();
        if spots.is_empty() {
            return w;
        }
        let i = spots[picks.get(k).copied().unwrap_or(0) % spots.len()];
        k += 1;
        w.drain(i..i + 2);
    }
}

fn is_reduced(w: &[SignedAtom]) -> bool {
    w.windows(2).all(|p| !p[0].cancels(&p[1]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reduction_is_confluent(w in raw(), picks in prop::collection::vec(0usize..8, 0..12)) {
        let by_order = reduce_in_order(w.clone(), &picks);
        prop_assert!(is_reduced(&by_order));
        prop_assert_eq!(by_order, reduce(w).into_atoms());
    }

    #[test]
    fn product_is_associative(a in word(), b in word(), c in word()) {
        prop_assert_eq!(product(&product(&a, &b), &c), product(&a, &product(&b, &c)));
    }

    #[test]
    fn neutral_is_identity(a in word()) {
        let e = ReducedWord::neutral();
        prop_assert_eq!(product(&a, &e), a.clone());
        prop_assert_eq!(product(&e, &a), a);
    }

    #[test]
    fn inverse_cancels(a in word()) {
        prop_assert!(product(&a, &inverse(&a)).is_neutral());
        prop_assert!(product(&inverse(&a), &a).is_neutral());
        prop_assert_eq!(inverse(&inverse(&a)), a);
    }

    #[test]
    fn conjugation_preserves_neutral(x in raw(), y in word()) {
        // x x^-1 is neutral however it is written; so is any conjugate of it.
        let mut raw_neutral = x.clone();
        raw_neutral.extend(x.iter().rev().map(SignedAtom::inverse));
        let n = reduce(raw_neutral);
        prop_assert!(n.is_neutral());
        prop_assert!(conjugate(&n, &y).is_neutral());
    }

    #[test]
    fn conjugation_is_a_homomorphism(a in word(), b in word(), y in word()) {
        prop_assert_eq!(conjugate(&product(&a, &b), &y), product(&conjugate(&a, &y), &conjugate(&b, &y)));
    }

    #[test]
    fn rotations_are_conjugates(a in word()) {
        for r in cyclic_rotations(&a) {
            // Each rotation u v of v u equals u (v u) u^-1.
            let n = a.len();
            let found = (0..=n).any(|k| {
                let u = reduce(a.atoms()[..k].to_vec());
                conjugate(&a, &inverse(&u)) == r || conjugate(&a, &u) == r
            });
            prop_assert!(found);
        }
    }

    #[test]
    fn signs_flip_under_inverse(a in atom()) {
        prop_assert_eq!(a.inverse().sign, -a.sign);
        prop_assert!(a.cancels(&a.inverse()));
        prop_assert!(a.sign == Sign::Pos || a.sign == Sign::Neg);
    }
}
