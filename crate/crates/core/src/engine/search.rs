//! Breadth-first search over states with duplicate suppression.
//!
//! Expansions are forced: while an expandable atom remains, the leftmost
//! one is expanded and nothing else is tried, since every goal shape
//! requires it to be rewritten and expansions of different atoms commute.
//! Blocks are handled by a single macro move: rotate, place at a slot of
//! the same level, dissolve. Goals never contain blocks, and dissolving an
//! outer block first frees its inner blocks, so this loses no arrangement.

use std::collections::{BTreeMap, HashSet, VecDeque};

use super::expr::{EngineExpr, Item};
use super::state::{rename_items, rename_term, State};
use super::{
    Derivation, DerivationStep, Direction, EngineError, Grammar, SearchLimits, StepArg, StepContext, StepKind,
};
use crate::freegroup::{Letter, Sign, SignedAtom};
use crate::lexicon::SchemeItem;
use crate::term::{canonicalize_identifiers, unify_with, Binding, Name, Term};

#[derive(Clone, Debug)]
pub struct Found<T> {
    pub value: T,
    pub derivation: Derivation,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome<T> {
    /// Sorted by value, without duplicates.
    pub results: Vec<Found<T>>,
    /// Some limit cut the search short; the results may be incomplete.
    pub truncated: bool,
    pub states: usize,
}

struct Node {
    state: State,
    parent: Option<usize>,
    steps: Vec<DerivationStep>,
    expansions: usize,
}

struct Successor {
    steps: Vec<DerivationStep>,
    state: State,
    expanded: bool,
}

/// Runs a chain of steps, failing on the first inapplicable one.
fn chain(ctx: &StepContext, st: &State, steps: Vec<DerivationStep>) -> Option<Successor> {
    let mut cur = st.clone();
    for s in &steps {
        cur = cur.apply(ctx, s).ok()?;
    }
    Some(Successor { steps, state: cur, expanded: false })
}

fn search<T: Ord + Clone>(
    ctx: &StepContext,
    start: EngineExpr,
    lim: &SearchLimits,
    goal: impl Fn(&State) -> Option<T>,
    successors: impl Fn(&StepContext, &State, &mut bool) -> Vec<Successor>,
    is_expansion_pending: impl Fn(&State) -> bool,
    viable: impl Fn(&State) -> bool,
) -> SearchOutcome<T> {
    let mut root = State::new(start.clone());
    root.expr.normalize();
    let mut nodes = vec![Node { state: root, parent: None, steps: Vec::new(), expansions: 0 }];
    let mut visited: HashSet<String> = HashSet::new();
    visited.insert(nodes[0].state.expr.canonical_key());
    let mut queue = VecDeque::from([0usize]);
    let mut found: BTreeMap<T, usize> = BTreeMap::new();
    let mut truncated = false;
    while let Some(ix) = queue.pop_front() {
        if let Some(v) = goal(&nodes[ix].state) {
            found.entry(v).or_insert(ix);
            if found.len() >= lim.max_results {
                truncated = !queue.is_empty();
                break;
            }
            continue;
        }
        if nodes[ix].expansions >= lim.max_expansions && is_expansion_pending(&nodes[ix].state) {
            truncated = true;
            continue;
        }
        let mut cut = false;
        let succ = successors(ctx, &nodes[ix].state, &mut cut);
        truncated |= cut;
        for s in succ {
            if s.state.expr.atom_count() > lim.max_items {
                truncated = true;
                continue;
            }
            if !visited.insert(s.state.expr.canonical_key()) || !viable(&s.state) {
                continue;
            }
            if nodes.len() >= lim.max_states {
                truncated = true;
                queue.clear();
                break;
            }
            let expansions = nodes[ix].expansions + usize::from(s.expanded);
            nodes.push(Node { state: s.state, parent: Some(ix), steps: s.steps, expansions });
            queue.push_back(nodes.len() - 1);
        }
    }
    let results = found
        .into_iter()
        .map(|(value, ix)| {
            let mut steps = Vec::new();
            let mut cur = Some(ix);
            while let Some(c) = cur {
                steps.push(nodes[c].steps.clone());
                cur = nodes[c].parent;
            }
            steps.reverse();
            let derivation = Derivation {
                direction: ctx.direction,
                commutative: ctx.commutative,
                start: start.clone(),
                steps: steps.into_iter().flatten().collect(),
                end: nodes[ix].state.expr.clone(),
            };
            Found { value, derivation }
        })
        .collect();
    SearchOutcome { results, truncated, states: nodes.len() }
}

fn forced_generation(g: &Grammar, st: &State) -> Option<(Vec<usize>, Term)> {
    st.expr.paths().into_iter().find_map(|p| match st.expr.get(&p)? {
        Item::Atom(SignedAtom { letter: Letter::Form(t), sign: Sign::Pos }) => {
            let f = t.functor()?;
            g.gen.iter().any(|r| r.lhs.functor() == Some(f)).then(|| (p, t.clone()))
        }
        _ => None,
    })
}

fn forced_parsing(g: &Grammar, st: &State) -> Option<(Vec<usize>, Name)> {
    st.expr.paths().into_iter().find_map(|p| match st.expr.get(&p)? {
        Item::Atom(SignedAtom { letter: Letter::Word(w), sign: Sign::Pos }) => {
            g.parse.iter().any(|r| &r.lhs == w).then(|| (p, w.clone()))
        }
        _ => None,
    })
}

/// Structural compatibility: false only if no substitution can make the
/// two terms equal.
fn may_unify(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Var(_) | Term::App(..), _) | (_, Term::Var(_) | Term::App(..)) => true,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| may_unify(x, y))
        }
        _ => a == b,
    }
}

fn may_cancel(x: &SignedAtom, y: &SignedAtom) -> bool {
    x.sign != y.sign
        && match (&x.letter, &y.letter) {
            (Letter::Form(s), Letter::Form(t)) => may_unify(s, t),
            (l, m) => l == m,
        }
}

/// Whether a block-free, non-commutative expression can still shrink to a
/// goal: every atom except the survivors must pair off with a compatible
/// atom in a nested fashion, since cancellation only ever removes adjacent
/// atoms and nothing else reorders them. `survivor` marks atoms allowed to
/// remain; `single` requires exactly one of them. Expressions with blocks
/// or under swaps are always viable.
fn pairable(atoms: &[&SignedAtom], survivor: impl Fn(&SignedAtom) -> bool, single: bool) -> bool {
    let n = atoms.len();
    // full[i][j]: atoms[i..j] can cancel completely.
    let mut full = vec![vec![false; n + 1]; n + 1];
    for i in 0..=n {
        full[i][i] = true;
    }
    for len in (2..=n).step_by(2) {
        for i in 0..=n - len {
            let j = i + len;
            full[i][j] = (i + 1..j)
                .step_by(2)
                .any(|k| full[i + 1][k] && full[k + 1][j] && may_cancel(atoms[i], atoms[k]));
        }
    }
    if single {
        return (0..n).any(|s| survivor(atoms[s]) && full[0][s] && full[s + 1][n]);
    }
    // reach[j]: atoms[..j] reduce to survivors only.
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for j in 1..=n {
        reach[j] = (reach[j - 1] && survivor(atoms[j - 1])) || (0..j).any(|i| reach[i] && full[i][j]);
    }
    reach[n]
}

fn viable_flat(ctx: &StepContext, st: &State, survivor: impl Fn(&SignedAtom) -> bool, single: bool) -> bool {
    if ctx.commutative {
        return true;
    }
    match st.expr.flat_atoms() {
        Some(atoms) => pairable(&atoms, survivor, single),
        None => true,
    }
}

/// Cancellations that need unification, block placements and (in
/// commutative mode) swaps.
fn rearrangements(ctx: &StepContext, st: &State, lim: &SearchLimits) -> Vec<Successor> {
    let mut out = Vec::new();
    let opts = lim.unify_options();
    for (prefix, level) in st.expr.levels() {
        for i in 0..level.len().saturating_sub(1) {
            let mut path = prefix.clone();
            path.push(i);
            if let (Item::Atom(x), Item::Atom(y)) = (&level[i], &level[i + 1]) {
                if let (Letter::Form(s), Letter::Form(t)) = (&x.letter, &y.letter) {
                    if x.sign != y.sign && !(s.is_ground() && t.is_ground()) {
                        for b in unify_with(s, t, &Binding::new(), opts) {
                            let step = DerivationStep::new(StepKind::Cancel, path.clone()).with_binding(b);
                            out.extend(chain(ctx, st, vec![step]));
                        }
                    }
                }
            }
            if ctx.commutative {
                out.extend(chain(ctx, st, vec![DerivationStep::new(StepKind::Swap, path)]));
            }
        }
        for (i, item) in level.iter().enumerate() {
            let Item::Block(b) = item else { continue };
            let mut path = prefix.clone();
            path.push(i);
            for k in 0..b.items.len() {
                for j in 0..level.len() {
                    let mut steps = Vec::new();
                    if k > 0 {
                        steps.push(DerivationStep::new(StepKind::Rotate, path.clone()).with_arg(StepArg::Index(k)));
                    }
                    if j != i {
                        steps.push(DerivationStep::new(StepKind::Move, path.clone()).with_arg(StepArg::Index(j)));
                    }
                    let mut at = prefix.clone();
                    at.push(j);
                    steps.push(DerivationStep::new(StepKind::Dissolve, at));
                    out.extend(chain(ctx, st, steps));
                }
            }
        }
    }
    out
}

/// Rewrites a ground logical form into words.
pub fn generate(g: &Grammar, lf: &Term, lim: &SearchLimits) -> Result<SearchOutcome<Vec<Name>>, EngineError> {
    if !lf.is_ground() {
        return Err(EngineError::Input(format!("`{lf}` is not ground")));
    }
    g.lexicon.check_signature(lf).map_err(EngineError::Input)?;
    let ctx = StepContext {
        grammar: g,
        direction: Direction::Generate,
        commutative: lim.commutative || g.lexicon.commutative,
    };
    let start = EngineExpr::from_atoms([SignedAtom::form(lf.clone())]);
    let opts = lim.unify_options();
    let goal = |st: &State| -> Option<Vec<Name>> {
        st.expr
            .flat_atoms()?
            .into_iter()
            .map(|a| match (&a.letter, a.sign) {
                (Letter::Word(w), Sign::Pos) => Some(w.clone()),
                _ => None,
            })
            .collect()
    };
    let successors = |ctx: &StepContext, st: &State, _cut: &mut bool| -> Vec<Successor> {
        let Some((path, t)) = forced_generation(g, st) else {
            return rearrangements(ctx, st, lim);
        };
        let k = st.instances + 1;
        let mut out = Vec::new();
        for (ri, rule) in g.gen.iter().enumerate() {
            if rule.lhs.functor() != t.functor() {
                continue;
            }
            let lhs = rename_term(&rule.lhs, k);
            let rhs = rename_items(&rule.rhs, k);
            let own = lhs.meta_names();
            for b in unify_with(&lhs, &t, &Binding::new(), opts) {
                if b.terms().any(|(v, _)| !own.contains(v)) || b.abstractions().any(|(p, _)| !own.contains(p)) {
                    continue;
                }
                let b = with_fresh(st, &b, Some(&lhs), &rhs);
                let step = DerivationStep::new(StepKind::Expand, path.clone()).with_rule(ri).with_binding(b);
                if let Some(mut s) = chain(ctx, st, vec![step]) {
                    s.expanded = true;
                    out.push(s);
                }
            }
        }
        out
    };
    let pending = |st: &State| forced_generation(g, st).is_some();
    let viable = |st: &State| {
        pending(st) || viable_flat(&ctx, st, |a| matches!((&a.letter, a.sign), (Letter::Word(_), Sign::Pos)), false)
    };
    Ok(search(&ctx, start, lim, goal, successors, pending, viable))
}

fn with_fresh(st: &State, b: &Binding, lhs: Option<&Term>, rhs: &[SchemeItem]) -> Binding {
    let mut b = b.clone();
    for (v, fresh) in st.fresh_for_expand(lhs, rhs) {
        b = b.bind_term(&v, &Term::Ident(fresh)).expect("fresh identifiers bind");
    }
    b
}

/// Rewrites a sentence into logical forms; identifiers in the results are
/// renamed canonically.
pub fn parse(g: &Grammar, words: &[Name], lim: &SearchLimits) -> Result<SearchOutcome<Term>, EngineError> {
    if let Some(w) = words.iter().find(|w| !g.lexicon.phon.contains(*w)) {
        return Err(EngineError::Input(format!("unknown word `{w}`")));
    }
    let ctx = StepContext {
        grammar: g,
        direction: Direction::Parse,
        commutative: lim.commutative || g.lexicon.commutative,
    };
    let start = EngineExpr::from_atoms(words.iter().map(|w| SignedAtom::word(w)));
    let goal = |st: &State| -> Option<Term> {
        match st.expr.items.as_slice() {
            [Item::Atom(SignedAtom { letter: Letter::Form(t), sign: Sign::Pos })] if t.is_ground() => {
                Some(canonicalize_identifiers(t))
            }
            _ => None,
        }
    };
    let successors = |ctx: &StepContext, st: &State, _cut: &mut bool| -> Vec<Successor> {
        let Some((path, w)) = forced_parsing(g, st) else {
            return rearrangements(ctx, st, lim);
        };
        let k = st.instances + 1;
        let mut out = Vec::new();
        for (ri, rule) in g.parse.iter().enumerate() {
            if rule.lhs != w {
                continue;
            }
            let rhs = rename_items(&rule.rhs, k);
            let b = with_fresh(st, &Binding::new(), None, &rhs);
            let step = DerivationStep::new(StepKind::Expand, path.clone()).with_rule(ri).with_binding(b);
            if let Some(mut s) = chain(ctx, st, vec![step]) {
                s.expanded = true;
                out.push(s);
            }
        }
        out
    };
    let pending = |st: &State| forced_parsing(g, st).is_some();
    let viable = |st: &State| {
        pending(st) || viable_flat(&ctx, st, |a| matches!((&a.letter, a.sign), (Letter::Form(_), Sign::Pos)), true)
    };
    Ok(search(&ctx, start, lim, goal, successors, pending, viable))
}

/// Saturation of a commutative relator set whose relators have the shape
/// `H Bn^-1 … B1^-1`: starting from the neutral element, multiply in a
/// relator instance, let its head travel by swaps to the leftmost inverse
/// atom and cancel the two by unification. Results are the single ground
/// positive atoms reached.
pub fn saturate(g: &Grammar, lim: &SearchLimits) -> SearchOutcome<Term> {
    let ctx = StepContext { grammar: g, direction: Direction::Compute, commutative: true };
    let opts = lim.unify_options();
    let heads: Vec<Option<Term>> = g
        .lexicon
        .relators
        .iter()
        .map(|r| match r.items.split_first() {
            Some((SchemeItem::Log(h, Sign::Pos), rest))
                if rest.iter().all(|i| matches!(i, SchemeItem::Log(_, Sign::Neg))) =>
            {
                Some(h.clone())
            }
            _ => None,
        })
        .collect();
    let goal = |st: &State| -> Option<Term> {
        match st.expr.items.as_slice() {
            [Item::Atom(SignedAtom { letter: Letter::Form(t), sign: Sign::Pos })] if t.is_ground() => Some(t.clone()),
            _ => None,
        }
    };
    let successors = |ctx: &StepContext, st: &State, _cut: &mut bool| -> Vec<Successor> {
        let level = &st.expr.items;
        let mut out = Vec::new();
        let k = st.instances + 1;
        let target = level.iter().position(|it| matches!(it, Item::Atom(a) if a.sign == Sign::Neg));
        if level.is_empty() {
            for (ri, h) in heads.iter().enumerate() {
                if h.is_some() {
                    let step = DerivationStep::new(StepKind::Insert, vec![0]).with_rule(ri);
                    out.extend(chain(ctx, st, vec![step]).map(|mut s| {
                        s.expanded = true;
                        s
                    }));
                }
            }
            return out;
        }
        let Some(i) = target else { return out };
        let Some(Letter::Form(goal_term)) = level[i].as_atom().map(|a| &a.letter) else { return out };
        let n = level.len();
        for (ri, h) in heads.iter().enumerate() {
            let Some(h) = h else { continue };
            let head = rename_term(h, k);
            if unify_with(goal_term, &head, &Binding::new(), opts).is_empty() {
                continue;
            }
            let insert = DerivationStep::new(StepKind::Insert, vec![n]).with_rule(ri);
            let Ok(mut cur) = st.apply(ctx, &insert) else { continue };
            let mut steps = vec![insert];
            let len_of = |s: &State| s.expr.items.len();
            let inserted = g.lexicon.relators[ri].items.len();
            if len_of(&cur) + 2 == n + inserted {
                out.push(Successor { steps, state: cur, expanded: true });
                continue;
            }
            let mut pos = n;
            let mut resolved = false;
            while pos > i + 1 {
                let swap = DerivationStep::new(StepKind::Swap, vec![pos - 1]);
                let before = len_of(&cur);
                let Ok(next) = cur.apply(ctx, &swap) else { break };
                cur = next;
                steps.push(swap);
                pos -= 1;
                if len_of(&cur) < before {
                    resolved = true;
                    break;
                }
            }
            if resolved {
                out.push(Successor { steps, state: cur, expanded: true });
                continue;
            }
            if pos != i + 1 {
                continue;
            }
            let (Some(Item::Atom(x)), Some(Item::Atom(y))) = (cur.expr.items.get(i), cur.expr.items.get(i + 1)) else {
                continue;
            };
            let (Letter::Form(s), Letter::Form(t)) = (&x.letter, &y.letter) else { continue };
            for b in unify_with(s, t, &Binding::new(), opts) {
                let cancel = DerivationStep::new(StepKind::Cancel, vec![i]).with_binding(b);
                if let Ok(done) = cur.apply(ctx, &cancel) {
                    let mut all = steps.clone();
                    all.push(cancel);
                    out.push(Successor { steps: all, state: done, expanded: true });
                }
            }
        }
        out
    };
    let pending = |st: &State| st.expr.items.iter().any(|it| matches!(it, Item::Atom(a) if a.sign == Sign::Neg));
    search(&ctx, EngineExpr::default(), lim, goal, successors, pending, |_: &State| true)
}
