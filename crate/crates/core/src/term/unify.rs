//! Substitutions and unification with the `P[X]` pattern fragment.

use std::collections::BTreeMap;
use std::fmt;

use super::{Name, Term};

/// `λ over. body`: abstraction over every occurrence of the identifier `over`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lambda {
    pub over: Name,
    pub body: Term,
}

impl Lambda {
    pub fn apply(&self, arg: &Term) -> Term {
        self.body.replace_ident(&self.over, arg)
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\\#{}.{}", self.over, self.body)
    }
}

/// Idempotent substitution: every stored value is already fully substituted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Binding {
    terms: BTreeMap<Name, Term>,
    abstractions: BTreeMap<Name, Lambda>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UnifyOptions {
    /// Lets `P[x]` match a term in which `x` does not occur.
    pub allow_vacuous: bool,
}

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.abstractions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len() + self.abstractions.len()
    }

    pub fn term(&self, v: &str) -> Option<&Term> {
        self.terms.get(v)
    }

    pub fn abstraction(&self, p: &str) -> Option<&Lambda> {
        self.abstractions.get(p)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.terms.iter()
    }

    pub fn abstractions(&self) -> impl Iterator<Item = (&Name, &Lambda)> {
        self.abstractions.iter()
    }

    pub fn apply(&self, t: &Term) -> Term {
        substitute(t, self)
    }

    /// Binds `v` to `t`, refusing cyclic bindings (occurs-check).
    pub fn bind_term(&self, v: &Name, t: &Term) -> Option<Binding> {
        let t = self.apply(t);
        if let Term::Var(w) = &t {
            if w == v {
                return Some(self.clone());
            }
        }
        if t.contains_var(v) {
            return None;
        }
        if let Some(existing) = self.terms.get(v) {
            return (existing == &t).then(|| self.clone());
        }
        let mut single = Binding::new();
        single.terms.insert(v.clone(), t);
        Some(self.compose(&single))
    }

    /// Binds the abstraction variable `p`; the body may not mention `p`.
    pub fn bind_abs(&self, p: &Name, lambda: Lambda) -> Option<Binding> {
        let body = self.apply(&lambda.body);
        if body.contains_abs(p) {
            return None;
        }
        if let Some(existing) = self.abstractions.get(p) {
            let probe = Term::Ident(super::name("\u{0}probe"));
            return (existing.apply(&probe) == Lambda { over: lambda.over.clone(), body: body.clone() }.apply(&probe))
                .then(|| self.clone());
        }
        let mut single = Binding::new();
        single.abstractions.insert(p.clone(), Lambda { over: lambda.over, body });
        Some(self.compose(&single))
    }

    /// `self` followed by `next`, where `next` is already expressed over
    /// `self`'s output.
    fn compose(&self, next: &Binding) -> Binding {
        let mut out = Binding::new();
        for (v, t) in &self.terms {
            out.terms.insert(v.clone(), substitute(t, next));
        }
        for (p, l) in &self.abstractions {
            out.abstractions.insert(
                p.clone(),
                Lambda { over: l.over.clone(), body: substitute(&l.body, next) },
            );
        }
        for (v, t) in &next.terms {
            out.terms.entry(v.clone()).or_insert_with(|| t.clone());
        }
        for (p, l) in &next.abstractions {
            out.abstractions.entry(p.clone()).or_insert_with(|| l.clone());
        }
        // an application bound on one side may have its argument bound on the other
        loop {
            let snapshot = out.clone();
            for t in out.terms.values_mut() {
                *t = substitute(t, &snapshot);
            }
            for l in out.abstractions.values_mut() {
                l.body = substitute(&l.body, &snapshot);
            }
            if out == snapshot {
                return out;
            }
        }
    }

    /// Merges another binding into this one, unifying shared entries.
    pub fn merge(&self, other: &Binding) -> Option<Binding> {
        let mut acc = self.clone();
        for (v, t) in &other.terms {
            acc = acc.bind_term(v, t)?;
        }
        for (p, l) in &other.abstractions {
            acc = acc.bind_abs(p, l.clone())?;
        }
        Some(acc)
    }

    /// Restriction to the names accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(&Name) -> bool) -> Binding {
        Binding {
            terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), v.clone())).collect(),
            abstractions: self
                .abstractions
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Inserts entries verbatim. Used when decoding recorded bindings.
    pub fn insert_raw_term(&mut self, v: Name, t: Term) {
        self.terms.insert(v, t);
    }

    pub fn insert_raw_abs(&mut self, p: Name, l: Lambda) {
        self.abstractions.insert(p, l);
    }

    /// True when no variable is bound to a term containing itself and no
    /// abstraction body mentions its own variable.
    pub fn is_acyclic(&self) -> bool {
        self.terms.iter().all(|(v, t)| !t.contains_var(v))
            && self.abstractions.iter().all(|(p, l)| !l.body.contains_abs(p))
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for (v, t) in &self.terms {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{v}={t}")?;
        }
        for (p, l) in &self.abstractions {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{p}={l}")?;
        }
        f.write_str("}")
    }
}

/// Applies `b`, beta-reducing every `P[x]` whose abstraction is bound and
/// whose argument resolves to an identifier.
pub fn substitute(t: &Term, b: &Binding) -> Term {
    match t {
        Term::Var(v) => b.terms.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::App(p, arg) => {
            let arg = substitute(arg, b);
            match (b.abstractions.get(p), &arg) {
                (Some(lambda), Term::Ident(_)) => substitute(&lambda.apply(&arg), b),
                _ => Term::App(p.clone(), Box::new(arg)),
            }
        }
        Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| substitute(a, b)).collect()),
        Term::Const(_) | Term::Ident(_) => t.clone(),
    }
}

/// All most-general extensions of `b` equating `t1` and `t2`.
pub fn unify(t1: &Term, t2: &Term, b: &Binding) -> Vec<Binding> {
    unify_with(t1, t2, b, UnifyOptions::default())
}

pub fn unify_with(t1: &Term, t2: &Term, b: &Binding, opts: UnifyOptions) -> Vec<Binding> {
    let a = b.apply(t1);
    let c = b.apply(t2);
    if a == c {
        return vec![b.clone()];
    }
    match (&a, &c) {
        (Term::Var(v), other) | (other, Term::Var(v)) => b.bind_term(v, other).into_iter().collect(),
        (Term::App(p, x), Term::App(q, y)) => {
            if p == q {
                unify_with(x, y, b, opts)
            } else {
                // flex-flex pairs between distinct abstractions are outside the fragment
                Vec::new()
            }
        }
        (Term::App(p, x), other) | (other, Term::App(p, x)) => match_app_in(p, x, other, b, opts),
        (Term::Compound(f, xs), Term::Compound(g, ys)) if f == g && xs.len() == ys.len() => {
            let mut acc = vec![b.clone()];
            for (x, y) in xs.iter().zip(ys) {
                acc = acc.iter().flat_map(|bb| unify_with(x, y, bb, opts)).collect();
                if acc.is_empty() {
                    break;
                }
            }
            dedup(acc)
        }
        _ => Vec::new(),
    }
}

/// Matches `pattern` (which must be an abstraction application) against `t`.
pub fn match_app(pattern: &Term, t: &Term, b: &Binding, opts: UnifyOptions) -> Vec<Binding> {
    match b.apply(pattern) {
        Term::App(p, x) => match_app_in(&p, &x, &b.apply(t), b, opts),
        other => unify_with(&other, t, b, opts),
    }
}

fn match_app_in(p: &Name, x: &Term, t: &Term, b: &Binding, opts: UnifyOptions) -> Vec<Binding> {
    // the abstracted body must be a proper logical form, never a bare identifier
    let eligible = match t {
        Term::Compound(..) => true,
        Term::Const(_) => opts.allow_vacuous,
        _ => false,
    };
    if !eligible || t.contains_abs(p) {
        return Vec::new();
    }
    let abstract_over = |bb: &Binding, i: &Name| -> Option<Binding> {
        if !opts.allow_vacuous && !t.contains_ident(i) {
            return None;
        }
        bb.bind_abs(p, Lambda { over: i.clone(), body: t.clone() })
    };
    match b.apply(x) {
        Term::Ident(i) => abstract_over(b, &i).into_iter().collect(),
        Term::Var(xv) => {
            let mut out = Vec::new();
            for i in t.identifiers() {
                if let Some(bb) = b.bind_term(&xv, &Term::Ident(i.clone())) {
                    out.extend(abstract_over(&bb, &i));
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

fn dedup(v: Vec<Binding>) -> Vec<Binding> {
    let mut out: Vec<Binding> = Vec::with_capacity(v.len());
    for b in v {
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out
}
