//! Logical forms: constants, compound terms, argument identifiers,
//! term meta-variables and abstraction applications `P[X]`.

mod syntax;
mod unify;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use syntax::{Cursor, SyntaxError};
pub use unify::{match_app, substitute, unify, unify_with, Binding, Lambda, UnifyOptions};

/// Shared, immutable symbol name.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// A logical form, possibly containing meta-variables.
///
/// Identifiers are stored without their `#` prefix. `App(p, x)` is the
/// abstraction variable `p` applied to `x`, which must be an identifier or
/// a meta-variable ranging over identifiers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Name),
    Compound(Name, Vec<Term>),
    Ident(Name),
    Var(Name),
    App(Name, Box<Term>),
}

impl Term {
    pub fn constant(s: &str) -> Term {
        Term::Const(name(s))
    }

    pub fn ident(s: &str) -> Term {
        Term::Ident(name(s))
    }

    pub fn var(s: &str) -> Term {
        Term::Var(name(s))
    }

    pub fn compound(f: &str, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Const(name(f))
        } else {
            Term::Compound(name(f), args)
        }
    }

    pub fn app(p: &str, arg: Term) -> Term {
        Term::App(name(p), Box::new(arg))
    }

    /// Ground iff it contains no meta-variable and no abstraction application.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Const(_) | Term::Ident(_) => true,
            Term::Var(_) | Term::App(..) => false,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn is_ident(&self) -> bool {
        matches!(self, Term::Ident(_))
    }

    /// Head functor name and arity for constants and compounds.
    pub fn functor(&self) -> Option<(&Name, usize)> {
        match self {
            Term::Const(f) => Some((f, 0)),
            Term::Compound(f, args) => Some((f, args.len())),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        term_size(self)
    }

    pub fn contains_var(&self, v: &str) -> bool {
        match self {
            Term::Var(w) => &**w == v,
            Term::App(_, arg) => arg.contains_var(v),
            Term::Compound(_, args) => args.iter().any(|a| a.contains_var(v)),
            _ => false,
        }
    }

    pub fn contains_abs(&self, p: &str) -> bool {
        match self {
            Term::App(q, arg) => &**q == p || arg.contains_abs(p),
            Term::Compound(_, args) => args.iter().any(|a| a.contains_abs(p)),
            _ => false,
        }
    }

    pub fn contains_ident(&self, i: &str) -> bool {
        match self {
            Term::Ident(j) => &**j == i,
            Term::App(_, arg) => arg.contains_ident(i),
            Term::Compound(_, args) => args.iter().any(|a| a.contains_ident(i)),
            _ => false,
        }
    }

    /// Identifiers in order of first occurrence (pre-order, left to right).
    pub fn identifiers(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let Term::Ident(i) = t {
                if !out.contains(i) {
                    out.push(i.clone());
                }
            }
        });
        out
    }

    /// Meta-variable names (term variables and abstraction variables) in
    /// order of first occurrence.
    pub fn meta_names(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.walk(&mut |t| match t {
            Term::Var(v) | Term::App(v, _) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            _ => {}
        });
        out
    }

    pub fn walk(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Compound(_, args) => args.iter().for_each(|a| a.walk(f)),
            Term::App(_, arg) => arg.walk(f),
            _ => {}
        }
    }

    /// Rebuilds the term bottom-up, letting `f` replace leaves.
    pub fn map_leaves(&self, f: &mut impl FnMut(&Term) -> Option<Term>) -> Term {
        if let Some(t) = f(self) {
            return t;
        }
        match self {
            Term::Compound(g, args) => {
                Term::Compound(g.clone(), args.iter().map(|a| a.map_leaves(f)).collect())
            }
            Term::App(p, arg) => Term::App(p.clone(), Box::new(arg.map_leaves(f))),
            other => other.clone(),
        }
    }

    /// Replaces every occurrence of identifier `from` by `to`.
    pub fn replace_ident(&self, from: &str, to: &Term) -> Term {
        self.map_leaves(&mut |t| match t {
            Term::Ident(i) if &**i == from => Some(to.clone()),
            _ => None,
        })
    }

    /// Renames every meta-variable and abstraction variable through `f`.
    pub fn rename_metas(&self, f: &mut impl FnMut(&Name) -> Name) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::App(p, arg) => Term::App(f(p), Box::new(arg.rename_metas(f))),
            Term::Compound(g, args) => {
                Term::Compound(g.clone(), args.iter().map(|a| a.rename_metas(f)).collect())
            }
            other => other.clone(),
        }
    }
}

/// Node count of the term tree; identifiers and constants count 1.
pub fn term_size(t: &Term) -> usize {
    match t {
        Term::Const(_) | Term::Ident(_) | Term::Var(_) => 1,
        Term::App(_, arg) => 1 + term_size(arg),
        Term::Compound(_, args) => 1 + args.iter().map(term_size).sum::<usize>(),
    }
}

/// Renames identifiers to `#x1`, `#x2`, ... in order of first occurrence.
pub fn canonicalize_identifiers(t: &Term) -> Term {
    let order = t.identifiers();
    t.map_leaves(&mut |leaf| match leaf {
        Term::Ident(i) => {
            let k = order.iter().position(|o| o == i).unwrap_or(0);
            Some(Term::Ident(name(&format!("x{}", k + 1))))
        }
        _ => None,
    })
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write!(f, "{c}"),
            Term::Ident(i) => write!(f, "#{i}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::App(p, arg) => write!(f, "{p}[{arg}]"),
            Term::Compound(g, args) => {
                write!(f, "{g}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for Term {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut cur = Cursor::new(s);
        cur.skip_ws();
        let t = cur.term()?;
        cur.skip_ws();
        if !cur.at_end() {
            return Err(cur.error("trailing input after term"));
        }
        Ok(t)
    }
}

/// Supplies identifiers that are fresh within one derivation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdentifierSource {
    counter: usize,
    reserved: BTreeSet<Name>,
}

impl IdentifierSource {
    pub fn new() -> Self {
        Self::default()
    }

    /// A source that never emits any of `taken`.
    pub fn avoiding(taken: impl IntoIterator<Item = Name>) -> Self {
        IdentifierSource {
            counter: 0,
            reserved: taken.into_iter().collect(),
        }
    }

    pub fn issued(&self) -> usize {
        self.counter
    }

    pub fn fresh(&mut self) -> Term {
        loop {
            self.counter += 1;
            let candidate = name(&format!("x{}", self.counter));
            if !self.reserved.contains(&candidate) {
                return Term::Ident(candidate);
            }
        }
    }
}

pub fn fresh_identifier(src: &mut IdentifierSource) -> Term {
    src.fresh()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(term_size(&t("j")), 1);
        assert_eq!(term_size(&t("s(j,l)")), 3);
        // ev, m, #x, sm, w, #y, s, #x, #y
        assert_eq!(term_size(&t("ev(m,#x,sm(w,#y,s(#x,#y)))")), 9);
    }

    #[test]
    fn display_round_trips() {
        for s in ["j", "s(j,l)", "ev(N,X,P[X])", "P[#x]", "i(E,A)", "#x", "tt(t(m),#x1,s(l,#x1))"] {
            assert_eq!(t(s).to_string(), s);
        }
    }

    #[test]
    fn fresh_identifiers_are_distinct() {
        let mut src = IdentifierSource::new();
        assert_eq!(fresh_identifier(&mut src), Term::ident("x1"));
        assert_eq!(fresh_identifier(&mut src), Term::ident("x2"));
        let mut seen = BTreeSet::new();
        let mut src = IdentifierSource::new();
        for _ in 0..100 {
            assert!(seen.insert(src.fresh()));
        }
    }

    #[test]
    fn fresh_skips_reserved_names() {
        let mut src = IdentifierSource::avoiding([name("x1"), name("x3")]);
        assert_eq!(src.fresh(), Term::ident("x2"));
        assert_eq!(src.fresh(), Term::ident("x4"));
    }

    #[test]
    fn groundness() {
        assert!(t("ev(m,#x,s(#x,j))").is_ground());
        assert!(!t("s(A,j)").is_ground());
        assert!(!t("P[#x]").is_ground());
    }

    #[test]
    fn canonical_identifier_order() {
        let c = canonicalize_identifiers(&t("sm(w,#y,ev(m,#x,s(#x,#y)))"));
        assert_eq!(c.to_string(), "sm(w,#x1,ev(m,#x2,s(#x2,#x1)))");
    }
}
