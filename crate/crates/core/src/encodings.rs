//! Other formalisms expressed as relators: the commutator, logic programs
//! and context-free (DCG-style) rules. Also a bottom-up consequence oracle
//! for logic programs that does not touch the rewriting engine.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::freegroup::Sign;
use crate::lexicon::{strip_comments, GrammarError, GrammarErrors, Lexicon, RelatorScheme, SchemeItem};
use crate::term::{name, Cursor, Name, Term};

/// `@a @b @a^-1 @b^-1`
pub fn commutator_scheme() -> RelatorScheme {
    let m = |n: &str, s| SchemeItem::Meta(name(n), s);
    RelatorScheme::new(vec![m("a", Sign::Pos), m("b", Sign::Pos), m("a", Sign::Neg), m("b", Sign::Neg)])
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Term>,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (k, b) in self.body.iter().enumerate() {
            f.write_str(if k == 0 { " :- " } else { ", " })?;
            write!(f, "{b}")?;
        }
        f.write_str(" .")
    }
}

/// Reads `head :- b1, b2 .` clauses and `fact .` lines; `#` comments as in
/// grammar files.
pub fn parse_program(text: &str) -> Result<Vec<Clause>, GrammarErrors> {
    let cleaned = strip_comments(text);
    let mut cur = Cursor::new(&cleaned);
    let mut clauses = Vec::new();
    let mut errors = Vec::new();
    loop {
        cur.skip_ws();
        if cur.at_end() {
            break;
        }
        match clause(&mut cur) {
            Ok(c) => clauses.push(c),
            Err(e) => {
                errors.push(GrammarError::from(e));
                while let Some(c) = cur.bump() {
                    if c == '.' {
                        break;
                    }
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(clauses)
    } else {
        Err(GrammarErrors(errors))
    }
}

fn clause(cur: &mut Cursor) -> Result<Clause, crate::term::SyntaxError> {
    let at = cur.offset();
    let head = cur.term()?;
    if head.functor().is_none() {
        return Err(cur.error_at(at, "clause head must be a constant or compound term"));
    }
    cur.skip_ws();
    let mut body = Vec::new();
    if cur.eat_str(":-") {
        loop {
            cur.skip_ws();
            body.push(cur.term()?);
            cur.skip_ws();
            if !cur.eat(',') {
                break;
            }
        }
    }
    cur.skip_ws();
    cur.expect('.')?;
    Ok(Clause { head, body })
}

/// Each clause `P0 :- P1, …, Pn` becomes the relator `P0 Pn^-1 … P1^-1` in a
/// commutative structure.
pub fn encode_logic_program(clauses: &[Clause]) -> Lexicon {
    let relators = clauses
        .iter()
        .map(|c| {
            let mut items = vec![SchemeItem::Log(c.head.clone(), Sign::Pos)];
            items.extend(c.body.iter().rev().map(|b| SchemeItem::Log(b.clone(), Sign::Neg)));
            RelatorScheme::new(items)
        })
        .collect();
    Lexicon { phon: BTreeSet::new(), relators, raw: true, commutative: true }
}

/// Result of bottom-up evaluation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Closure {
    pub facts: BTreeSet<Term>,
    /// True when a round added nothing before the bound was reached.
    pub saturated: bool,
}

/// Naive bottom-up evaluation for at most `bound` rounds. Only ground heads
/// are kept.
pub fn forward_chain(clauses: &[Clause], bound: usize) -> Closure {
    let mut facts: BTreeSet<Term> = BTreeSet::new();
    for _ in 0..bound {
        let mut new = BTreeSet::new();
        for c in clauses {
            let mut envs = vec![BTreeMap::new()];
            for goal in &c.body {
                let mut next = Vec::new();
                for env in &envs {
                    for fact in &facts {
                        let mut e = env.clone();
                        if match_ground(goal, fact, &mut e) {
                            next.push(e);
                        }
                    }
                }
                envs = next;
            }
            for env in &envs {
                if let Some(h) = instantiate(&c.head, env) {
                    if !facts.contains(&h) {
                        new.insert(h);
                    }
                }
            }
        }
        if new.is_empty() {
            return Closure { facts, saturated: true };
        }
        facts.extend(new);
    }
    Closure { facts, saturated: false }
}

fn match_ground(pattern: &Term, fact: &Term, env: &mut BTreeMap<Name, Term>) -> bool {
    match (pattern, fact) {
        (Term::Var(v), _) => match env.get(v) {
            Some(bound) => bound == fact,
            None => {
                env.insert(v.clone(), fact.clone());
                true
            }
        },
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_ground(x, y, env))
        }
        (Term::App(..), _) => false,
        (p, t) => p == t,
    }
}

fn instantiate(t: &Term, env: &BTreeMap<Name, Term>) -> Option<Term> {
    match t {
        Term::Var(v) => env.get(v).cloned(),
        Term::App(..) => None,
        Term::Compound(f, args) => {
            let args = args.iter().map(|a| instantiate(a, env)).collect::<Option<Vec<_>>>()?;
            Some(Term::Compound(f.clone(), args))
        }
        other => Some(other.clone()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DcgItem {
    Word(Name),
    Nonterminal(Term),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DcgRule {
    pub lhs: Term,
    pub rhs: Vec<DcgItem>,
}

impl fmt::Display for DcgRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ==>", self.lhs)?;
        for item in &self.rhs {
            match item {
                DcgItem::Word(w) => write!(f, " {w}")?,
                DcgItem::Nonterminal(t) => write!(f, " {t}")?,
            }
        }
        Ok(())
    }
}

/// `A0 ==> A1 … An` becomes `A0 An^-1 … A1^-1`, left unreduced.
pub fn dcg_relator(rule: &DcgRule) -> Vec<SchemeItem> {
    let mut items = vec![SchemeItem::Log(rule.lhs.clone(), Sign::Pos)];
    items.extend(rule.rhs.iter().rev().map(|it| match it {
        DcgItem::Word(w) => SchemeItem::Phon(w.clone(), Sign::Neg),
        DcgItem::Nonterminal(t) => SchemeItem::Log(t.clone(), Sign::Neg),
    }));
    items
}

pub fn encode_dcg(rules: &[DcgRule], phon: BTreeSet<Name>) -> Lexicon {
    let relators = rules
        .iter()
        .map(|r| {
            let mut scheme = RelatorScheme::new(dcg_relator(r));
            scheme.source = r.to_string();
            scheme
        })
        .collect();
    Lexicon { phon, relators, raw: true, commutative: false }
}

/// Threads a derivation-tree argument through every nonterminal: rule `k`
/// builds `d<k>(T1,…,Tm)` from the trees of its `m` nonterminal children.
/// A nonterminal then always rewrites to strictly smaller logical forms.
pub fn enrich_with_derivations(rules: &[DcgRule]) -> Vec<DcgRule> {
    rules
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let mut children = Vec::new();
            let rhs = r
                .rhs
                .iter()
                .map(|it| match it {
                    DcgItem::Word(w) => DcgItem::Word(w.clone()),
                    DcgItem::Nonterminal(t) => {
                        let v = Term::var(&format!("T{}", children.len() + 1));
                        children.push(v.clone());
                        DcgItem::Nonterminal(add_argument(t, v))
                    }
                })
                .collect();
            let tree = Term::compound(&format!("d{}", k + 1), children);
            DcgRule { lhs: add_argument(&r.lhs, tree), rhs }
        })
        .collect()
}

fn add_argument(t: &Term, extra: Term) -> Term {
    match t {
        Term::Const(c) => Term::Compound(c.clone(), vec![extra]),
        Term::Compound(f, args) => {
            let mut args = args.clone();
            args.push(extra);
            Term::Compound(f.clone(), args)
        }
        other => other.clone(),
    }
}

/// Extracts the `==>` rules of a grammar source, keeping its `phon` set.
pub fn dcg_rules_of(lex: &Lexicon) -> Vec<DcgRule> {
    lex.relators
        .iter()
        .filter_map(|r| {
            let (first, rest) = r.items.split_first()?;
            let SchemeItem::Log(lhs, Sign::Pos) = first else { return None };
            let rhs = rest
                .iter()
                .rev()
                .map(|it| match it {
                    SchemeItem::Phon(w, Sign::Neg) => Some(DcgItem::Word(w.clone())),
                    SchemeItem::Log(t, Sign::Neg) => Some(DcgItem::Nonterminal(t.clone())),
                    _ => None,
                })
                .collect::<Option<Vec<_>>>()?;
            Some(DcgRule { lhs: lhs.clone(), rhs })
        })
        .collect()
}
