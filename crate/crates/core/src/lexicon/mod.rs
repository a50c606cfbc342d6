//! Relator schemes and the rewriting rules derived from them.
//!
//! A lexicon line such as `A^-1 s(A,B) B^-1 saw^-1` stands for every
//! relator obtained by instantiating its meta-variables. Generation rules
//! isolate the semantic head on the left (`s(A,B) -> A saw B`); parsing
//! rules isolate the single word (`saw -> A^-1 s(A,B) B^-1`).

mod syntax;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::freegroup::Sign;
use crate::term::{Name, Term};

pub(crate) use syntax::strip_comments;
pub use syntax::{parse_grammar, parse_items, GrammarError, GrammarErrors};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeItem {
    Phon(Name, Sign),
    Log(Term, Sign),
    /// Expression meta-variable (`@a`).
    Meta(Name, Sign),
}

impl SchemeItem {
    pub fn sign(&self) -> Sign {
        match self {
            SchemeItem::Phon(_, s) | SchemeItem::Log(_, s) | SchemeItem::Meta(_, s) => *s,
        }
    }

    pub fn inverse(&self) -> SchemeItem {
        match self {
            SchemeItem::Phon(w, s) => SchemeItem::Phon(w.clone(), -*s),
            SchemeItem::Log(t, s) => SchemeItem::Log(t.clone(), -*s),
            SchemeItem::Meta(m, s) => SchemeItem::Meta(m.clone(), -*s),
        }
    }
}

impl fmt::Display for SchemeItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = |s: &Sign| if *s == Sign::Neg { "^-1" } else { "" };
        match self {
            SchemeItem::Phon(w, s) => write!(f, "{w}{}", sign(s)),
            SchemeItem::Log(t, s) => write!(f, "{t}{}", sign(s)),
            SchemeItem::Meta(m, s) => write!(f, "@{m}{}", sign(s)),
        }
    }
}

/// Inverse of a product of items: reversed order, flipped signs.
pub fn invert_items(items: &[SchemeItem]) -> Vec<SchemeItem> {
    items.iter().rev().map(SchemeItem::inverse).collect()
}

pub struct Items<'a>(pub &'a [SchemeItem]);

impl fmt::Display for Items<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, it) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{it}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Eq)]
pub struct RelatorScheme {
    pub items: Vec<SchemeItem>,
    /// 1-based source line, 0 when built programmatically.
    pub line: usize,
    pub source: String,
}

impl PartialEq for RelatorScheme {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items
    }
}

impl RelatorScheme {
    pub fn new(items: Vec<SchemeItem>) -> Self {
        let source = Items(&items).to_string();
        RelatorScheme { items, line: 0, source }
    }

    pub fn phon_count(&self) -> usize {
        self.items.iter().filter(|i| matches!(i, SchemeItem::Phon(..))).count()
    }

    /// The commutator `@a @b @a^-1 @b^-1`, up to naming and rotation.
    pub fn is_commutator(&self) -> bool {
        let metas: Vec<(&Name, Sign)> = self
            .items
            .iter()
            .filter_map(|i| match i {
                SchemeItem::Meta(m, s) => Some((m, *s)),
                _ => None,
            })
            .collect();
        if metas.len() != 4 || self.items.len() != 4 {
            return false;
        }
        (0..4).any(|k| {
            let r: Vec<_> = metas[k..].iter().chain(&metas[..k]).collect();
            r[0].0 == r[2].0 && r[1].0 == r[3].0 && r[0].0 != r[1].0 && r[0].1 == -r[2].1 && r[1].1 == -r[3].1
        })
    }

    fn describe(&self) -> String {
        if self.line > 0 {
            format!("line {} (`{}`)", self.line, self.source)
        } else {
            format!("`{}`", self.source)
        }
    }
}

impl fmt::Display for RelatorScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Items(&self.items))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    pub phon: BTreeSet<Name>,
    pub relators: Vec<RelatorScheme>,
    /// Raw group-computation mode: relators outside the one-word shape are
    /// kept, and skipped during rule derivation.
    pub raw: bool,
    /// Any two adjacent items may be swapped.
    pub commutative: bool,
}

impl Lexicon {
    pub fn new(phon: BTreeSet<Name>, relators: Vec<RelatorScheme>) -> Self {
        let commutative = relators.iter().any(RelatorScheme::is_commutator);
        Lexicon { phon, relators, raw: commutative, commutative }
    }

    /// Functor names with the arities used for them in logical items.
    pub fn signature(&self) -> BTreeMap<Name, BTreeSet<usize>> {
        let mut sig: BTreeMap<Name, BTreeSet<usize>> = BTreeMap::new();
        for r in &self.relators {
            for item in &r.items {
                if let SchemeItem::Log(t, _) = item {
                    t.walk(&mut |sub| {
                        if let Some((f, n)) = sub.functor() {
                            sig.entry(f.clone()).or_default().insert(n);
                        }
                    });
                }
            }
        }
        sig
    }

    /// Rejects functors the lexicon never uses, or uses with another arity.
    pub fn check_signature(&self, t: &Term) -> Result<(), String> {
        let sig = self.signature();
        let mut problem = None;
        t.walk(&mut |sub| {
            if problem.is_some() {
                return;
            }
            if let Some((f, n)) = sub.functor() {
                match sig.get(f) {
                    None => problem = Some(format!("unknown functor `{f}`")),
                    Some(arities) if !arities.contains(&n) => {
                        let known: Vec<String> = arities.iter().map(|a| a.to_string()).collect();
                        problem = Some(format!("`{f}` used with arity {n}, expected {}", known.join(" or ")));
                    }
                    _ => {}
                }
            }
        });
        problem.map_or(Ok(()), Err)
    }

    pub fn with_commutator(mut self) -> Self {
        if !self.commutative {
            self.relators.push(crate::encodings::commutator_scheme());
        }
        self.commutative = true;
        self.raw = true;
        self
    }
}

impl fmt::Display for Lexicon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.commutative && !self.relators.iter().any(RelatorScheme::is_commutator) {
            writeln!(f, "mode commutative .")?;
        } else if self.raw && !self.commutative {
            writeln!(f, "mode raw .")?;
        }
        if !self.phon.is_empty() {
            f.write_str("phon")?;
            for w in &self.phon {
                write!(f, " {w}")?;
            }
            writeln!(f, " .")?;
        }
        for r in &self.relators {
            writeln!(f, "relator {} .", Items(&r.items))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenRule {
    pub lhs: Term,
    pub rhs: Vec<SchemeItem>,
    /// Index of the relator the rule came from.
    pub relator: usize,
}

impl fmt::Display for GenRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, Items(&self.rhs))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseRule {
    pub lhs: Name,
    pub rhs: Vec<SchemeItem>,
    pub relator: usize,
}

impl fmt::Display for ParseRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, Items(&self.rhs))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{relator}: {message}")]
pub struct RuleError {
    pub relator: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet<R> {
    pub rules: Vec<R>,
    /// Warnings for relators left out in raw mode.
    pub skipped: Vec<String>,
}

fn head_candidates(r: &RelatorScheme) -> Vec<usize> {
    r.items
        .iter()
        .enumerate()
        .filter(|(_, it)| matches!(it, SchemeItem::Log(t, Sign::Pos) if t.functor().is_some()))
        .map(|(k, _)| k)
        .collect()
}

/// Generation-oriented rules: for a relator `a b c` with semantic head `b`,
/// the rule `b -> a^-1 c^-1`.
pub fn gen_rules(lex: &Lexicon) -> Result<RuleSet<GenRule>, RuleError> {
    let mut out = RuleSet { rules: Vec::new(), skipped: Vec::new() };
    for (idx, r) in lex.relators.iter().enumerate() {
        let heads = head_candidates(r);
        if heads.len() != 1 {
            let message = if heads.is_empty() {
                "no semantic head (positive logical form with a functor)".to_string()
            } else {
                format!("{} candidate semantic heads; the head must be unique", heads.len())
            };
            if lex.raw {
                out.skipped.push(format!("no generation rule from {}: {message}", r.describe()));
                continue;
            }
            return Err(RuleError { relator: r.describe(), message });
        }
        let h = heads[0];
        let SchemeItem::Log(lhs, _) = &r.items[h] else { unreachable!() };
        let mut rhs = invert_items(&r.items[..h]);
        rhs.extend(invert_items(&r.items[h + 1..]));
        out.rules.push(GenRule { lhs: lhs.clone(), rhs, relator: idx });
    }
    Ok(out)
}

/// Parsing-oriented rules: for a relator `a w^-1 c` with single word `w`,
/// the rule `w -> c a`.
pub fn parse_rules(lex: &Lexicon) -> Result<RuleSet<ParseRule>, RuleError> {
    let mut out = RuleSet { rules: Vec::new(), skipped: Vec::new() };
    for (idx, r) in lex.relators.iter().enumerate() {
        let words: Vec<usize> = r
            .items
            .iter()
            .enumerate()
            .filter(|(_, it)| matches!(it, SchemeItem::Phon(..)))
            .map(|(k, _)| k)
            .collect();
        let problem = match words.as_slice() {
            [w] if r.items[*w].sign() == Sign::Neg => None,
            [_] => Some("the word must occur inverted".to_string()),
            ws => Some(format!("{} phonological items; exactly one is required", ws.len())),
        };
        if let Some(message) = problem {
            if lex.raw {
                out.skipped.push(format!("no parsing rule from {}: {message}", r.describe()));
                continue;
            }
            return Err(RuleError { relator: r.describe(), message });
        }
        let w = words[0];
        let SchemeItem::Phon(word, _) = &r.items[w] else { unreachable!() };
        let mut rhs = r.items[w + 1..].to_vec();
        rhs.extend_from_slice(&r.items[..w]);
        out.rules.push(ParseRule { lhs: word.clone(), rhs, relator: idx });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;


    fn english() -> Lexicon {
        parse_grammar(crate::ENGLISH).unwrap()
    }

    #[test]
    fn simple_gen_rules() {
        let lex = parse_grammar("phon john saw .\nrelator j john^-1 .\nrelator A^-1 s(A,B) B^-1 saw^-1 .").unwrap();
        let rules = gen_rules(&lex).unwrap().rules;
        assert_eq!(rules[0].to_string(), "j -> john");
        assert_eq!(rules[1].to_string(), "s(A,B) -> A saw B");
    }

    #[test]
    fn quantifier_gen_rule() {
        let rules = gen_rules(&english()).unwrap().rules;
        let ev = rules.iter().find(|r| r.lhs.to_string() == "ev(N,X,P[X])").unwrap();
        assert_eq!(ev.to_string(), "ev(N,X,P[X]) -> @a^-1 every N X^-1 @a P[X]");
    }

    #[test]
    fn parse_rule_examples() {
        let rules = parse_rules(&english()).unwrap().rules;
        let find = |w: &str| rules.iter().find(|r| &*r.lhs == w).unwrap().to_string();
        assert_eq!(find("saw"), "saw -> A^-1 s(A,B) B^-1");
        assert_eq!(find("the"), "the -> t(N) N^-1");
        assert_eq!(find("that"), "that -> N^-1 tt(N,X,P[X]) P[X]^-1 @a^-1 X @a");
    }

    #[test]
    fn ambiguous_head_is_rejected_with_line() {
        let lex = parse_grammar("phon w .\n\nrelator f(A) g(A) w^-1 .").unwrap();
        let err = gen_rules(&lex).unwrap_err();
        assert!(err.relator.contains("line 3"), "{err}");
    }

    #[test]
    fn parse_rules_need_exactly_one_word() {
        let lex = parse_grammar("phon a b .\nrelator f a^-1 b^-1 .").unwrap();
        assert!(parse_rules(&lex).is_err());
        let lex = parse_grammar("relator f g^-1 .").unwrap();
        assert!(parse_rules(&lex).is_err());
    }

    #[test]
    fn raw_mode_skips_with_warning() {
        let lex = parse_grammar("mode raw .\nphon a b .\nrelator f a^-1 b^-1 .").unwrap();
        let set = parse_rules(&lex).unwrap();
        assert!(set.rules.is_empty());
        assert_eq!(set.skipped.len(), 1);
    }

    #[test]
    fn signature_checks() {
        let lex = english();
        assert!(lex.check_signature(&"s(j,l)".parse().unwrap()).is_ok());
        assert!(lex.check_signature(&"s(j)".parse().unwrap()).is_err());
        assert!(lex.check_signature(&"q(j)".parse().unwrap()).is_err());
        assert!(lex.check_signature(&"ev(m,#x,r(#x))".parse().unwrap()).is_ok());
    }

    #[test]
    fn commutator_detection() {
        assert!(crate::encodings::commutator_scheme().is_commutator());
        let lex = parse_grammar("relator @a @b @a^-1 @b^-1 .").unwrap();
        assert!(lex.commutative);
        let lex = parse_grammar("relator @a f @a^-1 .").unwrap();
        assert!(!lex.relators[0].is_commutator());
    }
}
