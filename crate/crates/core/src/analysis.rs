//! Termination checks for derived rule sets.
//!
//! A generation rule passes when every logical form on its right-hand side
//! is strictly smaller than the left-hand side under every instantiation.
//! Meta-variables are compared as unknowns of equal size on both sides, so
//! a right-hand pattern passes when its skeleton is smaller and it uses no
//! meta-variable more often than the left-hand side does. A parsing rule
//! passes when its right-hand side contains no word, since every expansion
//! then consumes one word of the input.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::lexicon::{gen_rules, parse_rules, GenRule, Lexicon, ParseRule, RuleError, SchemeItem};
use crate::term::{Name, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CycleStatus {
    SizeDecreasing,
    NotSizeDecreasing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub rule: String,
    pub lhs: String,
    pub rhs: String,
    /// The left-hand side occurs literally on the right.
    pub self_cycle: bool,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.self_cycle {
            write!(f, "{}: `{}` reappears on the right: ground cycle in the rule itself", self.rule, self.rhs)
        } else {
            write!(f, "{}: `{}` is not strictly smaller than `{}`", self.rule, self.rhs, self.lhs)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleReport {
    pub status: CycleStatus,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl CycleReport {
    pub fn passed(&self) -> bool {
        self.status == CycleStatus::SizeDecreasing
    }
}

pub trait SizeCheck: fmt::Display {
    /// Offending (lhs, rhs) pairs, with the self-cycle flag.
    fn violations(&self) -> Vec<(String, String, bool)>;
}

/// Occurrence counts of meta-variables; `P[X]` counts as one unknown `P`.
fn skeleton(t: &Term) -> (usize, BTreeMap<Name, usize>) {
    let mut counts = BTreeMap::new();
    let size = skeleton_into(t, &mut counts);
    (size, counts)
}

fn skeleton_into(t: &Term, counts: &mut BTreeMap<Name, usize>) -> usize {
    match t {
        Term::Var(v) | Term::App(v, _) => {
            *counts.entry(v.clone()).or_default() += 1;
            1
        }
        Term::Const(_) | Term::Ident(_) => 1,
        Term::Compound(_, args) => 1 + args.iter().map(|a| skeleton_into(a, counts)).sum::<usize>(),
    }
}

fn strictly_smaller(small: &Term, big: &Term) -> bool {
    let (s, sv) = skeleton(small);
    let (b, bv) = skeleton(big);
    s < b && sv.iter().all(|(v, n)| bv.get(v).is_some_and(|m| n <= m))
}

impl SizeCheck for GenRule {
    fn violations(&self) -> Vec<(String, String, bool)> {
        self.rhs
            .iter()
            .filter_map(|item| match item {
                SchemeItem::Log(t, _) if !strictly_smaller(t, &self.lhs) => {
                    Some((self.lhs.to_string(), t.to_string(), *t == self.lhs))
                }
                _ => None,
            })
            .collect()
    }
}

impl SizeCheck for ParseRule {
    fn violations(&self) -> Vec<(String, String, bool)> {
        self.rhs
            .iter()
            .filter_map(|item| match item {
                SchemeItem::Phon(w, _) => Some((self.lhs.to_string(), w.to_string(), *w == self.lhs)),
                _ => None,
            })
            .collect()
    }
}

pub fn check_size_decrease<R: SizeCheck>(rules: &[R]) -> CycleReport {
    let mut witnesses = Vec::new();
    for r in rules {
        for (lhs, rhs, self_cycle) in r.violations() {
            witnesses.push(Witness { rule: r.to_string(), lhs, rhs, self_cycle });
        }
    }
    let status = if witnesses.is_empty() { CycleStatus::SizeDecreasing } else { CycleStatus::NotSizeDecreasing };
    let mut notes = Vec::new();
    if rules.is_empty() {
        notes.push("no rules".to_string());
    }
    if !witnesses.is_empty() && witnesses.iter().all(|w| !w.self_cycle) {
        notes.push("criterion not met; this does not establish that a ground cycle exists".to_string());
    }
    CycleReport { status, witnesses, notes }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReversibilityReport {
    pub generation: CycleReport,
    pub parsing: CycleReport,
    /// Relators left out of rule derivation in raw mode.
    pub skipped: Vec<String>,
}

impl ReversibilityReport {
    pub fn reversible(&self) -> bool {
        self.generation.passed() && self.parsing.passed()
    }
}

pub fn reversibility_report(lex: &Lexicon) -> Result<ReversibilityReport, RuleError> {
    let g = gen_rules(lex)?;
    let p = parse_rules(lex)?;
    let mut skipped = g.skipped.clone();
    skipped.extend(p.skipped.iter().cloned());
    Ok(ReversibilityReport {
        generation: check_size_decrease(&g.rules),
        parsing: check_size_decrease(&p.rules),
        skipped,
    })
}

fn write_direction(f: &mut fmt::Formatter<'_>, label: &str, r: &CycleReport) -> fmt::Result {
    if r.passed() {
        writeln!(f, "{label}: pass (size-decrease criterion met; terminates with finitely many results)")?;
    } else {
        writeln!(f, "{label}: fail (criterion not met; termination not guaranteed)")?;
        for w in &r.witnesses {
            writeln!(f, "  {w}")?;
        }
    }
    for n in &r.notes {
        writeln!(f, "  note: {n}")?;
    }
    Ok(())
}

impl fmt::Display for ReversibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_direction(f, "generation", &self.generation)?;
        write_direction(f, "parsing", &self.parsing)?;
        for s in &self.skipped {
            writeln!(f, "{s}")?;
        }
        if self.reversible() {
            writeln!(f, "inherently reversible")
        } else {
            writeln!(f, "not shown reversible")
        }
    }
}
