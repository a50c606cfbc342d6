//! Derivations as rewriting in the compatible preorder.
//!
//! Generation starts from a logical form and rewrites it into words with
//! the generation-oriented rules; parsing starts from words and rewrites
//! them into a logical form with the parsing-oriented rules. Conjugation
//! pairs `@a^-1 … @a` become blocks that can be moved, rotated and
//! dissolved. Every search result comes with a derivation that `replay`
//! re-checks step by step.

mod expr;
mod search;
mod state;
mod trace;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freegroup::{Letter, Sign, SignedAtom};
use crate::lexicon::{gen_rules, parse_grammar, parse_rules, GenRule, GrammarErrors, Lexicon, ParseRule, RuleError};
use crate::term::{Binding, Name, Term, UnifyOptions};

pub use expr::{build_items, parse_expr, Block, EngineExpr, Item};
pub use search::{generate, parse, saturate, Found, SearchOutcome};
pub use state::State;
pub use trace::{DerivationJson, TraceError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Generate,
    Parse,
    /// Products of relator instances, as in logic-program saturation.
    Compute,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Generate => "generate",
            Direction::Parse => "parse",
            Direction::Compute => "compute",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Expand,
    Cancel,
    Move,
    Rotate,
    Dissolve,
    Swap,
    Insert,
}

impl StepKind {
    pub const ALL: [StepKind; 7] = [
        StepKind::Expand,
        StepKind::Cancel,
        StepKind::Move,
        StepKind::Rotate,
        StepKind::Dissolve,
        StepKind::Swap,
        StepKind::Insert,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Expand => "expand",
            StepKind::Cancel => "cancel",
            StepKind::Move => "move",
            StepKind::Rotate => "rotate",
            StepKind::Dissolve => "dissolve",
            StepKind::Swap => "swap",
            StepKind::Insert => "insert",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepArg {
    None,
    /// Target slot for `move`, rotation amount for `rotate`.
    Index(usize),
    /// Conjugator `y` for `insert`, which multiplies in `y r y^-1`.
    Conjugator(Vec<SignedAtom>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationStep {
    pub kind: StepKind,
    /// Index path: top-level index, then indices inside nested blocks.
    pub path: Vec<usize>,
    /// Rule index for `expand`, relator index for `insert`.
    pub rule: Option<usize>,
    pub arg: StepArg,
    pub binding: Binding,
}

impl DerivationStep {
    pub fn new(kind: StepKind, path: Vec<usize>) -> Self {
        DerivationStep { kind, path, rule: None, arg: StepArg::None, binding: Binding::new() }
    }

    pub fn with_rule(mut self, rule: usize) -> Self {
        self.rule = Some(rule);
        self
    }

    pub fn with_arg(mut self, arg: StepArg) -> Self {
        self.arg = arg;
        self
    }

    pub fn with_binding(mut self, binding: Binding) -> Self {
        self.binding = binding;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub direction: Direction,
    /// Whether `swap` steps are permitted.
    pub commutative: bool,
    pub start: EngineExpr,
    pub steps: Vec<DerivationStep>,
    pub end: EngineExpr,
}

impl Derivation {
    /// The group element this derivation shows to be a result: the start
    /// times the inverse of the end for generation, the end times the
    /// inverse of the start for parsing, the end itself for computations.
    pub fn public_expr(&self) -> Option<EngineExpr> {
        let atoms = |e: &EngineExpr| e.flat_atoms().map(|v| v.into_iter().cloned().collect::<Vec<_>>());
        let (sem, words) = match self.direction {
            Direction::Generate => (atoms(&self.start)?, atoms(&self.end)?),
            Direction::Parse => (atoms(&self.end)?, atoms(&self.start)?),
            Direction::Compute => return Some(self.end.clone()),
        };
        let mut all = sem;
        all.extend(words.iter().rev().map(SignedAtom::inverse));
        Some(EngineExpr::from_atoms(all))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("step {step}: {message}")]
pub struct ReplayError {
    /// Zero-based step index; equal to the step count for a wrong end.
    pub step: usize,
    pub message: String,
}

/// Re-executes a derivation, checking every step, and returns the final
/// expression. Fails if any step is inapplicable or the recorded end differs.
pub fn replay(g: &Grammar, d: &Derivation) -> Result<EngineExpr, ReplayError> {
    let ctx = StepContext { grammar: g, direction: d.direction, commutative: d.commutative };
    let mut st = State::new(d.start.clone());
    for (k, step) in d.steps.iter().enumerate() {
        st = st.apply(&ctx, step).map_err(|message| ReplayError { step: k, message })?;
    }
    if st.expr != d.end {
        return Err(ReplayError {
            step: d.steps.len(),
            message: format!("replay ends in `{}`, derivation claims `{}`", st.expr, d.end),
        });
    }
    Ok(st.expr)
}

#[derive(Clone, Copy, Debug)]
pub struct StepContext<'g> {
    pub grammar: &'g Grammar,
    pub direction: Direction,
    pub commutative: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicResult {
    pub semantics: Term,
    pub words: Vec<Name>,
}

/// Recognizes `S Wn^-1 … W1^-1` with `S` a ground logical form and each
/// `Wi` a declared word.
pub fn is_public(lex: &Lexicon, e: &EngineExpr) -> Option<PublicResult> {
    let atoms = e.flat_atoms()?;
    let (first, rest) = atoms.split_first()?;
    let semantics = match (&first.letter, first.sign) {
        (Letter::Form(t), Sign::Pos) if t.is_ground() => t.clone(),
        _ => return None,
    };
    let mut words = Vec::with_capacity(rest.len());
    for a in rest.iter().rev() {
        match (&a.letter, a.sign) {
            (Letter::Word(w), Sign::Neg) if lex.phon.contains(w) => words.push(w.clone()),
            _ => return None,
        }
    }
    Some(PublicResult { semantics, words })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchLimits {
    /// Rule expansions (or relator insertions) along one derivation.
    pub max_expansions: usize,
    /// Atoms in one expression.
    pub max_items: usize,
    pub max_results: usize,
    /// Distinct states explored per query.
    pub max_states: usize,
    pub allow_vacuous_abstraction: bool,
    pub commutative: bool,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_expansions: 64,
            max_items: 256,
            max_results: 32,
            max_states: 200_000,
            allow_vacuous_abstraction: false,
            commutative: false,
        }
    }
}

impl SearchLimits {
    pub fn unify_options(&self) -> UnifyOptions {
        UnifyOptions { allow_vacuous: self.allow_vacuous_abstraction }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("{0}")]
    Grammar(#[from] GrammarErrors),
    #[error("{0}")]
    Rules(#[from] RuleError),
    #[error("{0}")]
    Input(String),
}

/// A lexicon with its derived rule sets.
#[derive(Clone, Debug)]
pub struct Grammar {
    pub lexicon: Lexicon,
    pub gen: Vec<GenRule>,
    pub parse: Vec<ParseRule>,
    /// Relators left out of generation-rule derivation in raw mode.
    pub gen_skipped: Vec<String>,
    /// Relators left out of parsing-rule derivation in raw mode.
    pub parse_skipped: Vec<String>,
}

impl Grammar {
    pub fn new(lexicon: Lexicon) -> Result<Self, RuleError> {
        let g = gen_rules(&lexicon)?;
        let p = parse_rules(&lexicon)?;
        Ok(Grammar { lexicon, gen: g.rules, parse: p.rules, gen_skipped: g.skipped, parse_skipped: p.skipped })
    }

    pub fn from_source(text: &str) -> Result<Self, EngineError> {
        Ok(Grammar::new(parse_grammar(text)?)?)
    }

    pub fn phon(&self) -> &BTreeSet<Name> {
        &self.lexicon.phon
    }
}

#[cfg(test)]
mod tests;
