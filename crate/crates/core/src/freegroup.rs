//! The free group over a vocabulary of words and logical forms.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Neg;

use serde::{Deserialize, Serialize};

use crate::term::{Cursor, Name, SyntaxError, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Pos,
    Neg,
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// A vocabulary element: a phonological token or a logical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Word(Name),
    Form(Term),
}

impl Letter {
    pub fn is_ground(&self) -> bool {
        match self {
            Letter::Word(_) => true,
            Letter::Form(t) => t.is_ground(),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Word(w) => write!(f, "{w}"),
            Letter::Form(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedAtom {
    pub letter: Letter,
    pub sign: Sign,
}

impl SignedAtom {
    pub fn new(letter: Letter, sign: Sign) -> Self {
        SignedAtom { letter, sign }
    }

    pub fn word(w: &str) -> Self {
        SignedAtom::new(Letter::Word(crate::term::name(w)), Sign::Pos)
    }

    pub fn form(t: Term) -> Self {
        SignedAtom::new(Letter::Form(t), Sign::Pos)
    }

    pub fn inverse(&self) -> Self {
        SignedAtom::new(self.letter.clone(), -self.sign)
    }

    pub fn cancels(&self, other: &SignedAtom) -> bool {
        self.sign == -other.sign && self.letter == other.letter
    }
}

impl fmt::Display for SignedAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Pos => write!(f, "{}", self.letter),
            Sign::Neg => write!(f, "{}^-1", self.letter),
        }
    }
}

/// A reduced word; the empty word is the neutral element.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    atoms: Vec<SignedAtom>,
}

impl ReducedWord {
    pub fn neutral() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[SignedAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_neutral(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn into_atoms(self) -> Vec<SignedAtom> {
        self.atoms
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("1");
        }
        for (k, a) in self.atoms.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Cancels adjacent inverse pairs with a single pushdown pass.
pub fn reduce(raw: impl IntoIterator<Item = SignedAtom>) -> ReducedWord {
    let mut stack: Vec<SignedAtom> = Vec::new();
    for atom in raw {
        if stack.last().is_some_and(|top| top.cancels(&atom)) {
            stack.pop();
        } else {
            stack.push(atom);
        }
    }
    ReducedWord { atoms: stack }
}

pub fn product(a: &ReducedWord, b: &ReducedWord) -> ReducedWord {
    reduce(a.atoms.iter().chain(&b.atoms).cloned())
}

pub fn inverse(a: &ReducedWord) -> ReducedWord {
    ReducedWord {
        atoms: a.atoms.iter().rev().map(SignedAtom::inverse).collect(),
    }
}

/// `y x y⁻¹`
pub fn conjugate(x: &ReducedWord, y: &ReducedWord) -> ReducedWord {
    product(&product(y, x), &inverse(y))
}

/// Every cyclic rotation of `a`, re-reduced, without duplicates.
pub fn cyclic_rotations(a: &ReducedWord) -> Vec<ReducedWord> {
    if a.is_neutral() {
        return vec![ReducedWord::neutral()];
    }
    let n = a.atoms.len();
    let mut out: Vec<ReducedWord> = Vec::new();
    for k in 0..n {
        let rotated = reduce(a.atoms[k..].iter().chain(&a.atoms[..k]).cloned());
        if !out.contains(&rotated) {
            out.push(rotated);
        }
    }
    out
}

/// Parses a space-separated raw word: atoms are words from `phon`, logical
/// forms, or `1`, each optionally suffixed with `^-1`. Logical forms must be
/// ground. The result is not reduced.
pub fn parse_raw_word(text: &str, phon: &BTreeSet<Name>) -> Result<Vec<SignedAtom>, SyntaxError> {
    let mut cur = Cursor::new(text);
    let mut out = Vec::new();
    loop {
        cur.skip_ws();
        if cur.at_end() {
            return Ok(out);
        }
        let start = cur.offset();
        if cur.peek() == Some('1') && !matches!(cur.peek_second(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            cur.bump();
            if cur.eat_str("^-1") {
                // 1⁻¹ = 1
            }
            continue;
        }
        let term = cur.term()?;
        if !term.is_ground() {
            return Err(cur.error_at(start, "group elements must be ground"));
        }
        let sign = if cur.eat_str("^-1") { Sign::Neg } else { Sign::Pos };
        if !matches!(cur.peek(), None | Some(' ' | '\t' | '\n' | '\r')) {
            return Err(cur.error("expected whitespace between atoms"));
        }
        let letter = match term {
            Term::Const(c) if phon.contains(&c) => Letter::Word(c),
            other => Letter::Form(other),
        };
        out.push(SignedAtom::new(letter, sign));
    }
}

pub fn parse_word(text: &str, phon: &BTreeSet<Name>) -> Result<ReducedWord, SyntaxError> {
    parse_raw_word(text, phon).map(reduce)
}
