//! Grammar file reader.
//!
//! ```text
//! # comment
//! phon john saw .
//! relator j john^-1 .
//! relator A^-1 s(A,B) B^-1 saw^-1 .
//! s ==> np vp .          # grammar rule, compiled to a relator
//! mode raw .             # keep relators outside the one-word shape
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{Lexicon, RelatorScheme, SchemeItem};
use crate::encodings::{dcg_relator, DcgItem, DcgRule};
use crate::freegroup::Sign;
use crate::term::{name, Cursor, Name, SyntaxError, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct GrammarError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl From<SyntaxError> for GrammarError {
    fn from(e: SyntaxError) -> Self {
        GrammarError { line: e.line, column: e.column, message: e.message }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct GrammarErrors(pub Vec<GrammarError>);

impl fmt::Display for GrammarErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Blanks out comments while keeping byte offsets intact.
///
/// `#` opens a comment when it is the first non-blank character of a line
/// or is followed by whitespace or the end of the line; otherwise it is the
/// prefix of an identifier such as `#x`.
pub(crate) fn strip_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for (k, line) in text.split('\n').enumerate() {
        if k > 0 {
            out.push('\n');
        }
        let mut cut = None;
        let bytes = line.as_bytes();
        for (i, &b) in bytes.iter().enumerate() {
            if b != b'#' {
                continue;
            }
            let first = line[..i].trim().is_empty();
            let next_blank = bytes.get(i + 1).map_or(true, |c| c.is_ascii_whitespace());
            if first || next_blank {
                cut = Some(i);
                break;
            }
        }
        match cut {
            Some(i) => {
                out.push_str(&line[..i]);
                out.extend(line[i..].chars().map(|c| if c == '\r' { '\r' } else { ' ' }));
            }
            None => out.push_str(line),
        }
    }
    out
}

fn at_item_end(cur: &Cursor) -> bool {
    matches!(cur.peek(), None | Some('.')) || cur.peek().is_some_and(char::is_whitespace)
}

/// Reads scheme items up to (not including) the terminating `.` or the end
/// of input. Constants declared in `phon` become word items.
pub fn parse_items(cur: &mut Cursor, phon: &BTreeSet<Name>) -> Result<Vec<SchemeItem>, SyntaxError> {
    let mut items = Vec::new();
    loop {
        cur.skip_ws();
        if cur.at_end() || cur.peek() == Some('.') {
            return Ok(items);
        }
        let start = cur.offset();
        let item = if cur.eat('@') {
            let Some(m) = cur.name() else {
                return Err(cur.error("expected a name after `@`"));
            };
            SchemeItem::Meta(name(m), Sign::Pos)
        } else {
            match cur.term()? {
                Term::Const(c) if phon.contains(&c) => SchemeItem::Phon(c, Sign::Pos),
                t => SchemeItem::Log(t, Sign::Pos),
            }
        };
        let item = if cur.eat_str("^-1") { item.inverse() } else { item };
        if !at_item_end(cur) {
            return Err(cur.error_at(start, "items must be separated by whitespace"));
        }
        items.push(item);
    }
}

struct Reader<'a> {
    src: &'a str,
    cur: Cursor<'a>,
    lex: Lexicon,
    errors: Vec<GrammarError>,
    /// Lowercase constants used before any `phon` declaration of them.
    early_constants: BTreeMap<Name, usize>,
    /// The current statement's `.` has been consumed.
    terminated: bool,
}

impl<'a> Reader<'a> {
    fn err_at(&self, offset: usize, message: String) -> GrammarError {
        let (line, column) = self.cur.position_of(offset);
        GrammarError { line, column, message }
    }

    /// Skips to just past the next `.` so later statements still get checked.
    fn recover(&mut self) {
        while let Some(c) = self.cur.bump() {
            if c == '.' {
                break;
            }
        }
    }

    fn finish_statement(&mut self) -> Result<(), GrammarError> {
        self.cur.skip_ws();
        if self.cur.eat('.') {
            self.terminated = true;
            Ok(())
        } else {
            Err(self.cur.error("expected `.` at the end of the statement").into())
        }
    }

    fn note_constants(&mut self, items: &[SchemeItem], offset: usize) {
        for item in items {
            if let SchemeItem::Log(t, _) = item {
                t.walk(&mut |sub| {
                    if let Term::Const(c) = sub {
                        self.early_constants.entry(c.clone()).or_insert(offset);
                    }
                });
            }
        }
    }

    fn statement(&mut self) -> Result<(), GrammarError> {
        let start = self.cur.offset();
        let mut probe = self.cur.clone();
        let keyword = probe.name().unwrap_or("");
        let keyword_done = at_item_end(&probe);
        match keyword {
            "phon" if keyword_done => {
                self.cur = probe;
                loop {
                    self.cur.skip_ws();
                    if self.cur.peek() == Some('.') || self.cur.at_end() {
                        break;
                    }
                    let at = self.cur.offset();
                    match self.cur.name() {
                        Some(w) if w.starts_with(|c: char| c.is_ascii_lowercase() || c.is_ascii_digit()) => {
                            let w = name(w);
                            if let Some(&used) = self.early_constants.get(&w) {
                                let (line, _) = self.cur.position_of(used);
                                return Err(self.err_at(
                                    at,
                                    format!("phonological token `{w}` is declared after its use on line {line}"),
                                ));
                            }
                            self.lex.phon.insert(w);
                        }
                        _ => return Err(self.err_at(at, "expected a lowercase phonological token".into())),
                    }
                    if !at_item_end(&self.cur) {
                        return Err(self.cur.error("tokens must be separated by whitespace").into());
                    }
                }
                self.finish_statement()
            }
            "mode" if keyword_done => {
                self.cur = probe;
                self.cur.skip_ws();
                let at = self.cur.offset();
                match self.cur.name() {
                    Some("raw") => self.lex.raw = true,
                    Some("commutative") => {
                        self.lex.raw = true;
                        self.lex.commutative = true;
                    }
                    _ => return Err(self.err_at(at, "expected `raw` or `commutative`".into())),
                }
                self.finish_statement()
            }
            "relator" if keyword_done => {
                self.cur = probe;
                let body = self.cur.offset();
                let items = parse_items(&mut self.cur, &self.lex.phon)?;
                let source = self.cur_source(body);
                self.finish_statement()?;
                if items.is_empty() {
                    return Err(self.err_at(start, "a relator needs at least one item".into()));
                }
                self.push_relator(items, start, source)
            }
            _ => self.dcg_statement(start),
        }
    }

    fn cur_source(&self, from: usize) -> String {
        let full = &self.src[from..self.cur.offset()];
        full.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    fn dcg_statement(&mut self, start: usize) -> Result<(), GrammarError> {
        let lhs = self.cur.term()?;
        self.cur.skip_ws();
        if !self.cur.eat_str("==>") {
            return Err(self.err_at(start, "expected `phon`, `relator`, `mode` or a `==>` rule".into()));
        }
        if matches!(&lhs, Term::Const(c) if self.lex.phon.contains(c)) {
            return Err(self.err_at(start, format!("the word `{lhs}` cannot be the left-hand side of a `==>` rule")));
        }
        let mut rhs = Vec::new();
        loop {
            self.cur.skip_ws();
            if self.cur.at_end() || self.cur.peek() == Some('.') {
                break;
            }
            let at = self.cur.offset();
            match self.cur.term()? {
                Term::Const(c) if self.lex.phon.contains(&c) => rhs.push(DcgItem::Word(c)),
                t => rhs.push(DcgItem::Nonterminal(t)),
            }
            if !at_item_end(&self.cur) {
                return Err(self.err_at(at, "items must be separated by whitespace".into()));
            }
        }
        self.finish_statement()?;
        let rule = DcgRule { lhs, rhs };
        let source = rule.to_string();
        self.lex.raw = true;
        self.push_relator(dcg_relator(&rule), start, source)
    }

    fn push_relator(&mut self, items: Vec<SchemeItem>, start: usize, source: String) -> Result<(), GrammarError> {
        let scheme = RelatorScheme { items, line: self.cur.position_of(start).0, source };
        check_metas(&scheme).map_err(|m| self.err_at(start, m))?;
        if scheme.is_commutator() {
            self.lex.commutative = true;
            self.lex.raw = true;
        }
        self.note_constants(&scheme.items, start);
        self.lex.relators.push(scheme);
        Ok(())
    }
}

/// Expression meta-variables must form properly nested conjugation pairs;
/// the commutator is the one permitted crossing shape.
fn check_metas(scheme: &RelatorScheme) -> Result<(), String> {
    let mut seen: BTreeMap<&Name, Vec<Sign>> = BTreeMap::new();
    for item in &scheme.items {
        if let SchemeItem::Meta(m, s) = item {
            seen.entry(m).or_default().push(*s);
        }
    }
    for (m, signs) in &seen {
        if signs.len() != 2 || signs[0] == signs[1] {
            return Err(format!(
                "expression meta-variable `@{m}` must occur exactly twice with opposite signs"
            ));
        }
    }
    if scheme.is_commutator() {
        return Ok(());
    }
    let mut open: Vec<&Name> = Vec::new();
    for item in &scheme.items {
        if let SchemeItem::Meta(m, _) = item {
            if open.last() == Some(&m) {
                open.pop();
            } else if open.contains(&m) {
                return Err(format!("conjugation pairs of `@{m}` and `@{}` cross", open.last().unwrap()));
            } else {
                open.push(m);
            }
        }
    }
    Ok(())
}

pub fn parse_grammar(text: &str) -> Result<Lexicon, GrammarErrors> {
    let cleaned = strip_comments(text);
    let mut reader = Reader {
        src: &cleaned,
        cur: Cursor::new(&cleaned),
        lex: Lexicon::default(),
        errors: Vec::new(),
        early_constants: BTreeMap::new(),
        terminated: false,
    };
    loop {
        reader.cur.skip_ws();
        if reader.cur.at_end() {
            break;
        }
        reader.terminated = false;
        if let Err(e) = reader.statement() {
            reader.errors.push(e);
            if !reader.terminated {
                reader.recover();
            }
        }
    }
    if reader.errors.is_empty() {
        Ok(reader.lex)
    } else {
        Err(GrammarErrors(reader.errors))
    }
}
