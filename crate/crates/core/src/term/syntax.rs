use std::fmt;

use thiserror::Error;

use super::{name, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// Character cursor shared by every textual format in the crate.
#[derive(Clone, Debug)]
pub struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn offset(&self) -> usize {
        self.pos
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn peek_second(&self) -> Option<char> {
        let mut it = self.rest().chars();
        it.next();
        it.next()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    /// Skips spaces and tabs but stops at a newline.
    pub fn skip_blanks(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r')) {
            self.bump();
        }
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    pub fn name(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        (self.pos > start).then(|| &self.src[start..self.pos])
    }

    pub fn position_of(&self, offset: usize) -> (usize, usize) {
        let before = &self.src[..offset.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    }

    pub fn error(&self, message: &str) -> SyntaxError {
        self.error_at(self.pos, message)
    }

    pub fn error_at(&self, offset: usize, message: &str) -> SyntaxError {
        let (line, column) = self.position_of(offset);
        SyntaxError {
            line,
            column,
            message: message.to_string(),
        }
    }

    /// Parses one term starting at the cursor.
    pub fn term(&mut self) -> Result<Term, SyntaxError> {
        let start = self.pos;
        match self.peek() {
            Some('#') => {
                self.bump();
                match self.name() {
                    Some(n) => Ok(Term::Ident(name(n))),
                    None => Err(self.error("expected identifier name after `#`")),
                }
            }
            Some(c) if c.is_ascii_uppercase() => {
                let n = self.name().unwrap_or_default();
                if self.eat('[') {
                    self.skip_ws();
                    let arg = self.term()?;
                    if !matches!(arg, Term::Ident(_) | Term::Var(_)) {
                        return Err(self.error_at(
                            start,
                            "abstraction argument must be an identifier or a meta-variable",
                        ));
                    }
                    self.skip_ws();
                    self.expect(']')?;
                    Ok(Term::App(name(n), Box::new(arg)))
                } else {
                    Ok(Term::Var(name(n)))
                }
            }
            Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() => {
                let n = self.name().unwrap_or_default();
                if self.eat('(') {
                    let mut args = Vec::new();
                    loop {
                        self.skip_ws();
                        args.push(self.term()?);
                        self.skip_ws();
                        if self.eat(',') {
                            continue;
                        }
                        self.expect(')')?;
                        break;
                    }
                    Ok(Term::Compound(name(n), args))
                } else {
                    Ok(Term::Const(name(n)))
                }
            }
            Some(c) => Err(self.error(&format!("unexpected `{c}` where a term was expected"))),
            None => Err(self.error("unexpected end of input where a term was expected")),
        }
    }
}
