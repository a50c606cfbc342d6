//! Derivation traces.
//!
//! Text form, one record per line:
//!
//! ```text
//! direction generate
//! start s(j,l)
//! expand 0 r6 - {A_1=j, B_1=l}
//! end john saw louise
//! ```
//!
//! A step line is `kind path rule arg binding`: `path` is dot-separated,
//! `rule` is `r<n>` or `-`, `arg` is `-`, a number, or a bracketed
//! conjugator such as `[j saw]`. A `commutative` line after `direction`
//! enables swaps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::expr::parse_expr;
use super::{Derivation, DerivationStep, Direction, StepArg, StepKind};
use crate::freegroup::{parse_raw_word, SignedAtom};
use crate::term::{name, Binding, Cursor, Lambda, Name, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Json(String),
}

fn line_err(line: usize, message: impl Into<String>) -> TraceError {
    TraceError::Line { line, message: message.into() }
}

fn conjugator_text(c: &[SignedAtom]) -> String {
    let parts: Vec<String> = c.iter().map(|a| a.to_string()).collect();
    format!("[{}]", parts.join(" "))
}

impl fmt::Display for DerivationStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(|k| k.to_string()).collect();
        let path = if path.is_empty() { "-".to_string() } else { path.join(".") };
        let rule = self.rule.map_or("-".to_string(), |r| format!("r{r}"));
        let arg = match &self.arg {
            StepArg::None => "-".to_string(),
            StepArg::Index(k) => k.to_string(),
            StepArg::Conjugator(c) => conjugator_text(c),
        };
        write!(f, "{} {path} {rule} {arg} {}", self.kind.as_str(), self.binding)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "direction {}", self.direction.as_str())?;
        if self.commutative {
            writeln!(f, "commutative")?;
        }
        writeln!(f, "start {}", self.start)?;
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        writeln!(f, "end {}", self.end)
    }
}

fn parse_direction(s: &str) -> Option<Direction> {
    match s {
        "generate" => Some(Direction::Generate),
        "parse" => Some(Direction::Parse),
        "compute" => Some(Direction::Compute),
        _ => None,
    }
}

/// Parses `{A=j, P=\#x.s(#x,j)}`.
pub(crate) fn parse_binding(cur: &mut Cursor) -> Result<Binding, SyntaxError> {
    cur.expect('{')?;
    let mut b = Binding::new();
    cur.skip_ws();
    if cur.eat('}') {
        return Ok(b);
    }
    loop {
        cur.skip_ws();
        let Some(v) = cur.name() else { return Err(cur.error("expected a variable name")) };
        let v = name(v);
        cur.expect('=')?;
        if cur.eat('\\') {
            cur.expect('#')?;
            let Some(over) = cur.name() else { return Err(cur.error("expected an identifier")) };
            let over = name(over);
            cur.expect('.')?;
            let body = cur.term()?;
            b.insert_raw_abs(v, Lambda { over, body });
        } else {
            let t = cur.term()?;
            b.insert_raw_term(v, t);
        }
        cur.skip_ws();
        if cur.eat('}') {
            return Ok(b);
        }
        cur.expect(',')?;
    }
}

fn parse_step(text: &str, phon: &BTreeSet<Name>) -> Result<DerivationStep, String> {
    let mut parts = text.splitn(5, ' ');
    let mut next = |what: &str| parts.next().filter(|p| !p.is_empty()).ok_or(format!("missing {what}"));
    let kind_s = next("step kind")?;
    let kind = StepKind::ALL
        .into_iter()
        .find(|k| k.as_str() == kind_s)
        .ok_or(format!("unknown step kind `{kind_s}`"))?;
    let path_s = next("path")?;
    let path = if path_s == "-" {
        Vec::new()
    } else {
        path_s
            .split('.')
            .map(|p| p.parse::<usize>().map_err(|_| format!("bad path `{path_s}`")))
            .collect::<Result<_, _>>()?
    };
    let rule_s = next("rule")?;
    let rule = match rule_s {
        "-" => None,
        r => Some(
            r.strip_prefix('r')
                .and_then(|n| n.parse::<usize>().ok())
                .ok_or(format!("bad rule reference `{r}`"))?,
        ),
    };
    let rest = parts.next().ok_or("missing argument")?;
    let rest = format!("{rest}{}", parts.next().map(|p| format!(" {p}")).unwrap_or_default());
    let (arg, binding_text) = if let Some(inner) = rest.strip_prefix('[') {
        let close = inner.find(']').ok_or("unclosed conjugator")?;
        let atoms = parse_raw_word(&inner[..close], phon).map_err(|e| e.to_string())?;
        (StepArg::Conjugator(atoms), inner[close + 1..].trim_start().to_string())
    } else {
        let (a, b) = rest.split_once(' ').ok_or("missing binding")?;
        let arg = match a {
            "-" => StepArg::None,
            n => StepArg::Index(n.parse().map_err(|_| format!("bad argument `{n}`"))?),
        };
        (arg, b.to_string())
    };
    let mut cur = Cursor::new(&binding_text);
    let binding = parse_binding(&mut cur).map_err(|e| e.to_string())?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err("trailing input after binding".into());
    }
    Ok(DerivationStep { kind, path, rule, arg, binding })
}

impl Derivation {
    /// Parses the text trace format; constants in `phon` are read as words.
    pub fn from_text(text: &str, phon: &BTreeSet<Name>) -> Result<Derivation, TraceError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).peekable();
        let (n, first) = lines.next().ok_or_else(|| line_err(1, "empty trace"))?;
        let direction = first
            .strip_prefix("direction ")
            .and_then(|d| parse_direction(d.trim()))
            .ok_or_else(|| line_err(n + 1, "expected `direction generate|parse|compute`"))?;
        let mut commutative = false;
        if lines.peek().is_some_and(|(_, l)| l.trim() == "commutative") {
            lines.next();
            commutative = true;
        }
        let (n, start_line) = lines.next().ok_or_else(|| line_err(n + 2, "missing `start`"))?;
        let start_text = start_line.strip_prefix("start ").ok_or_else(|| line_err(n + 1, "expected `start`"))?;
        let start = parse_expr(start_text, phon).map_err(|e| line_err(n + 1, e.to_string()))?;
        let mut steps = Vec::new();
        for (n, line) in lines {
            if let Some(end_text) = line.strip_prefix("end ") {
                let end = parse_expr(end_text, phon).map_err(|e| line_err(n + 1, e.to_string()))?;
                return Ok(Derivation { direction, commutative, start, steps, end });
            }
            steps.push(parse_step(line.trim_end(), phon).map_err(|m| line_err(n + 1, m))?);
        }
        Err(line_err(text.lines().count(), "missing `end`"))
    }

    pub fn to_json(&self) -> DerivationJson {
        DerivationJson::from(self)
    }

    pub fn from_json(json: &DerivationJson, phon: &BTreeSet<Name>) -> Result<Derivation, TraceError> {
        let e = |m: String| TraceError::Json(m);
        let start = parse_expr(&json.start, phon).map_err(|x| e(format!("start: {x}")))?;
        let end = parse_expr(&json.end, phon).map_err(|x| e(format!("end: {x}")))?;
        let mut steps = Vec::new();
        for (k, s) in json.steps.iter().enumerate() {
            let arg = match (&s.index, &s.conjugator) {
                (None, None) => StepArg::None,
                (Some(i), None) => StepArg::Index(*i),
                (None, Some(c)) => StepArg::Conjugator(
                    parse_raw_word(c, phon).map_err(|x| e(format!("step {k}: conjugator: {x}")))?,
                ),
                _ => return Err(e(format!("step {k}: both index and conjugator given"))),
            };
            let mut binding = Binding::new();
            for (v, t) in &s.terms {
                let t = t.parse().map_err(|x| e(format!("step {k}: {v}: {x}")))?;
                binding.insert_raw_term(name(v), t);
            }
            for (p, l) in &s.abstractions {
                let body = l.body.parse().map_err(|x| e(format!("step {k}: {p}: {x}")))?;
                let over = l.over.strip_prefix('#').unwrap_or(&l.over);
                binding.insert_raw_abs(name(p), Lambda { over: name(over), body });
            }
            steps.push(DerivationStep { kind: s.kind, path: s.path.clone(), rule: s.rule, arg, binding });
        }
        Ok(Derivation { direction: json.direction, commutative: json.commutative, start, steps, end })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaJson {
    pub over: String,
    pub body: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub kind: StepKind,
    pub path: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<String>,
    #[serde(default)]
    pub terms: BTreeMap<String, String>,
    #[serde(default)]
    pub abstractions: BTreeMap<String, LambdaJson>,
}

/// Machine-readable form of a derivation, with terms and expressions as
/// strings in the text syntax.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationJson {
    pub direction: Direction,
    #[serde(default)]
    pub commutative: bool,
    pub start: String,
    pub steps: Vec<StepJson>,
    pub end: String,
}

impl From<&Derivation> for DerivationJson {
    fn from(d: &Derivation) -> Self {
        let steps = d
            .steps
            .iter()
            .map(|s| StepJson {
                kind: s.kind,
                path: s.path.clone(),
                rule: s.rule,
                index: match s.arg {
                    StepArg::Index(i) => Some(i),
                    _ => None,
                },
                conjugator: match &s.arg {
                    StepArg::Conjugator(c) => {
                        Some(c.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "))
                    }
                    _ => None,
                },
                terms: s.binding.terms().map(|(v, t)| (v.to_string(), t.to_string())).collect(),
                abstractions: s
                    .binding
                    .abstractions()
                    .map(|(p, l)| (p.to_string(), LambdaJson { over: format!("#{}", l.over), body: l.body.to_string() }))
                    .collect(),
            })
            .collect();
        DerivationJson {
            direction: d.direction,
            commutative: d.commutative,
            start: d.start.to_string(),
            steps,
            end: d.end.to_string(),
        }
    }
}
