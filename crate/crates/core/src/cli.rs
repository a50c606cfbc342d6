//! Command-line front end.
//!
//! Exit status: 0 success, 1 no result (or a failed check / mismatch),
//! 2 input error, 3 search truncated by a limit, 4 a derivation failed its
//! own replay.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis::reversibility_report;
use crate::encodings::{encode_logic_program, forward_chain, parse_program};
use crate::engine::{
    generate, is_public, parse, replay, saturate, Derivation, DerivationJson, EngineError, Found, Grammar,
    SearchLimits, SearchOutcome,
};
use crate::freegroup::{parse_raw_word, reduce};
use crate::lexicon::parse_grammar;
use crate::term::{name, Name, Term};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_RESULT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TRUNCATED: i32 = 3;
pub const EXIT_UNVERIFIED: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "ggroup", version, about = "Generate and parse with group-based grammars")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verbalize a ground logical form.
    Generate {
        grammar: PathBuf,
        term: String,
        #[command(flatten)]
        opts: SearchOpts,
    },
    /// Find the logical forms of a sentence.
    Parse {
        grammar: PathBuf,
        sentence: String,
        #[command(flatten)]
        opts: SearchOpts,
    },
    /// Report whether generation and parsing are guaranteed to terminate.
    Check {
        grammar: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Reduce a word of the free group.
    Reduce {
        word: String,
        /// Grammar whose `phon` declaration tells words from logical forms.
        #[arg(long)]
        grammar: Option<PathBuf>,
    },
    /// Compare the consequences of a logic program found by saturation with
    /// those of bottom-up evaluation.
    Logic {
        program: PathBuf,
        /// Rounds of bottom-up evaluation.
        #[arg(long, default_value_t = 32)]
        bound: usize,
        #[command(flatten)]
        opts: SearchOpts,
    },
    /// Check a derivation trace (text or JSON) against a grammar.
    Replay { grammar: PathBuf, trace: PathBuf },
}

#[derive(Args, Debug, Clone)]
pub struct SearchOpts {
    #[arg(long, default_value_t = SearchLimits::default().max_expansions)]
    pub max_expansions: usize,
    #[arg(long, default_value_t = SearchLimits::default().max_items)]
    pub max_items: usize,
    #[arg(long, default_value_t = SearchLimits::default().max_results)]
    pub max_results: usize,
    #[arg(long, default_value_t = SearchLimits::default().max_states)]
    pub max_states: usize,
    #[arg(long, value_enum, default_value_t = TraceMode::Off)]
    pub trace: TraceMode,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Allow any two adjacent items to be swapped.
    #[arg(long)]
    pub commutative: bool,
    /// Let `P[x]` match forms in which `x` does not occur.
    #[arg(long)]
    pub allow_vacuous: bool,
}

impl SearchOpts {
    pub fn limits(&self) -> Result<SearchLimits, String> {
        let lim = SearchLimits {
            max_expansions: self.max_expansions,
            max_items: self.max_items,
            max_results: self.max_results,
            max_states: self.max_states,
            allow_vacuous_abstraction: self.allow_vacuous,
            commutative: self.commutative,
        };
        if lim.max_expansions == 0 || lim.max_items == 0 || lim.max_results == 0 || lim.max_states == 0 {
            return Err("limits must be positive".into());
        }
        Ok(lim)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TraceMode {
    Off,
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Parses arguments, runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if code == 0 { EXIT_OK } else { EXIT_INPUT };
        }
    };
    match execute(&cli.command, out, err) {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

struct Failure(i32, String);

fn input(message: impl Into<String>) -> Failure {
    Failure(EXIT_INPUT, message.into())
}

fn io(e: std::io::Error) -> Failure {
    Failure(EXIT_INPUT, e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_grammar(path: &Path) -> Result<Grammar, Failure> {
    let text = read(path)?;
    let lex = parse_grammar(&text).map_err(|errs| {
        let lines: Vec<String> = errs.0.iter().map(|e| format!("{}:{e}", path.display())).collect();
        input(lines.join("\n"))
    })?;
    Grammar::new(lex).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn engine_err(e: EngineError) -> Failure {
    input(e.to_string())
}

fn execute(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Generate { grammar, term, opts } => {
            let g = load_grammar(grammar)?;
            warn(&g.gen_skipped, err)?;
            let lim = opts.limits().map_err(input)?;
            let lf: Term = term.parse().map_err(|e| input(format!("input:{e}")))?;
            let outcome = generate(&g, &lf, &lim).map_err(engine_err)?;
            report(&g, &outcome, opts, out, err, |w: &Vec<Name>| w.join(" "))
        }
        Command::Parse { grammar, sentence, opts } => {
            let g = load_grammar(grammar)?;
            warn(&g.parse_skipped, err)?;
            let lim = opts.limits().map_err(input)?;
            let words: Vec<Name> = sentence.split_whitespace().map(name).collect();
            let outcome = parse(&g, &words, &lim).map_err(engine_err)?;
            report(&g, &outcome, opts, out, err, |t: &Term| t.to_string())
        }
        Command::Check { grammar, format } => {
            let g = load_grammar(grammar)?;
            let rep = reversibility_report(&g.lexicon).map_err(|e| input(e.to_string()))?;
            match format {
                Format::Text => write!(out, "{rep}").map_err(io)?,
                Format::Json => writeln!(out, "{}", to_json(&rep)).map_err(io)?,
            }
            Ok(if rep.reversible() { EXIT_OK } else { EXIT_NO_RESULT })
        }
        Command::Reduce { word, grammar } => {
            let phon = match grammar {
                Some(p) => load_grammar(p)?.lexicon.phon,
                None => BTreeSet::new(),
            };
            let raw = parse_raw_word(word, &phon).map_err(|e| input(format!("input:{e}")))?;
            writeln!(out, "{}", reduce(raw)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Logic { program, bound, opts } => logic(program, *bound, opts, out, err),
        Command::Replay { grammar, trace } => {
            let g = load_grammar(grammar)?;
            let text = read(trace)?;
            let d = if text.trim_start().starts_with('{') {
                let json: DerivationJson =
                    serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", trace.display())))?;
                Derivation::from_json(&json, g.phon())
            } else {
                Derivation::from_text(&text, g.phon())
            }
            .map_err(|e| input(format!("{}: {e}", trace.display())))?;
            match replay(&g, &d) {
                Ok(end) => {
                    writeln!(out, "ok: {} steps, end {end}", d.steps.len()).map_err(io)?;
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    writeln!(out, "invalid: {e}").map_err(io)?;
                    Ok(EXIT_NO_RESULT)
                }
            }
        }
    }
}

fn warn(skipped: &[String], err: &mut dyn Write) -> Result<(), Failure> {
    for w in skipped {
        writeln!(err, "warning: {w}").map_err(io)?;
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).unwrap_or_default()
}

/// Replays a derivation and checks that it ends in a public result.
fn verify(g: &Grammar, d: &Derivation) -> Result<(), Failure> {
    replay(g, d).map_err(|e| Failure(EXIT_UNVERIFIED, format!("derivation failed replay: {e}")))?;
    let public = d.public_expr().and_then(|e| is_public(&g.lexicon, &e));
    if public.is_none() {
        return Err(Failure(EXIT_UNVERIFIED, "derivation does not end in a public result".into()));
    }
    Ok(())
}

fn report<T>(
    g: &Grammar,
    outcome: &SearchOutcome<T>,
    opts: &SearchOpts,
    out: &mut dyn Write,
    err: &mut dyn Write,
    show: impl Fn(&T) -> String,
) -> Result<i32, Failure> {
    if opts.trace != TraceMode::Off {
        for f in &outcome.results {
            verify(g, &f.derivation)?;
        }
    }
    match opts.format {
        Format::Text => {
            for Found { value, derivation } in &outcome.results {
                writeln!(out, "{}", show(value)).map_err(io)?;
                match opts.trace {
                    TraceMode::Off => {}
                    TraceMode::Text => {
                        for line in derivation.to_string().lines() {
                            writeln!(out, "  {line}").map_err(io)?;
                        }
                    }
                    TraceMode::Json => {
                        let j = serde_json::to_string(&derivation.to_json()).unwrap_or_default();
                        writeln!(out, "  {j}").map_err(io)?;
                    }
                }
            }
        }
        Format::Json => {
            let results: Vec<_> = outcome
                .results
                .iter()
                .map(|f| {
                    let mut r = json!({ "value": show(&f.value) });
                    match opts.trace {
                        TraceMode::Off => {}
                        TraceMode::Text => r["derivation"] = json!(f.derivation.to_string()),
                        TraceMode::Json => r["derivation"] = json!(f.derivation.to_json()),
                    }
                    r
                })
                .collect();
            let doc = json!({ "results": results, "truncated": outcome.truncated, "states": outcome.states });
            writeln!(out, "{}", to_json(&doc)).map_err(io)?;
        }
    }
    if outcome.truncated {
        writeln!(err, "note: search truncated by a limit after {} states; results may be incomplete", outcome.states)
            .map_err(io)?;
        return Ok(EXIT_TRUNCATED);
    }
    Ok(if outcome.results.is_empty() { EXIT_NO_RESULT } else { EXIT_OK })
}

fn logic(program: &Path, bound: usize, opts: &SearchOpts, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let text = read(program)?;
    let clauses = parse_program(&text).map_err(|errs| {
        let lines: Vec<String> = errs.0.iter().map(|e| format!("{}:{e}", program.display())).collect();
        input(lines.join("\n"))
    })?;
    let lim = opts.limits().map_err(input)?;
    let g = Grammar::new(encode_logic_program(&clauses)).map_err(|e| input(e.to_string()))?;
    let outcome = saturate(&g, &lim);
    if opts.trace != TraceMode::Off {
        for f in &outcome.results {
            replay(&g, &f.derivation)
                .map_err(|e| Failure(EXIT_UNVERIFIED, format!("derivation failed replay: {e}")))?;
        }
    }
    let engine: BTreeSet<Term> = outcome.results.iter().map(|f| f.value.clone()).collect();
    let oracle = forward_chain(&clauses, bound);
    let verdict = if engine == oracle.facts { "MATCH" } else { "DIFFER" };
    let show = |s: &BTreeSet<Term>| s.iter().map(|t| t.to_string()).collect::<Vec<_>>();
    match opts.format {
        Format::Text => {
            writeln!(out, "engine: {}", show(&engine).join(" ")).map_err(io)?;
            writeln!(out, "oracle: {}", show(&oracle.facts).join(" ")).map_err(io)?;
            writeln!(out, "{verdict} ({} facts)", engine.len().max(oracle.facts.len())).map_err(io)?;
            if opts.trace == TraceMode::Text {
                for f in &outcome.results {
                    writeln!(out, "{}:", f.value).map_err(io)?;
                    for line in f.derivation.to_string().lines() {
                        writeln!(out, "  {line}").map_err(io)?;
                    }
                }
            } else if opts.trace == TraceMode::Json {
                for f in &outcome.results {
                    writeln!(out, "{}", serde_json::to_string(&f.derivation.to_json()).unwrap_or_default())
                        .map_err(io)?;
                }
            }
        }
        Format::Json => {
            let doc = json!({
                "engine": show(&engine),
                "oracle": show(&oracle.facts),
                "verdict": verdict,
                "engine_truncated": outcome.truncated,
                "oracle_saturated": oracle.saturated,
            });
            writeln!(out, "{}", to_json(&doc)).map_err(io)?;
        }
    }
    if outcome.truncated || !oracle.saturated {
        writeln!(err, "note: consequence set not exhausted within the limits").map_err(io)?;
        return Ok(EXIT_TRUNCATED);
    }
    Ok(if verdict == "MATCH" { EXIT_OK } else { EXIT_NO_RESULT })
}
