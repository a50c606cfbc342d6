//! Bidirectional grammars over free groups.
//!
//! A grammar is a set of relators: products of logical forms, words and
//! their inverses. Generation and parsing are both rewriting in the
//! preorder the relators induce, so one lexicon serves both directions.
//!
//! ```
//! use ggroup::engine::{generate, parse, Grammar, SearchLimits};
//!
//! let g = Grammar::from_source(ggroup::ENGLISH).unwrap();
//! let lim = SearchLimits::default();
//! let out = generate(&g, &"s(j,l)".parse().unwrap(), &lim).unwrap();
//! assert_eq!(out.results[0].value.join(" "), "john saw louise");
//!
//! let words: Vec<_> = "john ran".split(' ').map(ggroup::term::name).collect();
//! let out = parse(&g, &words, &lim).unwrap();
//! assert_eq!(out.results[0].value.to_string(), "r(j)");
//! ```

pub mod analysis;
pub mod cli;
pub mod encodings;
pub mod engine;
pub mod freegroup;
pub mod lexicon;
pub mod term;

/// The bundled English fragment.
pub const ENGLISH: &str = include_str!("../grammars/english.gg");
