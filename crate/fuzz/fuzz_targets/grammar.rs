#![no_main]

use ggroup::lexicon::parse_grammar;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(lex) = parse_grammar(s) {
            let again = parse_grammar(&lex.to_string()).expect("rendering re-parses");
            assert_eq!(again.relators, lex.relators);
        }
    }
});
