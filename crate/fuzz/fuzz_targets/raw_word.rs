#![no_main]

use std::collections::BTreeSet;

use ggroup::freegroup::{parse_raw_word, reduce};
use ggroup::term::name;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let phon: BTreeSet<_> = ["a", "b", "john"].into_iter().map(name).collect();
        if let Ok(w) = parse_raw_word(s, &phon) {
            let _ = reduce(w);
        }
    }
});
