#![no_main]

use ggroup::term::Term;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(t) = s.parse::<Term>() {
            let again: Term = t.to_string().parse().expect("rendering re-parses");
            assert_eq!(again, t);
        }
    }
});
