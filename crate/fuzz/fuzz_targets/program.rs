#![no_main]

use ggroup::encodings::{encode_logic_program, forward_chain, parse_program};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(clauses) = parse_program(s) {
            let _ = encode_logic_program(&clauses);
            let _ = forward_chain(&clauses, 4);
        }
    }
});
