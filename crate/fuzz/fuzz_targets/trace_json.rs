#![no_main]

use ggroup::engine::{replay, Derivation, DerivationJson, Grammar};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let g = Grammar::from_source(ggroup::ENGLISH).expect("bundled grammar loads");
        if let Ok(json) = serde_json::from_str::<DerivationJson>(s) {
            if let Ok(d) = Derivation::from_json(&json, g.phon()) {
                let _ = replay(&g, &d);
            }
        }
    }
});
