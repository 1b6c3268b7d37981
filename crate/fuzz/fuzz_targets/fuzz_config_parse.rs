//! Config parser hardening: arbitrary text must either parse or return
//! a line-numbered error, never panic. Anything that parses must
//! serialize to a stable fixpoint (byte equality is too strong once a
//! value like NaN is in play, so the check is save -> parse -> save).

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = ehd_ring::parse_config(text) {
            let saved = ehd_ring::save_config(&cfg);
            let reparsed = ehd_ring::parse_config(&saved)
                .expect("a saved config must always re-parse");
            assert_eq!(
                saved,
                ehd_ring::save_config(&reparsed),
                "save/parse did not reach a fixpoint"
            );
        }
    }
});
