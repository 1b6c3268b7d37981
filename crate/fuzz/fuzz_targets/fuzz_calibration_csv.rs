//! Calibration CSV hardening: arbitrary text must either parse into
//! finite sample pairs or return a line-numbered error, never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rows) = ehd_ring::csv::parse_calibration_csv(text) {
            for (v, value) in &rows {
                assert!(v.is_finite() && value.is_finite(), "parser let a non-finite number through");
            }
        }
    }
});
