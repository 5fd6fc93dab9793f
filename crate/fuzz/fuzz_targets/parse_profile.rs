#![no_main]

use libfuzzer_sys::fuzz_target;
use paycomm_core::parse::{format_profile, parse_profile};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_profile(s) {
        assert!(!p.is_empty());
        assert_eq!(parse_profile(&format_profile(&p)).expect("printed profiles parse"), p);
    }
});
