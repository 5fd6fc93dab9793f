#![no_main]

use libfuzzer_sys::fuzz_target;
use paycomm_core::parse::{parse_k_range, MAX_K};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(ks) = parse_k_range(s) {
        assert!(!ks.is_empty());
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
        assert!(ks.iter().all(|k| (1..=MAX_K).contains(k)));
    }
});
