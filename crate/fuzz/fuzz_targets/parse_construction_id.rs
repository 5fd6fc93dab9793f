#![no_main]

use libfuzzer_sys::fuzz_target;
use paycomm_core::constructions::ConstructionId;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(id) = s.parse::<ConstructionId>() {
        assert!(id.kind.supports(id.k));
        assert_eq!(id.to_string().parse::<ConstructionId>().expect("printed ids parse"), id);
    }
});
