#![no_main]

use libfuzzer_sys::fuzz_target;
use rcl_core::certify::{compute_certificate, ConfigurationX};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(x) = ConfigurationX::from_json_str(s) else { return };
    let again = ConfigurationX::from_json_str(&x.to_json_string()).expect("serialized config parses");
    assert_eq!(again, x);
    // Keep linear algebra cheap enough for the fuzzer.
    if x.len() <= 8 && x.dimension() <= 4 {
        let _ = compute_certificate(&x);
    }
});
