#![no_main]

use libfuzzer_sys::fuzz_target;
use rcl_core::FieldElement;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(x) = s.parse::<FieldElement>() else { return };
    // Display output must parse back to the same element.
    let back: FieldElement = x.to_string().parse().expect("display round-trips");
    assert_eq!(back, x);
    let _ = x.signum();
});
