#![no_main]

use libfuzzer_sys::fuzz_target;
use rcl_core::numfield::{format_vector, parse_vector};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(v) = parse_vector(s) else { return };
    let back = parse_vector(&format_vector(&v)).expect("formatted vector parses");
    assert_eq!(back, v);
});
