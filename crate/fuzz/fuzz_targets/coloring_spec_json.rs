#![no_main]

use libfuzzer_sys::fuzz_target;
use rcl_core::spec_builder::ColoringSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(spec) = ColoringSpec::from_json_str(s) else { return };
    let again = ColoringSpec::from_json_str(&spec.to_json_string()).expect("serialized spec parses");
    assert_eq!(again, spec);
    let _ = spec.validate();
});
