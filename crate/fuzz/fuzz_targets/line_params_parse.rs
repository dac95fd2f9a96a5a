#![no_main]

use libfuzzer_sys::fuzz_target;
use rcl_core::lineseq::LineParams;

fuzz_target!(|data: (&str, &str, u64)| {
    let (beta, gamma, m) = data;
    if let Ok(lp) = LineParams::parse(beta, gamma, m) {
        assert_eq!(lp.m, m);
    }
});
