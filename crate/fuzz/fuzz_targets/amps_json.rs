#![no_main]
use libfuzzer_sys::fuzz_target;
use qphase_core::parse::parse_amps_json;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = parse_amps_json(s);
    }
});
