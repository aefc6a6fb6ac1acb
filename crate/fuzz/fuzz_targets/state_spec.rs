#![no_main]
use libfuzzer_sys::fuzz_target;
use qphase_core::parse::{parse_state_spec, StateSpec};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        // amps: would touch the filesystem, so only the in-memory kinds are built
        if let Ok(spec) = parse_state_spec(s) {
            if !matches!(spec, StateSpec::Amps(_)) {
                let _ = spec.materialize(7);
            }
        }
    }
});
