#![no_main]
use libfuzzer_sys::fuzz_target;
use qphase_core::parse::parse_hamiltonian;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(h) = parse_hamiltonian(s) {
            let _ = h.eval(3.0);
        }
    }
});
