#![no_main]

use bellsimplex::statefile::parse_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(file) = parse_json(text) {
        if let Ok(c) = file.to_coefficients() {
            let sum: f64 = c.as_slice().iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
            assert!(c.as_slice().iter().all(|v| *v >= 0.0));
        }
    }
});
