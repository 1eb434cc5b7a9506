#![no_main]

use bellsimplex::statefile::parse_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(file) = parse_csv(text) {
        if let Ok(c) = file.to_coefficients() {
            assert_eq!(c.d(), file.d);
            assert!(c.as_slice().iter().all(|v| v.is_finite() && *v >= 0.0));
        }
    }
});
