#![no_main]

use bellsimplex::statefile::load_coefficients;
use bellsimplex::{classify, Label};
use libfuzzer_sys::fuzz_target;

// Anything that loads must classify without panicking.
fuzz_target!(|data: &[u8]| {
    if let Ok((c, _)) = load_coefficients(data) {
        if c.d() > 12 {
            return;
        }
        let record = classify(&c);
        assert!(record.realignment_value.is_finite());
        assert_eq!(record.is_ppt, record.label != Label::NptEntangled);
    }
});
