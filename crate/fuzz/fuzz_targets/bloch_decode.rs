#![no_main]

use bellsimplex::detection::{bloch_from_coefficients, coefficients_from_bloch, BlochMatrix};
use libfuzzer_sys::fuzz_target;
use num_complex::Complex64;

// First byte picks d in 2..=9, the rest is read as little-endian (re, im) pairs.
fuzz_target!(|data: &[u8]| {
    let Some((&head, rest)) = data.split_first() else {
        return;
    };
    let d = 2 + (head % 8) as usize;
    let floats: Vec<f64> = rest
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    if floats.len() < 2 * d * d {
        return;
    }
    let entries: Vec<Complex64> = floats
        .chunks_exact(2)
        .take(d * d)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    let Ok(b) = BlochMatrix::from_entries(d, entries) else {
        return;
    };
    if let Ok(c) = coefficients_from_bloch(&b) {
        let back = bloch_from_coefficients(&c);
        for (x, y) in back.entries().iter().zip(b.entries()) {
            assert!((x - y).norm() < 1e-6);
        }
    }
});
