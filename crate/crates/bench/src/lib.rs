//! Shared fixtures for the benchmark targets.

use cartex::{ImageGrid, MaskGrid};

/// Step-plus-blockwise-sinusoid image, the same shape the solvers see in
/// the acceptance fixtures.
pub fn synthetic_image(size: usize) -> ImageGrid {
    let b = 32.0_f64;
    ImageGrid::from_fn(size, size, |r, c| {
        let cartoon = if c < size / 3 { 0.2 } else { 0.8 };
        let i = (r % 32) as f64;
        let j = (c % 32) as f64;
        let texture = 0.18
            * (std::f64::consts::PI * (2.0 * i + 1.0) * 4.0 / (2.0 * b)).cos()
            * (std::f64::consts::PI * (2.0 * j + 1.0) * 7.0 / (2.0 * b)).cos();
        cartoon + texture
    })
}

/// Deterministic ~20%-missing mask (small multiplicative generator, no RNG
/// dependency).
pub fn synthetic_mask(size: usize) -> MaskGrid {
    let mut state = 0x2545f49_u64;
    let bits: Vec<u8> = (0..size * size)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            u8::from((state >> 33) % 5 != 0)
        })
        .collect();
    MaskGrid::new(size, size, bits).unwrap()
}
