//! Generate the demo inputs: a synthetic cartoon+texture image, a mask with
//! both random missing pixels and a few solid holes, and the masked image
//! with the holes painted white.
//!
//! Usage: `cargo run -p cartex-cli --example make_demo_inputs -- <outdir> [seed]`

use cartex::imgio::{write_image, write_mask};
use cartex::{ImageGrid, MaskGrid};

/// Small deterministic generator so the example needs no RNG crate.
struct Lcg(u64);

impl Lcg {
    fn next_unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn main() {
    let mut args = std::env::args().skip(1);
    let outdir = args.next().unwrap_or_else(|| "demo".to_string());
    let seed: u64 = args.next().map(|s| s.parse().expect("seed must be an integer")).unwrap_or(42);
    std::fs::create_dir_all(&outdir).expect("create output directory");

    let size = 128usize;
    let b = 32.0_f64;
    let image = ImageGrid::from_fn(size, size, |r, c| {
        // Piecewise-smooth background: two flat regions and a soft ramp.
        let cartoon = if r + c < size {
            0.25
        } else if c > 3 * size / 4 {
            0.75
        } else {
            0.45 + 0.2 * (r as f64 / size as f64)
        };
        // Oscillatory foreground tied to one DCT atom per block.
        let i = (r % 32) as f64;
        let j = (c % 32) as f64;
        let texture = 0.15
            * (std::f64::consts::PI * (2.0 * i + 1.0) * 5.0 / (2.0 * b)).cos()
            * (std::f64::consts::PI * (2.0 * j + 1.0) * 9.0 / (2.0 * b)).cos();
        (cartoon + texture).clamp(0.0, 1.0)
    });

    let mut rng = Lcg(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));
    let holes: [(usize, usize, usize); 3] = [(20, 30, 9), (70, 80, 12), (96, 26, 7)];
    let mut bits = Vec::with_capacity(size * size);
    for r in 0..size {
        for c in 0..size {
            let in_hole = holes
                .iter()
                .any(|&(hr, hc, rad)| r.abs_diff(hr).pow(2) + c.abs_diff(hc).pow(2) <= rad * rad);
            let missing = in_hole || rng.next_unit() < 0.15;
            bits.push(u8::from(!missing));
        }
    }
    let mask = MaskGrid::new(size, size, bits).unwrap();

    // The degraded input: holes shown white, like scratched film.
    let damaged = ImageGrid::from_fn(size, size, |r, c| {
        if mask.is_known(r * size + c) {
            image.get(r, c)
        } else {
            1.0
        }
    });

    let path = |name: &str| format!("{outdir}/{name}");
    write_image(&image, path("truth.pgm")).expect("write truth");
    write_image(&damaged, path("damaged.pgm")).expect("write damaged");
    write_mask(&mask, path("mask.pgm")).expect("write mask");
    println!(
        "wrote {} ({}x{}, {} missing pixels)",
        path("truth.pgm"),
        size,
        size,
        mask.len() - mask.known_count()
    );
    println!("wrote {}", path("damaged.pgm"));
    println!("wrote {}", path("mask.pgm"));
}
