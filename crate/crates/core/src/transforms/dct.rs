//! Blockwise 2-D orthonormal DCT dictionary.
//!
//! The image is tiled into non-overlapping `block x block` squares; each
//! square gets a separable orthonormal type-II DCT. Coefficients are laid
//! out block-by-block in row-major block order, and row-major frequency
//! order (vertical frequency u, then horizontal frequency v) inside a block.
//! Per block the transform matrix is orthogonal, so the whole dictionary is
//! square and orthonormal: synthesis is the exact transpose of analysis.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::imgio::ImageGrid;
use crate::operators::{check_len, Dictionary};

/// Row-major `b x b` orthonormal DCT-II matrix:
/// `T[u][i] = alpha(u) cos(pi (2i+1) u / 2b)`.
fn dct_matrix(b: usize) -> Vec<f64> {
    let mut t = vec![0.0; b * b];
    let norm0 = (1.0 / b as f64).sqrt();
    let norm = (2.0 / b as f64).sqrt();
    for u in 0..b {
        let alpha = if u == 0 { norm0 } else { norm };
        for i in 0..b {
            t[u * b + i] = alpha * (PI * (2 * i + 1) as f64 * u as f64 / (2.0 * b as f64)).cos();
        }
    }
    t
}

/// Texture dictionary: per-block orthonormal 2-D DCT over a fixed image shape.
#[derive(Debug, Clone)]
pub struct BlockDctDictionary {
    height: usize,
    width: usize,
    block: usize,
    basis: Vec<f64>,
}

impl BlockDctDictionary {
    pub fn new(height: usize, width: usize, block: usize) -> Result<Self> {
        if block == 0 {
            return Err(Error::parameter("block size must be positive"));
        }
        if height == 0 || width == 0 {
            return Err(Error::dimension("image shape must be non-empty"));
        }
        if height % block != 0 || width % block != 0 {
            return Err(Error::dimension(format!(
                "image {height}x{width} is not divisible by block size {block}"
            )));
        }
        Ok(BlockDctDictionary { height, width, block, basis: dct_matrix(block) })
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    /// Analysis of one block held in `scratch` (row-major `b x b`):
    /// `C = T X T^t` via two passes.
    fn analyze_block(&self, x: &[f64], out: &mut [f64], tmp: &mut [f64]) {
        let b = self.block;
        let t = &self.basis;
        // tmp = T X
        for u in 0..b {
            for j in 0..b {
                let mut acc = 0.0;
                for i in 0..b {
                    acc += t[u * b + i] * x[i * b + j];
                }
                tmp[u * b + j] = acc;
            }
        }
        // out = tmp T^t
        for u in 0..b {
            for v in 0..b {
                let mut acc = 0.0;
                for j in 0..b {
                    acc += tmp[u * b + j] * t[v * b + j];
                }
                out[u * b + v] = acc;
            }
        }
    }

    /// Synthesis of one block: `X = T^t C T`.
    fn synthesize_block(&self, c: &[f64], out: &mut [f64], tmp: &mut [f64]) {
        let b = self.block;
        let t = &self.basis;
        // tmp = T^t C
        for i in 0..b {
            for v in 0..b {
                let mut acc = 0.0;
                for u in 0..b {
                    acc += t[u * b + i] * c[u * b + v];
                }
                tmp[i * b + v] = acc;
            }
        }
        // out = tmp T
        for i in 0..b {
            for j in 0..b {
                let mut acc = 0.0;
                for v in 0..b {
                    acc += tmp[i * b + v] * t[v * b + j];
                }
                out[i * b + j] = acc;
            }
        }
    }

    fn for_each_block(
        &self,
        input: &[f64],
        output: &mut [f64],
        mut apply: impl FnMut(&Self, &[f64], &mut [f64], &mut [f64]),
    ) {
        let b = self.block;
        let w = self.width;
        let mut cell_in = vec![0.0; b * b];
        let mut cell_out = vec![0.0; b * b];
        let mut tmp = vec![0.0; b * b];
        for br in 0..self.height / b {
            for bc in 0..w / b {
                let base = br * b * w + bc * b;
                for r in 0..b {
                    cell_in[r * b..(r + 1) * b]
                        .copy_from_slice(&input[base + r * w..base + r * w + b]);
                }
                apply(self, &cell_in, &mut cell_out, &mut tmp);
                for r in 0..b {
                    output[base + r * w..base + r * w + b]
                        .copy_from_slice(&cell_out[r * b..(r + 1) * b]);
                }
            }
        }
    }
}

impl Dictionary for BlockDctDictionary {
    fn n_pixels(&self) -> usize {
        self.height * self.width
    }

    fn n_coeffs(&self) -> usize {
        self.height * self.width
    }

    fn forward(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        check_len("block-dct coefficients", coeffs.len(), self.n_coeffs())?;
        let mut out = vec![0.0; self.n_pixels()];
        self.for_each_block(coeffs, &mut out, Self::synthesize_block);
        Ok(out)
    }

    fn adjoint(&self, image: &[f64]) -> Result<Vec<f64>> {
        check_len("block-dct image", image.len(), self.n_pixels())?;
        let mut out = vec![0.0; self.n_coeffs()];
        self.for_each_block(image, &mut out, Self::analyze_block);
        Ok(out)
    }

    fn is_tight_frame(&self) -> bool {
        true
    }
}

/// Per-block 2-D DCT coefficients of an image.
pub fn block_dct_analyze(img: &ImageGrid, block: usize) -> Result<Vec<f64>> {
    let dict = BlockDctDictionary::new(img.height(), img.width(), block)?;
    dict.adjoint(img.pixels())
}

/// Inverse of [`block_dct_analyze`]; this is the dictionary forward map.
pub fn block_dct_synthesize(s: &[f64], block: usize, shape: (usize, usize)) -> Result<ImageGrid> {
    let dict = BlockDctDictionary::new(shape.0, shape.1, block)?;
    let pixels = dict.forward(s)?;
    ImageGrid::new(shape.0, shape.1, pixels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_block_concentrates_in_dc() {
        let b = 4;
        let v = 0.7;
        let img = ImageGrid::from_fn(b, b, |_, _| v);
        let coeffs = block_dct_analyze(&img, b).unwrap();
        assert!((coeffs[0] - v * b as f64).abs() < 1e-12);
        for &c in &coeffs[1..] {
            assert!(c.abs() < 1e-12);
        }
    }

    #[test]
    fn zero_image_gives_zero_coefficients() {
        let img = ImageGrid::zeros(8, 8);
        let coeffs = block_dct_analyze(&img, 4).unwrap();
        assert!(coeffs.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn analyze_synthesize_roundtrip_preserves_image_and_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let img = ImageGrid::from_fn(64, 64, |_, _| rng.gen::<f64>());
        let coeffs = block_dct_analyze(&img, 32).unwrap();
        assert!((norm2(&coeffs) - norm2(img.pixels())).abs() <= 1e-10 * norm2(img.pixels()));
        let back = block_dct_synthesize(&coeffs, 32, (64, 64)).unwrap();
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn one_hot_dc_coefficient_synthesizes_constant_block() {
        let b = 4;
        // 8x8 image of 4x4 blocks; DC of block (1,0) is at block offset 16+..
        // block order: (0,0), (0,1), (1,0), (1,1) -> third block starts at 32.
        let mut s = vec![0.0; 64];
        s[32] = 1.0;
        let img = block_dct_synthesize(&s, b, (8, 8)).unwrap();
        let expected = 1.0 / b as f64; // alpha(0)^2 = 1/b
        for r in 0..8 {
            for c in 0..8 {
                let want = if r >= 4 && c < 4 { expected } else { 0.0 };
                assert!((img.get(r, c) - want).abs() < 1e-12, "({r},{c})");
            }
        }
    }

    #[test]
    fn synthesis_preserves_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s: Vec<f64> = (0..64).map(|_| rng.gen::<f64>() - 0.5).collect();
        let img = block_dct_synthesize(&s, 8, (8, 8)).unwrap();
        assert!((norm2(img.pixels()) - norm2(&s)).abs() <= 1e-10 * norm2(&s));
    }

    #[test]
    fn indivisible_dimensions_are_rejected() {
        let img = ImageGrid::zeros(10, 10);
        assert!(matches!(block_dct_analyze(&img, 4), Err(Error::Dimension(_))));
    }
}
