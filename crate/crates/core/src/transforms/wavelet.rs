//! Critically-sampled orthonormal multiscale wavelet dictionary.
//!
//! Separable 2-D Mallat decomposition with the 4-tap orthonormal Daubechies
//! filter and periodic boundaries, which keeps every level exactly
//! orthogonal on dyadic lengths. The analysis output uses the usual in-place
//! quadrant layout (approximation band in the top-left corner), flattened
//! row-major. Synthesis is the exact transpose, so the dictionary is a
//! square Parseval tight frame.

use crate::error::{Error, Result};
use crate::imgio::ImageGrid;
use crate::operators::{check_len, Dictionary};

/// Daubechies 4-tap analysis lowpass, i.e. `(1 +- sqrt 3) / (4 sqrt 2)`:
/// the shortest orthonormal filter with a vanishing moment beyond Haar.
const LO: [f64; 4] = [
    0.482_962_913_144_534_16,
    0.836_516_303_737_807_9,
    0.224_143_868_042_013_4,
    -0.129_409_522_551_260_37,
];

/// Quadrature-mirror highpass: `g[t] = (-1)^t lo[3 - t]`.
const HI: [f64; 4] = [LO[3], -LO[2], LO[1], -LO[0]];

/// One periodic analysis step: `x` (even length) -> approx | detail halves.
fn dwt_step(x: &[f64], out: &mut [f64]) {
    let n = x.len();
    let half = n / 2;
    for k in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for t in 0..4 {
            let v = x[(2 * k + t) % n];
            a += LO[t] * v;
            d += HI[t] * v;
        }
        out[k] = a;
        out[half + k] = d;
    }
}

/// Transpose of [`dwt_step`]; exact inverse by orthonormality.
fn idwt_step(coeffs: &[f64], out: &mut [f64]) {
    let n = coeffs.len();
    let half = n / 2;
    out.fill(0.0);
    for k in 0..half {
        let a = coeffs[k];
        let d = coeffs[half + k];
        for t in 0..4 {
            out[(2 * k + t) % n] += LO[t] * a + HI[t] * d;
        }
    }
}

/// Cartoon dictionary: orthonormal 2-D wavelet over a fixed image shape.
#[derive(Debug, Clone)]
pub struct WaveletDictionary {
    height: usize,
    width: usize,
    levels: usize,
}

impl WaveletDictionary {
    pub fn new(height: usize, width: usize, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::parameter("level count must be positive"));
        }
        if height == 0 || width == 0 {
            return Err(Error::dimension("image shape must be non-empty"));
        }
        let factor = 1usize
            .checked_shl(levels as u32)
            .ok_or_else(|| Error::parameter(format!("level count {levels} is too large")))?;
        if height % factor != 0 || width % factor != 0 {
            return Err(Error::dimension(format!(
                "image {height}x{width} is not divisible by 2^{levels} = {factor}"
            )));
        }
        Ok(WaveletDictionary { height, width, levels })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    fn analyze(&self, image: &[f64]) -> Vec<f64> {
        let w = self.width;
        let mut data = image.to_vec();
        let mut row_buf = vec![0.0; self.width.max(self.height)];
        let mut col_buf = vec![0.0; self.height];
        let mut band_h = self.height;
        let mut band_w = self.width;
        for _ in 0..self.levels {
            // Rows of the current band.
            for r in 0..band_h {
                let row = &data[r * w..r * w + band_w];
                dwt_step(row, &mut row_buf[..band_w]);
                data[r * w..r * w + band_w].copy_from_slice(&row_buf[..band_w]);
            }
            // Columns of the current band.
            for c in 0..band_w {
                for r in 0..band_h {
                    col_buf[r] = data[r * w + c];
                }
                dwt_step(&col_buf[..band_h], &mut row_buf[..band_h]);
                for r in 0..band_h {
                    data[r * w + c] = row_buf[r];
                }
            }
            band_h /= 2;
            band_w /= 2;
        }
        data
    }

    fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let w = self.width;
        let mut data = coeffs.to_vec();
        let mut buf = vec![0.0; self.width.max(self.height)];
        let mut col_buf = vec![0.0; self.height];
        // Band sizes from coarsest back up to the full image.
        for level in (0..self.levels).rev() {
            let band_h = self.height >> level;
            let band_w = self.width >> level;
            // Columns first (mirror of analysis order).
            for c in 0..band_w {
                for r in 0..band_h {
                    col_buf[r] = data[r * w + c];
                }
                idwt_step(&col_buf[..band_h], &mut buf[..band_h]);
                for r in 0..band_h {
                    data[r * w + c] = buf[r];
                }
            }
            for r in 0..band_h {
                let row: Vec<f64> = data[r * w..r * w + band_w].to_vec();
                idwt_step(&row, &mut buf[..band_w]);
                data[r * w..r * w + band_w].copy_from_slice(&buf[..band_w]);
            }
        }
        data
    }
}

impl Dictionary for WaveletDictionary {
    fn n_pixels(&self) -> usize {
        self.height * self.width
    }

    fn n_coeffs(&self) -> usize {
        self.height * self.width
    }

    fn forward(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        check_len("wavelet coefficients", coeffs.len(), self.n_coeffs())?;
        Ok(self.synthesize(coeffs))
    }

    fn adjoint(&self, image: &[f64]) -> Result<Vec<f64>> {
        check_len("wavelet image", image.len(), self.n_pixels())?;
        Ok(self.analyze(image))
    }

    fn is_tight_frame(&self) -> bool {
        true
    }
}

/// Multiscale analysis coefficients of an image.
pub fn multiscale_analyze(img: &ImageGrid, levels: usize) -> Result<Vec<f64>> {
    let dict = WaveletDictionary::new(img.height(), img.width(), levels)?;
    dict.adjoint(img.pixels())
}

/// Inverse of [`multiscale_analyze`]; the dictionary forward map.
pub fn multiscale_synthesize(s: &[f64], levels: usize, shape: (usize, usize)) -> Result<ImageGrid> {
    let dict = WaveletDictionary::new(shape.0, shape.1, levels)?;
    let pixels = dict.forward(s)?;
    ImageGrid::new(shape.0, shape.1, pixels)
}
