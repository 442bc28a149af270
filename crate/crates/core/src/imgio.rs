//! Grayscale image and mask grids, binary PGM (P5) I/O, and PSNR.
//!
//! Images are stored as `f64` in row-major order. Files loaded from 8-bit PGM
//! map each sample `v` to `v / 255` exactly; on write, values are clamped to
//! `[0, 1]` and quantized with round-half-away-from-zero. Masks are PGM files
//! restricted to the values {0, 255}: 255 marks a known pixel, 0 a missing
//! one. Anything in between is rejected rather than thresholded.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// 2-D grayscale raster, row-major.
///
/// Loaded images live in `[0, 1]`; intermediate solver images (layers,
/// residuals) may leave that range and are only clamped when written out.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl ImageGrid {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::dimension("image must be non-empty"));
        }
        if pixels.len() != height * width {
            return Err(Error::dimension(format!(
                "pixel buffer length {} does not match {height}x{width}",
                pixels.len()
            )));
        }
        if pixels.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("image pixel".into()));
        }
        Ok(ImageGrid { height, width, pixels })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        ImageGrid { height, width, pixels: vec![0.0; height * width] }
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        ImageGrid { height, width, pixels }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Same shape check used all over the solvers.
    pub fn same_shape(&self, other: &ImageGrid) -> bool {
        self.height == other.height && self.width == other.width
    }

    /// Crop to `new_height x new_width`, keeping the top-left corner.
    pub fn crop(&self, new_height: usize, new_width: usize) -> Result<ImageGrid> {
        if new_height == 0 || new_width == 0 || new_height > self.height || new_width > self.width {
            return Err(Error::dimension(format!(
                "cannot crop {}x{} to {new_height}x{new_width}",
                self.height, self.width
            )));
        }
        let mut pixels = Vec::with_capacity(new_height * new_width);
        for r in 0..new_height {
            let start = r * self.width;
            pixels.extend_from_slice(&self.pixels[start..start + new_width]);
        }
        Ok(ImageGrid { height: new_height, width: new_width, pixels })
    }
}

/// Binary mask paired with an image: 1 = pixel known, 0 = pixel missing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskGrid {
    height: usize,
    width: usize,
    bits: Vec<u8>,
}

impl MaskGrid {
    pub fn new(height: usize, width: usize, bits: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::dimension("mask must be non-empty"));
        }
        if bits.len() != height * width {
            return Err(Error::dimension(format!(
                "mask buffer length {} does not match {height}x{width}",
                bits.len()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Validation("mask bits must be 0 or 1".into()));
        }
        Ok(MaskGrid { height, width, bits })
    }

    pub fn all_known(height: usize, width: usize) -> Self {
        MaskGrid { height, width, bits: vec![1; height * width] }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn is_known(&self, idx: usize) -> bool {
        self.bits[idx] == 1
    }

    pub fn known_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn same_shape(&self, img: &ImageGrid) -> bool {
        self.height == img.height() && self.width == img.width()
    }

    pub fn crop(&self, new_height: usize, new_width: usize) -> Result<MaskGrid> {
        if new_height == 0 || new_width == 0 || new_height > self.height || new_width > self.width {
            return Err(Error::dimension(format!(
                "cannot crop {}x{} to {new_height}x{new_width}",
                self.height, self.width
            )));
        }
        let mut bits = Vec::with_capacity(new_height * new_width);
        for r in 0..new_height {
            let start = r * self.width;
            bits.extend_from_slice(&self.bits[start..start + new_width]);
        }
        Ok(MaskGrid { height: new_height, width: new_width, bits })
    }
}

// ---------------------------------------------------------------------------
// Binary PGM (P5)
// ---------------------------------------------------------------------------

struct PgmHeader {
    width: usize,
    height: usize,
    data_start: usize,
}

/// Parse the "P5\n<width> <height>\n255\n" header (whitespace and `#`
/// comments allowed between tokens, per the netpbm convention).
fn parse_pgm_header(bytes: &[u8]) -> Result<PgmHeader> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::Parse { offset: 0, message: "expected PGM magic \"P5\"".into() });
    }
    let mut pos = 2;
    let mut fields = [0usize; 3]; // width, height, maxval
    for field in fields.iter_mut() {
        pos = skip_whitespace_and_comments(bytes, pos)?;
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == start {
            return Err(Error::Parse { offset: start, message: "expected decimal value".into() });
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = text.parse().map_err(|_| Error::Parse {
            offset: start,
            message: "header value out of range".into(),
        })?;
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::Parse { offset: 2, message: "zero image dimension".into() });
    }
    if maxval != 255 {
        return Err(Error::Unsupported(format!("PGM maxval {maxval} (only 255 is supported)")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Parse { offset: pos, message: "expected whitespace before raster".into() });
    }
    pos += 1;
    Ok(PgmHeader { width, height, data_start: pos })
}

fn skip_whitespace_and_comments(bytes: &[u8], mut pos: usize) -> Result<usize> {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
        } else {
            if pos >= bytes.len() {
                return Err(Error::Parse { offset: pos, message: "unexpected end of header".into() });
            }
            return Ok(pos);
        }
    }
}

fn decode_pgm(bytes: &[u8]) -> Result<(usize, usize, &[u8])> {
    let header = parse_pgm_header(bytes)?;
    let expected = header.width * header.height;
    let raster = &bytes[header.data_start..];
    if raster.len() < expected {
        return Err(Error::Parse {
            offset: bytes.len(),
            message: format!("raster truncated: expected {expected} bytes, found {}", raster.len()),
        });
    }
    Ok((header.height, header.width, &raster[..expected]))
}

/// Read an 8-bit binary PGM into an [`ImageGrid`] with values `v / 255`.
pub fn read_image(path: impl AsRef<Path>) -> Result<ImageGrid> {
    let bytes = fs::read(path)?;
    let (height, width, raster) = decode_pgm(&bytes)?;
    let pixels = raster.iter().map(|&v| v as f64 / 255.0).collect();
    Ok(ImageGrid { height, width, pixels })
}

/// Quantize one pixel: clamp to `[0, 1]`, scale, round half away from zero.
fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Encode an [`ImageGrid`] as binary PGM bytes (`P5\n<w> <h>\n255\n` + raster).
pub fn encode_image(img: &ImageGrid) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.pixels.iter().map(|&v| quantize(v)));
    out
}

pub fn write_image(img: &ImageGrid, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_image(img))?;
    Ok(())
}

/// Read a mask PGM. Only the sample values 0 and 255 are accepted; 255 maps
/// to known (1) and 0 to missing (0).
pub fn read_mask(path: impl AsRef<Path>) -> Result<MaskGrid> {
    let bytes = fs::read(path)?;
    let (height, width, raster) = decode_pgm(&bytes)?;
    let mut bits = Vec::with_capacity(raster.len());
    for (i, &v) in raster.iter().enumerate() {
        match v {
            255 => bits.push(1),
            0 => bits.push(0),
            other => {
                return Err(Error::Validation(format!(
                    "mask sample {other} at pixel {i} is neither 0 nor 255"
                )))
            }
        }
    }
    Ok(MaskGrid { height, width, bits })
}

pub fn write_mask(mask: &MaskGrid, path: impl AsRef<Path>) -> Result<()> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width, mask.height).into_bytes();
    out.extend(mask.bits.iter().map(|&b| if b == 1 { 255u8 } else { 0u8 }));
    fs::write(path, out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// PSNR
// ---------------------------------------------------------------------------

/// Peak signal-to-noise ratio in dB with peak 1.0.
///
/// With `missing_of = Some(mask)` the error is evaluated only over the
/// pixels the mask marks missing (bit 0). Identical inputs return
/// `f64::INFINITY`.
pub fn psnr(a: &ImageGrid, b: &ImageGrid, missing_of: Option<&MaskGrid>) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(Error::dimension(format!(
            "psnr shapes differ: {}x{} vs {}x{}",
            a.height, a.width, b.height, b.width
        )));
    }
    if let Some(mask) = missing_of {
        if !mask.same_shape(a) {
            return Err(Error::dimension("psnr mask shape differs from images"));
        }
    }
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for i in 0..a.len() {
        if let Some(mask) = missing_of {
            if mask.is_known(i) {
                continue;
            }
        }
        let d = a.pixels[i] - b.pixels[i];
        sum_sq += d * d;
        count += 1;
    }
    if count == 0 {
        return Err(Error::Degenerate("psnr region contains no pixels".into()));
    }
    let mse = sum_sq / count as f64;
    if mse == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(10.0 * (1.0 / mse).log10())
    }
}
