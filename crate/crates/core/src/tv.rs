//! Discrete total variation: forward-difference gradient, its negative
//! adjoint (divergence), the smoothed TV value, and the curvature correction
//! step applied to the cartoon layer.
//!
//! Forward differences with Neumann (replicate) boundaries pair with a
//! backward-difference divergence so that `<grad u, v> = <u, -div v>` holds
//! exactly, which in turn makes the analytic TV gradient match finite
//! differences of [`tv_value`] to rounding error.

use crate::error::{Error, Result};
use crate::imgio::ImageGrid;

/// Forward-difference field of an image; the last column of `gx` and last
/// row of `gy` are zero by the replicate boundary convention.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    height: usize,
    width: usize,
    /// Horizontal differences `u[r][c+1] - u[r][c]`.
    pub gx: Vec<f64>,
    /// Vertical differences `u[r+1][c] - u[r][c]`.
    pub gy: Vec<f64>,
}

impl GradientField {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }
}

/// Forward differences with Neumann boundary; linear in the image.
pub fn gradient(img: &ImageGrid) -> Result<GradientField> {
    if img.is_empty() {
        return Err(Error::dimension("gradient of empty image"));
    }
    let (h, w) = (img.height(), img.width());
    let px = img.pixels();
    let mut gx = vec![0.0; h * w];
    let mut gy = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if c + 1 < w {
                gx[i] = px[i + 1] - px[i];
            }
            if r + 1 < h {
                gy[i] = px[i + w] - px[i];
            }
        }
    }
    Ok(GradientField { height: h, width: w, gx, gy })
}

/// Negative adjoint of [`gradient`]: backward differences with the boundary
/// rows/columns handled so that `<gradient(u), v> = <u, -divergence(v)>`
/// exactly. The last column of `vx` and last row of `vy` are never read.
pub fn divergence(field: &GradientField) -> ImageGrid {
    let (h, w) = (field.height, field.width);
    let mut out = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            let mut v = 0.0;
            if c + 1 < w {
                v += field.gx[i];
            }
            if c > 0 {
                v -= field.gx[i - 1];
            }
            if r + 1 < h {
                v += field.gy[i];
            }
            if r > 0 {
                v -= field.gy[i - w];
            }
            out[i] = v;
        }
    }
    ImageGrid::new(h, w, out).expect("shape is valid by construction")
}

/// Smoothed isotropic TV: `sum_p sqrt(gx^2 + gy^2 + eps^2)`.
///
/// The raw smoothed sum is returned (a constant image contributes
/// `eps * pixel_count`); with `eps = 0` this is the exact isotropic TV.
pub fn tv_value(img: &ImageGrid, eps: f64) -> Result<f64> {
    if eps < 0.0 || !eps.is_finite() {
        return Err(Error::parameter(format!("tv smoothing eps = {eps} must be non-negative")));
    }
    let field = gradient(img)?;
    let eps_sq = eps * eps;
    let mut acc = 0.0;
    for i in 0..img.len() {
        acc += (field.gx[i] * field.gx[i] + field.gy[i] * field.gy[i] + eps_sq).sqrt();
    }
    Ok(acc)
}

/// Gradient of `tv_value(., eps)`: `-div(gx / rho, gy / rho)` with
/// `rho = sqrt(gx^2 + gy^2 + eps^2)`. Requires `eps > 0` (flat regions
/// would otherwise divide by zero).
pub fn tv_gradient(img: &ImageGrid, eps: f64) -> Result<ImageGrid> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::parameter(format!("tv smoothing eps = {eps} must be positive")));
    }
    let mut field = gradient(img)?;
    let eps_sq = eps * eps;
    for i in 0..img.len() {
        let rho = (field.gx[i] * field.gx[i] + field.gy[i] * field.gy[i] + eps_sq).sqrt();
        field.gx[i] /= rho;
        field.gy[i] /= rho;
    }
    let mut div = divergence(&field);
    for v in div.pixels_mut() {
        *v = -*v;
    }
    Ok(div)
}

/// One explicit gradient step on the smoothed TV: `img - mu * tv_gradient`.
/// Pixel values are not clamped here.
pub fn tv_correction_step(img: &ImageGrid, mu: f64, eps: f64) -> Result<ImageGrid> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::parameter(format!("tv step mu = {mu} must be positive")));
    }
    let grad = tv_gradient(img, eps)?;
    let pixels = img
        .pixels()
        .iter()
        .zip(grad.pixels())
        .map(|(p, g)| p - mu * g)
        .collect();
    ImageGrid::new(img.height(), img.width(), pixels)
}
