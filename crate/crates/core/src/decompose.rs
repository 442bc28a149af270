//! Mask-free two-dictionary sparse decomposition.
//!
//! The input image is split as `c = texture + cartoon` by driving the pair
//! of coefficient vectors toward joint sparsity under the smoothed-l0
//! surrogate while staying on the affine set `{A s1 + B s2 = c}`: per
//! continuation stage, inner gradient steps on the surrogate only, each
//! followed by a projection back onto the feasible set. The equality
//! constraint carries the data; no fidelity term appears in the mask-free
//! gradient.

use crate::error::{Error, Result};
use crate::imgio::ImageGrid;
use crate::operators::{CoefficientPair, CombinedOperator, Dictionary};
use crate::sl0;

/// Parameters of the mask-free decomposition.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Continuation stages (decreasing sigma values).
    pub outer: usize,
    /// Gradient steps per stage.
    pub inner: usize,
    /// Geometric sigma decay in `(0, 1)`.
    pub sigma_decay: f64,
    /// Texture step size, in sigma^2 units.
    pub mu_texture: f64,
    /// Cartoon step size, in sigma^2 units.
    pub mu_cartoon: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { outer: 5, inner: 10, sigma_decay: 0.5, mu_texture: 2.0, mu_cartoon: 2.0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.outer < 1 {
            return Err(Error::parameter("outer iteration count must be at least 1"));
        }
        if self.inner < 1 {
            return Err(Error::parameter("inner iteration count must be at least 1"));
        }
        if !(self.sigma_decay > 0.0 && self.sigma_decay < 1.0) {
            return Err(Error::parameter(format!(
                "sigma decay {} must lie in (0, 1)",
                self.sigma_decay
            )));
        }
        for (name, mu) in [("mu_texture", self.mu_texture), ("mu_cartoon", self.mu_cartoon)] {
            if !(mu > 0.0) || !mu.is_finite() {
                return Err(Error::parameter(format!("{name} = {mu} must be positive")));
            }
        }
        Ok(())
    }
}

/// Per-outer-iteration diagnostics shared by both solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based outer iteration index.
    pub n: usize,
    pub sigma: f64,
    /// Fidelity weight; 0 in mask-free mode where the constraint is exact.
    pub lambda: f64,
    /// `||c - A s1 - B s2||_2` at the end of the iteration.
    pub residual: f64,
    /// Smoothed nonzero count `M1 - F_sigma(s1)` of the texture vector.
    pub f0_texture: f64,
    /// Smoothed nonzero count `M2 - F_sigma(s2)` of the cartoon vector.
    pub f0_cartoon: f64,
    /// Exact isotropic TV of the cartoon layer.
    pub tv_cartoon: f64,
}

/// Output of [`decompose`] and of the inpainting solver.
#[derive(Debug, Clone)]
pub struct DecompositionResult {
    /// Texture coefficients `s1`.
    pub texture_coeffs: Vec<f64>,
    /// Cartoon coefficients `s2`.
    pub cartoon_coeffs: Vec<f64>,
    /// Texture layer `A s1` on the image grid.
    pub texture_layer: ImageGrid,
    /// Cartoon layer `B s2` on the image grid.
    pub cartoon_layer: ImageGrid,
    pub iterations: Vec<IterationRecord>,
}

pub(crate) fn layers_of<A: Dictionary, B: Dictionary>(
    comb: &CombinedOperator<A, B>,
    s: &CoefficientPair,
    height: usize,
    width: usize,
) -> Result<(ImageGrid, ImageGrid)> {
    let texture = ImageGrid::new(height, width, comb.texture().forward(&s.texture)?)?;
    let cartoon = ImageGrid::new(height, width, comb.cartoon().forward(&s.cartoon)?)?;
    Ok((texture, cartoon))
}

pub(crate) fn record_iteration<A: Dictionary, B: Dictionary>(
    comb: &CombinedOperator<A, B>,
    s: &CoefficientPair,
    c: &[f64],
    n: usize,
    sigma: f64,
    lambda: f64,
    cartoon_shape: (usize, usize),
) -> Result<IterationRecord> {
    let m1 = s.texture.len() as f64;
    let m2 = s.cartoon.len() as f64;
    let cartoon_layer = ImageGrid::new(
        cartoon_shape.0,
        cartoon_shape.1,
        comb.cartoon().forward(&s.cartoon)?,
    )?;
    Ok(IterationRecord {
        n,
        sigma,
        lambda,
        residual: comb.residual_norm(s, c)?,
        f0_texture: m1 - sl0::smoothed_l0_value(&s.texture, sigma)?,
        f0_cartoon: m2 - sl0::smoothed_l0_value(&s.cartoon, sigma)?,
        tv_cartoon: crate::tv::tv_value(&cartoon_layer, 0.0)?,
    })
}

/// Decompose a fully observed image over the combined dictionary.
///
/// Deterministic for a fixed config. The zero image short-circuits to the
/// all-zero pair (it is feasible and already maximally sparse).
pub fn decompose<A: Dictionary, B: Dictionary>(
    c: &ImageGrid,
    comb: &CombinedOperator<A, B>,
    cfg: &SolverConfig,
) -> Result<DecompositionResult> {
    cfg.validate()?;
    if c.len() != comb.n_pixels() {
        return Err(Error::dimension(format!(
            "image has {} pixels, operators expect {}",
            c.len(),
            comb.n_pixels()
        )));
    }
    let shape = (c.height(), c.width());
    let target = c.pixels();

    let mut s = comb.min_l2_init(target)?;
    if s.is_zero() {
        let (texture_layer, cartoon_layer) = layers_of(comb, &s, shape.0, shape.1)?;
        return Ok(DecompositionResult {
            texture_coeffs: s.texture,
            cartoon_coeffs: s.cartoon,
            texture_layer,
            cartoon_layer,
            iterations: Vec::new(),
        });
    }

    let joined: Vec<f64> = s.texture.iter().chain(&s.cartoon).copied().collect();
    let schedule = sl0::make_sigma_schedule(&joined, cfg.outer, cfg.sigma_decay)?;

    let mut iterations = Vec::with_capacity(cfg.outer);
    for (idx, &sigma) in schedule.values().iter().enumerate() {
        for _ in 0..cfg.inner {
            let d1 = sl0::smoothed_l0_ascent_direction(&s.texture, sigma)?;
            let d2 = sl0::smoothed_l0_ascent_direction(&s.cartoon, sigma)?;
            crate::linalg::axpy(-cfg.mu_texture, &d1, &mut s.texture);
            crate::linalg::axpy(-cfg.mu_cartoon, &d2, &mut s.cartoon);
            s = comb.feasibility_projection(&s, target)?;
        }
        iterations.push(record_iteration(comb, &s, target, idx + 1, sigma, 0.0, shape)?);
    }

    let (texture_layer, cartoon_layer) = layers_of(comb, &s, shape.0, shape.1)?;
    Ok(DecompositionResult {
        texture_coeffs: s.texture,
        cartoon_coeffs: s.cartoon,
        texture_layer,
        cartoon_layer,
        iterations,
    })
}
