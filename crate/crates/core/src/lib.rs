//! Two-dictionary sparse image decomposition and masked inpainting.
//!
//! An image is modeled as the sum of a *texture* layer, sparse under a
//! blockwise DCT dictionary, and a *cartoon* layer, sparse under a multiscale
//! wavelet dictionary. The joint sparse representation is found by smoothed-l0
//! continuation: a decreasing sequence of smoothing widths, gradient steps on
//! the smoothed sparsity surrogate, and projection back onto the feasible set.
//! Masked inpainting replaces the hard equality constraint with a weighted
//! data-fidelity penalty on the observed pixels plus a total-variation
//! correction of the cartoon layer, then reconstructs the full image from the
//! recovered coefficients.
//!
//! Module map:
//! - [`imgio`]: image/mask grids, binary PGM I/O, PSNR.
//! - [`operators`]: the dictionary abstraction, pseudo-inverse and projection
//!   machinery shared by both solvers.
//! - [`sl0`]: the smoothed-l0 surrogate, its gradient, sigma schedules, and a
//!   single-dictionary sparse solver.
//! - [`tv`]: discrete total variation and the curvature correction step.
//! - [`transforms`]: block-DCT and wavelet dictionary backends plus the
//!   coefficient dump format.
//! - [`decompose`]: mask-free two-dictionary decomposition.
//! - [`inpaint`]: masked inpainting with the lambda schedule and TV step.

mod error;
pub(crate) mod linalg;

pub mod decompose;
pub mod imgio;
pub mod inpaint;
pub mod operators;
pub mod report;
pub mod sl0;
pub mod transforms;
pub mod tv;

pub use error::{Error, Result};
pub use imgio::{ImageGrid, MaskGrid};
pub use operators::{CoefficientPair, CombinedOperator, DenseDictionary, Dictionary};
pub use transforms::{BlockDctDictionary, WaveletDictionary};
