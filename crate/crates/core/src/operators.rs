//! Linear-operator abstraction for dictionaries, plus the pseudo-inverse,
//! orthogonal-projection, and feasibility-projection machinery the solvers
//! are built on.
//!
//! A dictionary is a synthesis operator: `forward` maps a coefficient vector
//! to an image vector, `adjoint` maps back. The minimum-norm pseudo-inverse
//! goes through the Gram matrix `A A^T` (small dimension = pixel count at
//! desk scale) with a dense Cholesky factorization; dictionaries that declare
//! themselves Parseval tight frames (`A A^T = I`) skip the factorization
//! entirely, which is what makes image-scale runs feasible.

use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{self, CholeskyFactor};

/// A linear synthesis operator mapping coefficients to image vectors.
///
/// Implementations must be immutable after construction; `forward` and
/// `adjoint` are pure, so operators are safe to share across threads.
pub trait Dictionary: Send + Sync {
    /// Image-vector length (rows of the operator matrix).
    fn n_pixels(&self) -> usize;

    /// Coefficient-vector length (columns).
    fn n_coeffs(&self) -> usize;

    /// Synthesis: `A s`, mapping `n_coeffs` values to `n_pixels` values.
    fn forward(&self, coeffs: &[f64]) -> Result<Vec<f64>>;

    /// Analysis: `A^T y`, mapping `n_pixels` values to `n_coeffs` values.
    fn adjoint(&self, image: &[f64]) -> Result<Vec<f64>>;

    /// True when `A A^T = I`, enabling the factorization-free pseudo-inverse.
    fn is_tight_frame(&self) -> bool {
        false
    }
}

pub(crate) fn check_len(what: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::dimension(format!("{what}: length {got}, expected {expected}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Explicit-matrix backend
// ---------------------------------------------------------------------------

/// Dictionary backed by an explicit dense matrix (row-major `rows x cols`).
#[derive(Debug, Clone)]
pub struct DenseDictionary {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseDictionary {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dimension("matrix must be non-empty"));
        }
        if data.len() != rows * cols {
            return Err(Error::dimension(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entry".into()));
        }
        Ok(DenseDictionary { rows, cols, data })
    }

    /// Parse the plain-text format: first line `rows cols`, then `rows`
    /// whitespace-separated lines of `cols` decimal values.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let rows: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse { offset: 0, message: "missing row count".into() })?
            .parse()
            .map_err(|_| Error::Parse { offset: 0, message: "invalid row count".into() })?;
        let cols: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse { offset: 0, message: "missing column count".into() })?
            .parse()
            .map_err(|_| Error::Parse { offset: 0, message: "invalid column count".into() })?;
        let mut data = Vec::with_capacity(rows * cols);
        for tok in tokens {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                offset: 0,
                message: format!("invalid matrix entry {tok:?}"),
            })?;
            data.push(v);
        }
        if data.len() != rows * cols {
            return Err(Error::Parse {
                offset: 0,
                message: format!("expected {} entries, found {}", rows * cols, data.len()),
            });
        }
        DenseDictionary::new(rows, cols, data)
    }

    pub fn from_text_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        DenseDictionary::from_text(&text)
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }
}

impl Dictionary for DenseDictionary {
    fn n_pixels(&self) -> usize {
        self.rows
    }

    fn n_coeffs(&self) -> usize {
        self.cols
    }

    fn forward(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        check_len("forward input", coeffs.len(), self.cols)?;
        let mut out = vec![0.0; self.rows];
        for (r, o) in out.iter_mut().enumerate() {
            *o = linalg::dot(&self.data[r * self.cols..(r + 1) * self.cols], coeffs);
        }
        Ok(out)
    }

    fn adjoint(&self, image: &[f64]) -> Result<Vec<f64>> {
        check_len("adjoint input", image.len(), self.rows)?;
        let mut out = vec![0.0; self.cols];
        for (r, &y) in image.iter().enumerate() {
            linalg::axpy(y, &self.data[r * self.cols..(r + 1) * self.cols], &mut out);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Minimum-norm pseudo-inverse
// ---------------------------------------------------------------------------

/// Builds the Gram matrix `A A^T` (or `A A^T + B B^T` for a pair) by probing
/// with image-space basis vectors, so it works for any backend.
fn build_gram(ops: &[&dyn Dictionary]) -> Result<Vec<f64>> {
    let n = ops[0].n_pixels();
    let mut gram = vec![0.0; n * n];
    let mut basis = vec![0.0; n];
    for j in 0..n {
        basis[j] = 1.0;
        for op in ops {
            let col = op.forward(&op.adjoint(&basis)?)?;
            for i in 0..n {
                gram[i * n + j] += col[i];
            }
        }
        basis[j] = 0.0;
    }
    Ok(gram)
}

/// Minimum-norm pseudo-inverse applier `A^T (A A^T)^{-1}` for one dictionary.
///
/// Construction factors the Gram matrix unless the dictionary is a tight
/// frame, in which case `apply` reduces to the adjoint.
pub struct Pseudoinverse<'a, D: Dictionary> {
    op: &'a D,
    factor: Option<CholeskyFactor>,
}

impl<'a, D: Dictionary> Pseudoinverse<'a, D> {
    pub fn new(op: &'a D) -> Result<Self> {
        let factor = if op.is_tight_frame() {
            None
        } else {
            let gram = build_gram(&[op as &dyn Dictionary])?;
            Some(CholeskyFactor::new(&gram, op.n_pixels())?)
        };
        Ok(Pseudoinverse { op, factor })
    }

    /// `A^+ y`: the minimum-l2-norm preimage of `y`.
    pub fn apply(&self, image: &[f64]) -> Result<Vec<f64>> {
        check_len("pseudo-inverse input", image.len(), self.op.n_pixels())?;
        match &self.factor {
            None => self.op.adjoint(image),
            Some(chol) => self.op.adjoint(&chol.solve(image)),
        }
    }
}

/// Projection onto the orthogonal complement of `range(A^T)` in coefficient
/// space: `(I - A^T (A A^T)^{-1} A) s`. Idempotent; annihilates `A^T z`.
///
/// For a tight frame this is `s - A^T A s`; in image space the corresponding
/// projector is zero because `A` has full row rank.
pub fn orth_complement_projection<D: Dictionary>(op: &D, coeffs: &[f64]) -> Result<Vec<f64>> {
    check_len("projection input", coeffs.len(), op.n_coeffs())?;
    let pinv = Pseudoinverse::new(op)?;
    let range_part = pinv.apply(&op.forward(coeffs)?)?;
    Ok(coeffs.iter().zip(&range_part).map(|(s, r)| s - r).collect())
}

// ---------------------------------------------------------------------------
// Combined operator
// ---------------------------------------------------------------------------

/// The pair `(s1, s2)` of texture and cartoon coefficient vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPair {
    pub texture: Vec<f64>,
    pub cartoon: Vec<f64>,
}

impl CoefficientPair {
    pub fn zeros(texture_len: usize, cartoon_len: usize) -> Self {
        CoefficientPair { texture: vec![0.0; texture_len], cartoon: vec![0.0; cartoon_len] }
    }

    /// Largest absolute entry across both vectors.
    pub fn max_abs(&self) -> f64 {
        self.texture
            .iter()
            .chain(&self.cartoon)
            .fold(0.0_f64, |acc, &v| acc.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.texture.iter().chain(&self.cartoon).all(|&v| v == 0.0)
    }
}

/// Two dictionaries over the same image space: texture first, cartoon second.
///
/// The combined synthesis is `A s1 + B s2`; `pinv_apply` is the minimum-norm
/// pseudo-inverse of the stacked operator `[A B]`. The Gram factorization is
/// computed lazily on first use and cached (the fast tight-frame path never
/// needs it).
pub struct CombinedOperator<A: Dictionary, B: Dictionary> {
    texture: A,
    cartoon: B,
    gram: OnceLock<std::result::Result<CholeskyFactor, String>>,
}

impl<A: Dictionary, B: Dictionary> CombinedOperator<A, B> {
    pub fn new(texture: A, cartoon: B) -> Result<Self> {
        if texture.n_pixels() != cartoon.n_pixels() {
            return Err(Error::dimension(format!(
                "texture operator has {} pixels, cartoon {}",
                texture.n_pixels(),
                cartoon.n_pixels()
            )));
        }
        Ok(CombinedOperator { texture, cartoon, gram: OnceLock::new() })
    }

    pub fn texture(&self) -> &A {
        &self.texture
    }

    pub fn cartoon(&self) -> &B {
        &self.cartoon
    }

    pub fn n_pixels(&self) -> usize {
        self.texture.n_pixels()
    }

    pub fn n_texture_coeffs(&self) -> usize {
        self.texture.n_coeffs()
    }

    pub fn n_cartoon_coeffs(&self) -> usize {
        self.cartoon.n_coeffs()
    }

    fn both_tight(&self) -> bool {
        self.texture.is_tight_frame() && self.cartoon.is_tight_frame()
    }

    fn check_pair(&self, s: &CoefficientPair) -> Result<()> {
        check_len("texture coefficients", s.texture.len(), self.texture.n_coeffs())?;
        check_len("cartoon coefficients", s.cartoon.len(), self.cartoon.n_coeffs())
    }

    /// Combined synthesis `A s1 + B s2`.
    pub fn forward_pair(&self, s: &CoefficientPair) -> Result<Vec<f64>> {
        self.check_pair(s)?;
        let mut image = self.texture.forward(&s.texture)?;
        let cartoon = self.cartoon.forward(&s.cartoon)?;
        for (i, c) in image.iter_mut().zip(&cartoon) {
            *i += c;
        }
        Ok(image)
    }

    /// Stacked adjoint `(A^T y, B^T y)`.
    pub fn adjoint_pair(&self, image: &[f64]) -> Result<CoefficientPair> {
        check_len("adjoint input", image.len(), self.n_pixels())?;
        Ok(CoefficientPair {
            texture: self.texture.adjoint(image)?,
            cartoon: self.cartoon.adjoint(image)?,
        })
    }

    fn gram_factor(&self) -> Result<&CholeskyFactor> {
        let cached = self.gram.get_or_init(|| {
            let ops: [&dyn Dictionary; 2] = [&self.texture, &self.cartoon];
            match build_gram(&ops).and_then(|g| CholeskyFactor::new(&g, self.n_pixels())) {
                Ok(f) => Ok(f),
                Err(e) => Err(e.to_string()),
            }
        });
        match cached {
            Ok(f) => Ok(f),
            Err(msg) => Err(Error::Singular(msg.clone())),
        }
    }

    /// Minimum-norm pseudo-inverse `[A B]^+ y = [A B]^T (A A^T + B B^T)^{-1} y`.
    ///
    /// When both dictionaries are Parseval tight frames the Gram matrix is
    /// `2 I` and this is `(A^T y / 2, B^T y / 2)` with no factorization.
    pub fn pinv_apply(&self, image: &[f64]) -> Result<CoefficientPair> {
        check_len("pseudo-inverse input", image.len(), self.n_pixels())?;
        if self.both_tight() {
            let halved: Vec<f64> = image.iter().map(|v| v * 0.5).collect();
            return self.adjoint_pair(&halved);
        }
        let z = self.gram_factor()?.solve(image);
        self.adjoint_pair(&z)
    }

    /// Minimum-l2-norm solution of `A s1 + B s2 = c`.
    pub fn min_l2_init(&self, c: &[f64]) -> Result<CoefficientPair> {
        self.pinv_apply(c)
    }

    /// l2-nearest point on the affine set `{A s1 + B s2 = c}`:
    /// `s + [A B]^+ (c - A s1 - B s2)`.
    pub fn feasibility_projection(&self, s: &CoefficientPair, c: &[f64]) -> Result<CoefficientPair> {
        self.check_pair(s)?;
        check_len("target image", c.len(), self.n_pixels())?;
        let synth = self.forward_pair(s)?;
        let residual: Vec<f64> = c.iter().zip(&synth).map(|(ci, si)| ci - si).collect();
        let correction = self.pinv_apply(&residual)?;
        let mut out = s.clone();
        linalg::axpy(1.0, &correction.texture, &mut out.texture);
        linalg::axpy(1.0, &correction.cartoon, &mut out.cartoon);
        Ok(out)
    }

    /// `||c - A s1 - B s2||_2`
    pub fn residual_norm(&self, s: &CoefficientPair, c: &[f64]) -> Result<f64> {
        let synth = self.forward_pair(s)?;
        let diff: Vec<f64> = c.iter().zip(&synth).map(|(ci, si)| ci - si).collect();
        Ok(linalg::norm2(&diff))
    }
}
