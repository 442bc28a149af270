//! Small dense helpers shared by the operator and solver modules.
//!
//! Everything here works on plain `&[f64]` slices. The only factorization is
//! an unpivoted Cholesky of a symmetric positive-definite Gram matrix, which
//! doubles as the rank check: a non-positive pivot means the Gram matrix is
//! singular and the caller reports that instead of regularizing.

use crate::error::{Error, Result};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub(crate) struct CholeskyFactor {
    dim: usize,
    /// Row-major lower triangle (full square storage, upper part unused).
    lower: Vec<f64>,
}

impl CholeskyFactor {
    /// Factor `mat` (row-major `dim x dim`, assumed symmetric). Fails with
    /// `Error::Singular` when a pivot falls below `tol * max_diagonal`.
    pub(crate) fn new(mat: &[f64], dim: usize) -> Result<Self> {
        assert_eq!(mat.len(), dim * dim);
        let max_diag = (0..dim)
            .map(|i| mat[i * dim + i].abs())
            .fold(0.0_f64, f64::max);
        if !max_diag.is_finite() {
            return Err(Error::NonFinite("gram matrix diagonal".into()));
        }
        let pivot_floor = 1e-12 * max_diag.max(f64::MIN_POSITIVE);

        let mut lower = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let mut sum = mat[i * dim + j];
                for k in 0..j {
                    sum -= lower[i * dim + k] * lower[j * dim + k];
                }
                if i == j {
                    if !(sum > pivot_floor) {
                        return Err(Error::Singular(format!(
                            "cholesky pivot {sum:.3e} at row {i} (rank-deficient gram matrix)"
                        )));
                    }
                    lower[i * dim + j] = sum.sqrt();
                } else {
                    lower[i * dim + j] = sum / lower[j * dim + j];
                }
            }
        }
        Ok(CholeskyFactor { dim, lower })
    }

    /// Solve `G x = rhs` via the two triangular solves.
    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.dim);
        let n = self.dim;
        let l = &self.lower;
        let mut x = rhs.to_vec();
        // L y = rhs
        for i in 0..n {
            for k in 0..i {
                x[i] = x[i] - l[i * n + k] * x[k];
            }
            x[i] /= l[i * n + i];
        }
        // L^T x = y
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] = x[i] - l[k * n + i] * x[k];
            }
            x[i] /= l[i * n + i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        // G = M M^T + I for a fixed 3x3 M keeps things well conditioned.
        let m = [1.0, 2.0, 0.5, -1.0, 0.3, 2.0, 0.7, -0.2, 1.1];
        let n = 3;
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    g[i * n + j] += m[i * n + k] * m[j * n + k];
                }
            }
            g[i * n + i] += 1.0;
        }
        let chol = CholeskyFactor::new(&g, n).unwrap();
        let rhs = [1.0, -2.0, 0.25];
        let x = chol.solve(&rhs);
        for i in 0..n {
            let gx: f64 = (0..n).map(|j| g[i * n + j] * x[j]).sum();
            assert!((gx - rhs[i]).abs() < 1e-12, "row {i}: {gx} vs {}", rhs[i]);
        }
    }

    #[test]
    fn cholesky_rejects_singular_matrix() {
        // Rank-1 Gram matrix.
        let g = [1.0, 2.0, 2.0, 4.0];
        match CholeskyFactor::new(&g, 2) {
            Err(Error::Singular(_)) => {}
            other => panic!("expected singular error, got {other:?}"),
        }
    }
}
