//! Shared fixtures and brute-force oracles for the integration suites.
//!
//! The exhaustive l0 search implemented here is the referee for the solver
//! recovery tests. It enumerates supports by increasing size and solves the
//! dense least-squares problem on each via its own Gaussian elimination, so
//! it shares no code with the library's pseudo-inverse path.

#![allow(dead_code)]

use cartex::{DenseDictionary, Dictionary, ImageGrid, MaskGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian matrix with unit-norm columns (Box-Muller from uniform draws).
pub fn gaussian_unit_column_dictionary(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
) -> DenseDictionary {
    let mut data = vec![0.0; rows * cols];
    for c in 0..cols {
        let mut norm_sq = 0.0;
        for r in 0..rows {
            let u1: f64 = rng.gen::<f64>().max(1e-12);
            let u2: f64 = rng.gen();
            let v = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            data[r * cols + c] = v;
            norm_sq += v * v;
        }
        let norm = norm_sq.sqrt();
        for r in 0..rows {
            data[r * cols + c] /= norm;
        }
    }
    DenseDictionary::new(rows, cols, data).unwrap()
}

/// Plant `k` standard-normal nonzeros at distinct random positions.
pub fn plant_sparse(rng: &mut ChaCha8Rng, len: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    let mut support = BTreeSet::new();
    while support.len() < k {
        support.insert(rng.gen_range(0..len));
    }
    for &i in &support {
        let u1: f64 = rng.gen::<f64>().max(1e-12);
        let u2: f64 = rng.gen();
        v[i] = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
    }
    v
}

/// Indices of the `k` largest-magnitude entries.
pub fn top_k_support(v: &[f64], k: usize) -> BTreeSet<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].abs().partial_cmp(&v[a].abs()).unwrap());
    idx.into_iter().take(k).collect()
}

pub fn nonzero_support(v: &[f64]) -> BTreeSet<usize> {
    v.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(i, _)| i).collect()
}

/// Columns of `[A B]` as one dense atom list (texture atoms first).
pub fn stacked_columns(a: &DenseDictionary, b: &DenseDictionary) -> Vec<Vec<f64>> {
    let n = a.n_pixels();
    let mut atoms = Vec::with_capacity(a.n_coeffs() + b.n_coeffs());
    for c in 0..a.n_coeffs() {
        atoms.push((0..n).map(|r| a.entry(r, c)).collect());
    }
    for c in 0..b.n_coeffs() {
        atoms.push((0..n).map(|r| b.entry(r, c)).collect());
    }
    atoms
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve the dense symmetric system `G x = rhs` by Gaussian elimination with
/// partial pivoting. Returns `None` when the pivot collapses.
fn solve_small(g: &[f64], rhs: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut aug = vec![0.0; k * (k + 1)];
    for i in 0..k {
        for j in 0..k {
            aug[i * (k + 1) + j] = g[i * k + j];
        }
        aug[i * (k + 1) + k] = rhs[i];
    }
    for col in 0..k {
        let pivot_row = (col..k).max_by(|&r1, &r2| {
            aug[r1 * (k + 1) + col]
                .abs()
                .partial_cmp(&aug[r2 * (k + 1) + col].abs())
                .unwrap()
        })?;
        if aug[pivot_row * (k + 1) + col].abs() < 1e-12 {
            return None;
        }
        for j in 0..=k {
            aug.swap(col * (k + 1) + j, pivot_row * (k + 1) + j);
        }
        let pivot = aug[col * (k + 1) + col];
        for j in col..=k {
            aug[col * (k + 1) + j] /= pivot;
        }
        for row in 0..k {
            if row != col {
                let f = aug[row * (k + 1) + col];
                if f != 0.0 {
                    for j in col..=k {
                        aug[row * (k + 1) + j] -= f * aug[col * (k + 1) + j];
                    }
                }
            }
        }
    }
    Some((0..k).map(|i| aug[i * (k + 1) + k]).collect())
}

/// Advance `support` to the next k-combination of `0..m` in lexicographic
/// order; false when exhausted.
fn next_combination(support: &mut [usize], m: usize) -> bool {
    let k = support.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if support[i] < m - k + i {
            support[i] += 1;
            for j in i + 1..k {
                support[j] = support[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exhaustive minimum-l0 search: the smallest support whose least-squares
/// fit reaches `||b - D x|| <= 1e-8 ||b||`, ties broken by residual.
///
/// Returns the winning support, or `None` if nothing up to `max_k` fits.
pub fn brute_force_l0_support(atoms: &[Vec<f64>], b: &[f64], max_k: usize) -> Option<BTreeSet<usize>> {
    let m = atoms.len();
    let b_norm_sq = dot(b, b);
    if b_norm_sq == 0.0 {
        return Some(BTreeSet::new());
    }
    let tol_sq = 1e-16 * b_norm_sq;

    // Precompute atom Gram and correlations.
    let gram: Vec<f64> = (0..m * m)
        .map(|i| dot(&atoms[i / m], &atoms[i % m]))
        .collect();
    let corr: Vec<f64> = atoms.iter().map(|a| dot(a, b)).collect();

    let mut best: Option<(f64, BTreeSet<usize>)> = None;
    for k in 1..=max_k {
        let mut support: Vec<usize> = (0..k).collect();
        loop {
            // Residual^2 = ||b||^2 - x^T (D^T b)_S for the LS solution x.
            let mut g = vec![0.0; k * k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                for j in 0..k {
                    g[i * k + j] = gram[support[i] * m + support[j]];
                }
                rhs[i] = corr[support[i]];
            }
            if let Some(x) = solve_small(&g, &rhs, k) {
                // Cheap estimate first; the subtraction cancels catastrophically
                // near zero, so feasible candidates get an explicit residual.
                let estimate = b_norm_sq - dot(&x, &rhs);
                if estimate <= 1e-8 * b_norm_sq {
                    let mut residual = b.to_vec();
                    for (i, &atom_idx) in support.iter().enumerate() {
                        for (r, a) in residual.iter_mut().zip(&atoms[atom_idx]) {
                            *r -= x[i] * a;
                        }
                    }
                    let res_sq = dot(&residual, &residual);
                    if res_sq <= tol_sq {
                        let set: BTreeSet<usize> = support.iter().copied().collect();
                        match &best {
                            Some((r, _)) if *r <= res_sq => {}
                            _ => best = Some((res_sq, set)),
                        }
                    }
                }
            }
            if !next_combination(&mut support, m) {
                break;
            }
        }
        if best.is_some() {
            break; // smallest support size wins
        }
    }
    best.map(|(_, s)| s)
}

// ---------------------------------------------------------------------------
// Synthetic cartoon + texture fixture
// ---------------------------------------------------------------------------

pub const FIXTURE_SIZE: usize = 64;
pub const FIXTURE_BLOCK: usize = 32;
pub const FIXTURE_LEVELS: usize = 6;

/// Half-plane step (edge off every block and dyadic boundary).
pub fn fixture_cartoon() -> ImageGrid {
    ImageGrid::from_fn(FIXTURE_SIZE, FIXTURE_SIZE, |_, c| if c < 21 { 0.2 } else { 0.8 })
}

/// One mid-frequency DCT atom per 32x32 block, pixel amplitude 0.18.
pub fn fixture_texture() -> ImageGrid {
    let b = FIXTURE_BLOCK as f64;
    let (u, v) = (4.0, 7.0);
    let alpha = 2.0 / b; // alpha(u) alpha(v) for u, v > 0
    let amplitude = 0.18;
    ImageGrid::from_fn(FIXTURE_SIZE, FIXTURE_SIZE, |r, c| {
        let i = (r % FIXTURE_BLOCK) as f64;
        let j = (c % FIXTURE_BLOCK) as f64;
        let basis = alpha
            * (std::f64::consts::PI * (2.0 * i + 1.0) * u / (2.0 * b)).cos()
            * (std::f64::consts::PI * (2.0 * j + 1.0) * v / (2.0 * b)).cos();
        amplitude / alpha * basis
    })
}

pub fn fixture_image() -> ImageGrid {
    let cartoon = fixture_cartoon();
    let texture = fixture_texture();
    ImageGrid::from_fn(FIXTURE_SIZE, FIXTURE_SIZE, |r, c| cartoon.get(r, c) + texture.get(r, c))
}

/// Bernoulli mask: each pixel missing with probability `p_missing`.
pub fn random_mask(rng: &mut ChaCha8Rng, height: usize, width: usize, p_missing: f64) -> MaskGrid {
    let bits: Vec<u8> = (0..height * width)
        .map(|_| u8::from(!rng.gen_bool(p_missing)))
        .collect();
    MaskGrid::new(height, width, bits).unwrap()
}
