//! Smoothed-l0 machinery: the Gaussian sparsity surrogate, its gradient
//! direction, the sigma continuation schedule, and a single-dictionary
//! solver for underdetermined systems.
//!
//! The surrogate `F_sigma(s) = sum_i exp(-s_i^2 / 2 sigma^2)` counts the
//! near-zero entries of `s`, so `m - F_sigma(s)` approximates `||s||_0`.
//! Large sigma gives a smooth landscape; the solver follows a decreasing
//! sigma sequence, warm-starting each stage from the previous one, starting
//! from the minimum-l2-norm solution (the large-sigma maximizer).

use crate::error::{Error, Result};
use crate::linalg;
use crate::operators::{Dictionary, Pseudoinverse};

/// Strictly decreasing sequence of positive smoothing widths.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSchedule {
    values: Vec<f64>,
}

impl SigmaSchedule {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::parameter("sigma schedule must be non-empty"));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::parameter(format!("sigma[{i}] = {v} must be positive")));
            }
            if i > 0 && v >= values[i - 1] {
                return Err(Error::parameter(format!(
                    "sigma schedule must be strictly decreasing (sigma[{i}] = {v} >= sigma[{}] = {})",
                    i - 1,
                    values[i - 1]
                )));
            }
        }
        Ok(SigmaSchedule { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::parameter(format!("sigma = {sigma} must be positive")));
    }
    Ok(())
}

/// `F_sigma(s) = sum_i exp(-s_i^2 / 2 sigma^2)`, in `(0, len(s)]`.
///
/// `len(s) - F_sigma(s)` is the smoothed count of nonzero entries.
pub fn smoothed_l0_value(s: &[f64], sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    Ok(s.iter().map(|&v| (-v * v * inv_two_sigma_sq).exp()).sum())
}

/// Entrywise `s_i * exp(-s_i^2 / 2 sigma^2)`.
///
/// This is `sigma^2` times the gradient of `m - F_sigma`; the `sigma^2`
/// factor is absorbed into the step size by convention, so the fixed-step
/// update `s - mu * direction` takes steps proportional to `mu * sigma^2`
/// against the true gradient.
pub fn smoothed_l0_ascent_direction(s: &[f64], sigma: f64) -> Result<Vec<f64>> {
    check_sigma(sigma)?;
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    Ok(s.iter().map(|&v| v * (-v * v * inv_two_sigma_sq).exp()).collect())
}

/// Geometric schedule starting at `2 * max|s_init|` with the given decay.
///
/// A zero initialization is degenerate: it is already maximally sparse and
/// the caller should short-circuit instead of building a schedule.
pub fn make_sigma_schedule(s_init: &[f64], n: usize, decay: f64) -> Result<SigmaSchedule> {
    if n < 1 {
        return Err(Error::parameter("schedule length must be at least 1"));
    }
    if !(decay > 0.0 && decay < 1.0) {
        return Err(Error::parameter(format!("decay = {decay} must lie in (0, 1)")));
    }
    let max_abs = s_init.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()));
    if max_abs == 0.0 {
        return Err(Error::Degenerate(
            "all-zero initialization: already maximally sparse".into(),
        ));
    }
    let first = 2.0 * max_abs;
    let values = (0..n).map(|k| first * decay.powi(k as i32)).collect();
    SigmaSchedule::new(values)
}

/// Step-size rule for the inner gradient loop. The fixed rule is the
/// default; backtracking halves the step until `F_sigma` does not decrease.
#[derive(Debug, Clone, Copy)]
pub enum StepRule {
    Fixed(f64),
    Backtracking { initial: f64, max_halvings: u32 },
}

impl StepRule {
    fn validate(&self) -> Result<()> {
        let mu = match self {
            StepRule::Fixed(mu) => *mu,
            StepRule::Backtracking { initial, .. } => *initial,
        };
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::parameter(format!("step size mu = {mu} must be positive")));
        }
        Ok(())
    }
}

/// Approximate sparsest solution of `phi * alpha = b`.
///
/// Starts from the minimum-l2-norm solution, then for each sigma performs
/// `l` gradient steps on the smoothed sparsity surrogate, each followed by
/// a projection back onto the solution set. The returned vector satisfies
/// `||b - phi alpha|| <= 1e-8 ||b||` regardless of recovery success.
pub fn sl0_solve<D: Dictionary>(
    phi: &D,
    b: &[f64],
    schedule: &SigmaSchedule,
    l: usize,
    mu: f64,
) -> Result<Vec<f64>> {
    sl0_solve_with_step(phi, b, schedule, l, StepRule::Fixed(mu))
}

/// [`sl0_solve`] with an explicit step rule (line-search hook).
pub fn sl0_solve_with_step<D: Dictionary>(
    phi: &D,
    b: &[f64],
    schedule: &SigmaSchedule,
    l: usize,
    step: StepRule,
) -> Result<Vec<f64>> {
    if l < 1 {
        return Err(Error::parameter("inner iteration count must be at least 1"));
    }
    step.validate()?;

    let pinv = Pseudoinverse::new(phi)?;
    let mut alpha = pinv.apply(b)?;

    for &sigma in schedule.values() {
        for _ in 0..l {
            let direction = smoothed_l0_ascent_direction(&alpha, sigma)?;
            let mu = effective_step(&alpha, &direction, sigma, step)?;
            linalg::axpy(-mu, &direction, &mut alpha);
            // Project back onto {alpha : phi alpha = b}.
            let synth = phi.forward(&alpha)?;
            let residual: Vec<f64> = b.iter().zip(&synth).map(|(bi, si)| bi - si).collect();
            let correction = pinv.apply(&residual)?;
            linalg::axpy(1.0, &correction, &mut alpha);
        }
    }
    Ok(alpha)
}

fn effective_step(alpha: &[f64], direction: &[f64], sigma: f64, step: StepRule) -> Result<f64> {
    match step {
        StepRule::Fixed(mu) => Ok(mu),
        StepRule::Backtracking { initial, max_halvings } => {
            let before = smoothed_l0_value(alpha, sigma)?;
            let mut mu = initial;
            for _ in 0..=max_halvings {
                let trial: Vec<f64> =
                    alpha.iter().zip(direction).map(|(a, d)| a - mu * d).collect();
                if smoothed_l0_value(&trial, sigma)? >= before {
                    return Ok(mu);
                }
                mu *= 0.5;
            }
            Ok(mu)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::DenseDictionary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn surrogate_of_zero_vector_counts_length() {
        assert_eq!(smoothed_l0_value(&[0.0, 0.0, 0.0], 1.0).unwrap(), 3.0);
    }

    #[test]
    fn surrogate_at_one_sigma() {
        for sigma in [0.3, 1.0, 7.5] {
            let v = smoothed_l0_value(&[sigma, 0.0], sigma).unwrap();
            let expected = (-0.5_f64).exp() + 1.0;
            assert!((v - expected).abs() < 1e-12, "sigma={sigma}: {v}");
        }
    }

    #[test]
    fn surrogate_approximates_zero_count_for_separated_entries() {
        let sigma = 0.01;
        // 10 entries, 3 of magnitude >= 100 sigma.
        let mut s = vec![0.0; 10];
        s[1] = 1.0;
        s[4] = -2.5;
        s[9] = 100.0 * sigma;
        let f = smoothed_l0_value(&s, sigma).unwrap();
        assert!((f - 7.0).abs() < 1e-3, "{f}");
    }

    #[test]
    fn surrogate_rejects_nonpositive_sigma() {
        assert!(matches!(smoothed_l0_value(&[1.0], 0.0), Err(Error::Parameter(_))));
        assert!(matches!(smoothed_l0_ascent_direction(&[1.0], -1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn surrogate_bounds_and_zero_equality() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let s: Vec<f64> = (0..8).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
            let f = smoothed_l0_value(&s, 0.7).unwrap();
            assert!(f > 0.0 && f <= 8.0);
            if s.iter().any(|&v| v != 0.0) {
                assert!(f < 8.0);
            }
        }
    }

    #[test]
    fn surrogate_is_monotone_in_sigma() {
        let s = [0.9, -0.1, 2.4, 0.0];
        let grid = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0];
        let mut prev = 0.0;
        for &sigma in &grid {
            let f = smoothed_l0_value(&s, sigma).unwrap();
            assert!(f > prev, "F must increase with sigma");
            prev = f;
        }
    }

    #[test]
    fn ascent_direction_examples() {
        assert!(smoothed_l0_ascent_direction(&[0.0, 0.0], 1.0)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        let sigma = 1.3;
        let d = smoothed_l0_ascent_direction(&[sigma], sigma).unwrap();
        assert!((d[0] - sigma * (-0.5_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn ascent_direction_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sigma = 0.8;
        let s: Vec<f64> = (0..6).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let direction = smoothed_l0_ascent_direction(&s, sigma).unwrap();
        let h = 1e-5;
        let m = s.len() as f64;
        for i in 0..s.len() {
            let mut plus = s.clone();
            plus[i] += h;
            let mut minus = s.clone();
            minus[i] -= h;
            let f_plus = m - smoothed_l0_value(&plus, sigma).unwrap();
            let f_minus = m - smoothed_l0_value(&minus, sigma).unwrap();
            let fd = sigma * sigma * (f_plus - f_minus) / (2.0 * h);
            let denom = fd.abs().max(1e-3);
            assert!(
                (direction[i] - fd).abs() / denom <= 1e-6,
                "entry {i}: analytic {} vs fd {fd}",
                direction[i]
            );
        }
    }

    #[test]
    fn ascent_direction_magnitude_is_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sigma = 0.4;
        let bound = sigma * (-0.5_f64).exp();
        for _ in 0..100 {
            let s: Vec<f64> = (0..10).map(|_| rng.gen::<f64>() * 20.0 - 10.0).collect();
            let d = smoothed_l0_ascent_direction(&s, sigma).unwrap();
            for v in d {
                assert!(v.abs() <= bound + 1e-15);
            }
        }
    }

    #[test]
    fn schedule_is_geometric_from_twice_max() {
        let sched = make_sigma_schedule(&[0.2, -1.0, 0.5], 5, 0.5).unwrap();
        assert_eq!(sched.values(), &[2.0, 1.0, 0.5, 0.25, 0.125]);
        let single = make_sigma_schedule(&[-3.0], 1, 0.9).unwrap();
        assert_eq!(single.values(), &[6.0]);
    }

    #[test]
    fn schedule_is_strictly_decreasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let s: Vec<f64> = (0..5).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            if s.iter().all(|&v| v == 0.0) {
                continue;
            }
            let decay = 0.1 + 0.8 * rng.gen::<f64>();
            let n = 1 + rng.gen_range(0..6);
            let sched = make_sigma_schedule(&s, n, decay).unwrap();
            for w in sched.values().windows(2) {
                assert!(w[1] < w[0]);
            }
        }
    }

    #[test]
    fn schedule_rejects_degenerate_and_bad_parameters() {
        assert!(matches!(make_sigma_schedule(&[0.0, 0.0], 3, 0.5), Err(Error::Degenerate(_))));
        assert!(matches!(make_sigma_schedule(&[1.0], 0, 0.5), Err(Error::Parameter(_))));
        assert!(matches!(make_sigma_schedule(&[1.0], 3, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn solve_square_identity_returns_rhs() {
        let eye = DenseDictionary::new(3, 3, vec![1., 0., 0., 0., 1., 0., 0., 0., 1.]).unwrap();
        let b = [0.4, -1.0, 2.0];
        let schedule = SigmaSchedule::new(vec![2.0, 1.0, 0.5]).unwrap();
        let alpha = sl0_solve(&eye, &b, &schedule, 10, 2.0).unwrap();
        for (a, want) in alpha.iter().zip(&b) {
            assert!((a - want).abs() < 1e-10);
        }
    }

    #[test]
    fn solve_zero_rhs_returns_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<f64> = (0..40).map(|_| rng.gen::<f64>() - 0.5).collect();
        let phi = DenseDictionary::new(4, 10, data).unwrap();
        let schedule = SigmaSchedule::new(vec![1.0, 0.5]).unwrap();
        let alpha = sl0_solve(&phi, &[0.0; 4], &schedule, 5, 2.0).unwrap();
        assert!(alpha.iter().all(|&v| v.abs() < 1e-14));
    }

    #[test]
    fn solve_output_is_always_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let data: Vec<f64> = (0..60).map(|_| rng.gen::<f64>() - 0.5).collect();
            let phi = DenseDictionary::new(5, 12, data).unwrap();
            let b: Vec<f64> = (0..5).map(|_| rng.gen::<f64>() - 0.5).collect();
            let schedule = make_sigma_schedule(&[1.0], 4, 0.5).unwrap();
            let alpha = sl0_solve(&phi, &b, &schedule, 3, 2.0).unwrap();
            let synth = phi.forward(&alpha).unwrap();
            let res: Vec<f64> = b.iter().zip(&synth).map(|(x, y)| x - y).collect();
            assert!(linalg::norm2(&res) <= 1e-8 * linalg::norm2(&b));
        }
    }

    #[test]
    fn solve_rejects_bad_parameters() {
        let eye = DenseDictionary::new(2, 2, vec![1., 0., 0., 1.]).unwrap();
        let schedule = SigmaSchedule::new(vec![1.0]).unwrap();
        assert!(matches!(
            sl0_solve(&eye, &[1.0, 1.0], &schedule, 0, 2.0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            sl0_solve(&eye, &[1.0, 1.0], &schedule, 3, 0.0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn backtracking_step_rule_is_also_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let data: Vec<f64> = (0..60).map(|_| rng.gen::<f64>() - 0.5).collect();
        let phi = DenseDictionary::new(5, 12, data).unwrap();
        let b: Vec<f64> = (0..5).map(|_| rng.gen::<f64>() - 0.5).collect();
        let schedule = make_sigma_schedule(&[1.0], 4, 0.5).unwrap();
        let alpha = sl0_solve_with_step(
            &phi,
            &b,
            &schedule,
            3,
            StepRule::Backtracking { initial: 2.0, max_halvings: 4 },
        )
        .unwrap();
        let synth = phi.forward(&alpha).unwrap();
        let res: Vec<f64> = b.iter().zip(&synth).map(|(x, y)| x - y).collect();
        assert!(linalg::norm2(&res) <= 1e-8 * linalg::norm2(&b));
    }
}
