//! Sparse recovery by iterative hard thresholding.
//!
//! `x ← H_s(x + μ A*(y − Ax))` with `μ = 1/‖A‖₂²` and `H_s` keeping the `s`
//! entries of largest modulus (ties resolved toward the lower index).

use crate::error::{Error, Result};
use crate::matrix::{norm, Field, Matrix, Vector};
use crate::seed;
use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use serde::Serialize;

const POWER_ITERS: usize = 500;
const POWER_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryResult {
    pub estimate: Vector,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

impl RecoveryResult {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }
}

/// `‖A‖₂²` by power iteration on `A*A` from the all-ones vector.
pub fn spectral_norm_sq(a: &Matrix) -> f64 {
    let n = a.cols();
    let mut v = Vector::new(a.field(), vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]);
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERS {
        let w = a.adjoint_matvec(&a.matvec(&v).expect("shape")).expect("shape");
        let next = w.norm(2.0);
        if next == 0.0 {
            return 0.0;
        }
        let done = (next - lambda).abs() <= POWER_TOL * next;
        lambda = next;
        v = Vector::new(w.field(), w.entries().iter().map(|z| z / next).collect());
        if done {
            break;
        }
    }
    lambda
}

/// Zeroes all but the `s` largest-modulus entries; equal moduli keep the lower index.
pub fn hard_threshold(x: &mut [Complex64], s: usize) {
    if s >= x.len() {
        return;
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[j].norm_sqr().total_cmp(&x[i].norm_sqr()).then(i.cmp(&j)));
    for &i in &order[s..] {
        x[i] = Complex64::new(0.0, 0.0);
    }
}

pub fn iht(a: &Matrix, y: &Vector, s: usize, max_iter: usize, tol: f64) -> Result<RecoveryResult> {
    if y.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: y.len(),
        });
    }
    if let Some(k) = a.column_norms().iter().position(|&c| c == 0.0) {
        return Err(Error::ZeroColumn(k));
    }
    let field = a.field().join(y.field());
    let y_norm = y.norm(2.0);
    let mut x = Vector::zeros(field, a.cols());
    let mut history = vec![y_norm];
    if s == 0 || y_norm == 0.0 {
        return Ok(RecoveryResult {
            estimate: x,
            iterations: usize::from(s > 0),
            residual_history: history,
            converged: y_norm == 0.0,
        });
    }
    let mu = 1.0 / spectral_norm_sq(a);
    let mut residual: Vec<Complex64> = y.entries().to_vec();
    for iter in 1..=max_iter {
        let grad = a.adjoint_matvec(&Vector::new(field, residual))?;
        let mut next: Vec<Complex64> = x
            .entries()
            .iter()
            .zip(grad.entries())
            .map(|(xi, g)| xi + g * mu)
            .collect();
        hard_threshold(&mut next, s);
        x = Vector::new(field, next);
        let ax = a.matvec(&x)?;
        residual = y.entries().iter().zip(ax.entries()).map(|(yi, v)| yi - v).collect();
        let r = norm(&residual, 2.0);
        history.push(r);
        if r <= tol * y_norm {
            return Ok(RecoveryResult {
                estimate: x,
                iterations: iter,
                residual_history: history,
                converged: true,
            });
        }
    }
    Ok(RecoveryResult {
        estimate: x,
        iterations: max_iter,
        residual_history: history,
        converged: false,
    })
}

/// Random `s`-sparse vector: uniform support, Gaussian values.
pub fn random_sparse(field: Field, n: usize, s: usize, rng: &mut impl Rng) -> Vector {
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut support = index::sample(rng, n, s.min(n)).into_vec();
    support.sort_unstable();
    for i in support {
        x[i] = match field {
            Field::Real => Complex64::new(seed::gaussian(rng), 0.0),
            Field::Complex => seed::complex_gaussian(rng),
        };
    }
    Vector::new(field, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials: u64,
    pub successes: u64,
    pub max_rel_error_success: f64,
    pub mean_iterations: f64,
}

/// Noiseless trials `y = A x₀`; a success has `‖x̂ − x₀‖₂ ≤ rel_tol·‖x₀‖₂`.
/// Trial `t` draws `x₀` from sub-seed `derive(seed, t)`.
pub fn recovery_trials(
    a: &Matrix,
    s: usize,
    trials: u64,
    seed: u64,
    max_iter: usize,
    tol: f64,
    rel_tol: f64,
) -> Result<TrialSummary> {
    use rayon::prelude::*;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(seed::derive(seed, t));
            let x0 = random_sparse(a.field(), a.cols(), s, &mut rng);
            let y = a.matvec(&x0)?;
            let r = iht(a, &y, s, max_iter, tol)?;
            let err = norm(
                &r.estimate
                    .entries()
                    .iter()
                    .zip(x0.entries())
                    .map(|(u, v)| u - v)
                    .collect::<Vec<_>>(),
                2.0,
            ) / x0.norm(2.0);
            Ok((err, r.iterations))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut successes = 0;
    let mut max_err: f64 = 0.0;
    for &(err, _) in &outcomes {
        if err <= rel_tol {
            successes += 1;
            max_err = max_err.max(err);
        }
    }
    let mean_iterations = outcomes.iter().map(|o| o.1 as f64).sum::<f64>() / trials.max(1) as f64;
    Ok(TrialSummary {
        trials,
        successes,
        max_rel_error_success: max_err,
        mean_iterations,
    })
}
