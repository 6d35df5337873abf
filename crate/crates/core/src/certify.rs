//! Certification of measurement matrices.
//!
//! For sign matrices `A ∈ {±1}^{m×N}` two conditions certify the ℓ2 → ℓ1
//! restricted isometry on `s`-sparse vectors:
//!
//! * (a) `|Σ_j A_jk A_jk'| ≤ κ√m` for all distinct `k, k'`,
//! * (b) `|Σ_j A_jk A_jk' A_jℓ A_jℓ'| ≤ κ√m` for all distinct `k, k', ℓ, ℓ'`.
//!
//! When both hold and `m ≥ κ²δ⁻²s⁴`, every `s`-sparse `x` satisfies
//! `α m ‖x‖₂ ≤ ‖Ax‖₁ ≤ β m ‖x‖₂` with the constants of [`theorem1_bound`].
//! Sums of signs are exact integers, so the checks carry no tolerance.
//!
//! Empirical probes ([`probe_l1`]) only ever yield a lower bound on the true
//! distortion and are reported as such.

use crate::constructors::rademacher;
use crate::error::{Error, Result};
use crate::matrix::{Field, Matrix, Meta};
use crate::seed;
use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;

/// Subset count limit for [`exact_ric`].
pub const MAX_RIC_SUBSETS: u128 = 1_000_000;

/// Largest `|⟨a_j, a_ℓ⟩|` over distinct unit-normalized columns.
pub fn coherence(a: &Matrix) -> Result<f64> {
    if a.cols() < 2 {
        return Err(Error::InvalidArgument("coherence needs at least two columns".into()));
    }
    let a = a.normalize_columns()?;
    let cols: Vec<Vec<Complex64>> = (0..a.cols()).map(|k| a.column(k)).collect();
    Ok((0..cols.len())
        .into_par_iter()
        .map(|j| {
            cols[j + 1..]
                .iter()
                .map(|c| {
                    cols[j]
                        .iter()
                        .zip(c)
                        .map(|(x, y)| x.conj() * y)
                        .sum::<Complex64>()
                        .norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max))
}

/// `κ = √(8 ln N)`, which makes a Rademacher draw fail (a) or (b) with probability at most 1/3.
pub fn default_kappa(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("default kappa needs N >= 2, got {n}")));
    }
    Ok((8.0 * (n as f64).ln()).sqrt())
}

/// Column-major ±1 entries.
struct SignColumns {
    m: usize,
    cols: Vec<Vec<i8>>,
}

impl SignColumns {
    fn new(a: &Matrix) -> Result<Self> {
        let mut cols = vec![Vec::with_capacity(a.rows()); a.cols()];
        for j in 0..a.rows() {
            for (k, z) in a.row(j).iter().enumerate() {
                let s = match (z.re, z.im) {
                    (re, im) if re == 1.0 && im == 0.0 => 1,
                    (re, im) if re == -1.0 && im == 0.0 => -1,
                    _ => return Err(Error::NotSignMatrix { row: j, col: k }),
                };
                cols[k].push(s);
            }
        }
        Ok(Self { m: a.rows(), cols })
    }

    fn threshold(&self, kappa: f64) -> f64 {
        kappa * (self.m as f64).sqrt()
    }
}

fn dot(a: &[i8], b: &[i8]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| (x * y) as i32).sum::<i32>() as i64
}

fn hadamard(a: &[i8], b: &[i8]) -> Vec<i8> {
    a.iter().zip(b).map(|(&x, &y)| x * y).collect()
}

/// Larger sum wins; ties go to the lexicographically smaller witness.
fn better<const K: usize>(a: (i64, [usize; K]), b: (i64, [usize; K])) -> (i64, [usize; K]) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck<const K: usize> {
    pub pass: bool,
    pub max_sum: i64,
    /// Column indices attaining `max_sum`; `None` when the condition is vacuous.
    pub witness: Option<[usize; K]>,
    pub threshold: f64,
}

pub type PairCheck = ConditionCheck<2>;
pub type QuadCheck = ConditionCheck<4>;

fn pair_check(s: &SignColumns, kappa: f64) -> PairCheck {
    let n = s.cols.len();
    let threshold = s.threshold(kappa);
    let best = (0..n)
        .into_par_iter()
        .flat_map_iter(|k| (k + 1..n).map(move |kk| (k, kk)))
        .map(|(k, kk)| (dot(&s.cols[k], &s.cols[kk]).abs(), [k, kk]))
        .reduce_with(better);
    ConditionCheck {
        pass: best.is_none_or(|b| b.0 as f64 <= threshold),
        max_sum: best.map_or(0, |b| b.0),
        witness: best.map(|b| b.1),
        threshold,
    }
}

fn quad_check(s: &SignColumns, kappa: f64) -> QuadCheck {
    let n = s.cols.len();
    let threshold = s.threshold(kappa);
    // products of column pairs, indexed by (k, k') with k < k'
    let pair_index = |k: usize, kk: usize| k * n + kk;
    let mut products = vec![Vec::new(); n * n];
    for k in 0..n {
        for kk in k + 1..n {
            products[pair_index(k, kk)] = hadamard(&s.cols[k], &s.cols[kk]);
        }
    }
    // Sign products are symmetric in their four indices, so sorted 4-subsets suffice.
    let best = (0..n)
        .into_par_iter()
        .filter_map(|k| {
            let mut best: Option<(i64, [usize; 4])> = None;
            for kk in k + 1..n {
                let left = &products[pair_index(k, kk)];
                for l in kk + 1..n {
                    for ll in l + 1..n {
                        let v = dot(left, &products[pair_index(l, ll)]).abs();
                        let cand = (v, [k, kk, l, ll]);
                        best = Some(best.map_or(cand, |b| better(b, cand)));
                    }
                }
            }
            best
        })
        .reduce_with(better);
    ConditionCheck {
        pass: best.is_none_or(|b| b.0 as f64 <= threshold),
        max_sum: best.map_or(0, |b| b.0),
        witness: best.map(|b| b.1),
        threshold,
    }
}

/// Condition (a): exact pair sums against `κ√m`.
pub fn condition_a(a: &Matrix, kappa: f64) -> Result<PairCheck> {
    Ok(pair_check(&SignColumns::new(a)?, kappa))
}

/// Condition (b): exact quadruple sums over all 4-subsets, `O(N⁴m)`.
/// Vacuous (pass, max 0) when `N < 4`.
pub fn condition_b(a: &Matrix, kappa: f64) -> Result<QuadCheck> {
    Ok(quad_check(&SignColumns::new(a)?, kappa))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem1Bound {
    pub m_required: u64,
    /// Distortion `β/α`.
    pub gamma: f64,
    /// Lower constant per unit `m`: `((1-δ)³ / (3(1+δ)))^{1/2}`.
    pub alpha: f64,
    /// Upper constant per unit `m`: `(1+δ)^{1/2}`.
    pub beta: f64,
}

pub fn theorem1_bound(kappa: f64, delta: f64, s: u64) -> Result<Theorem1Bound> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidDelta(delta));
    }
    if s == 0 || kappa.is_nan() || kappa <= 0.0 {
        return Err(Error::InvalidArgument("need s >= 1 and kappa > 0".into()));
    }
    let m_required = (kappa * kappa / (delta * delta) * (s as f64).powi(4)).ceil() as u64;
    let alpha = ((1.0 - delta).powi(3) / (3.0 * (1.0 + delta))).sqrt();
    let beta = (1.0 + delta).sqrt();
    Ok(Theorem1Bound {
        m_required,
        gamma: beta / alpha,
        alpha,
        beta,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CertReport {
    pub m: usize,
    pub n: usize,
    pub coherence: f64,
    pub kappa: f64,
    /// `κ√m`.
    pub threshold: f64,
    pub max_pair_sum: i64,
    pub pair_witness: Option<[usize; 2]>,
    pub max_quad_sum: i64,
    pub quad_witness: Option<[usize; 4]>,
    pub cond_a_pass: bool,
    pub cond_b_pass: bool,
    pub delta: f64,
    pub s: u64,
    pub m_required: u64,
    /// `m >= m_required`, i.e. the sparsity level `s` is covered.
    pub m_sufficient: bool,
    pub distortion_bound: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Optional user acceptance threshold on the distortion bound.
    pub gamma_threshold: Option<f64>,
    /// Conditions (a) and (b) hold, `m` is sufficient, and the distortion meets the threshold if given.
    pub certified: bool,
}

impl CertReport {
    pub fn conditions_pass(&self) -> bool {
        self.cond_a_pass && self.cond_b_pass
    }
}

/// Runs (a), (b) and the distortion arithmetic on a sign matrix.
pub fn certify_sign_matrix(
    a: &Matrix,
    kappa: Option<f64>,
    delta: f64,
    s: u64,
    gamma_threshold: Option<f64>,
) -> Result<CertReport> {
    let signs = SignColumns::new(a)?;
    let kappa = match kappa {
        Some(k) => k,
        None => default_kappa(a.cols())?,
    };
    let bound = theorem1_bound(kappa, delta, s)?;
    let ca = pair_check(&signs, kappa);
    let cb = quad_check(&signs, kappa);
    let coherence = if a.cols() >= 2 { coherence(a)? } else { 0.0 };
    let m_sufficient = a.rows() as u64 >= bound.m_required;
    let within = gamma_threshold.is_none_or(|g| bound.gamma <= g);
    Ok(CertReport {
        m: a.rows(),
        n: a.cols(),
        coherence,
        kappa,
        threshold: ca.threshold,
        max_pair_sum: ca.max_sum,
        pair_witness: ca.witness,
        max_quad_sum: cb.max_sum,
        quad_witness: cb.witness,
        cond_a_pass: ca.pass,
        cond_b_pass: cb.pass,
        delta,
        s,
        m_required: bound.m_required,
        m_sufficient,
        distortion_bound: bound.gamma,
        alpha: bound.alpha,
        beta: bound.beta,
        gamma_threshold,
        certified: ca.pass && cb.pass && m_sufficient && within,
    })
}

#[derive(Debug, Clone)]
pub struct LasVegasOutcome {
    pub matrix: Matrix,
    pub rounds_used: u64,
    pub kappa: f64,
    pub max_pair_sum: i64,
    pub max_quad_sum: i64,
}

/// Draws Rademacher matrices until one satisfies (a) and (b).
///
/// Round `t` (1-based) uses seed `derive(seed, t)`, so the returned matrix
/// depends only on the arguments.
pub fn las_vegas(m: usize, n: usize, kappa: Option<f64>, max_rounds: u64, seed: u64) -> Result<LasVegasOutcome> {
    if max_rounds == 0 {
        return Err(Error::InvalidArgument("max_rounds must be >= 1".into()));
    }
    let kappa = match kappa {
        Some(k) => k,
        None => default_kappa(n)?,
    };
    // (worst sum, round, pair sum, quad sum)
    let mut best: Option<(i64, u64, i64, i64)> = None;
    let mut threshold = 0.0;
    for t in 1..=max_rounds {
        let sub = seed::derive(seed, t);
        let a = rademacher(m, n, sub)?;
        let signs = SignColumns::new(&a)?;
        let ca = pair_check(&signs, kappa);
        let cb = quad_check(&signs, kappa);
        threshold = ca.threshold;
        if ca.pass && cb.pass {
            let meta = Meta::new("las_vegas")
                .param("m", m)
                .param("N", n)
                .param("kappa", kappa)
                .param("round", t)
                .param("sub_seed", sub)
                .param("mixer", seed::MIXER)
                .param("rng", "chacha8")
                .param("max_pair_sum", ca.max_sum)
                .param("max_quad_sum", cb.max_sum)
                .with_seed(seed);
            return Ok(LasVegasOutcome {
                matrix: a.with_meta(meta),
                rounds_used: t,
                kappa,
                max_pair_sum: ca.max_sum,
                max_quad_sum: cb.max_sum,
            });
        }
        let worst = ca.max_sum.max(cb.max_sum);
        if best.is_none_or(|b| worst < b.0) {
            best = Some((worst, t, ca.max_sum, cb.max_sum));
        }
    }
    let (_, best_round, max_pair_sum, max_quad_sum) = best.expect("at least one round ran");
    Err(Error::RoundsExhausted {
        rounds: max_rounds,
        best_round,
        max_pair_sum,
        max_quad_sum,
        threshold,
    })
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Restricted isometry constant `δ_s` of the column-normalized matrix: the
/// largest `|λ - 1|` over eigenvalues `λ` of every `s × s` Gram submatrix.
pub fn exact_ric(a: &Matrix, s: usize) -> Result<f64> {
    let n = a.cols();
    if s == 0 || s > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= s <= N, got s = {s}, N = {n}"
        )));
    }
    let subsets = binomial(n as u128, s as u128);
    if subsets > MAX_RIC_SUBSETS {
        return Err(Error::TooLarge(format!(
            "C({n}, {s}) = {subsets} subsets exceeds {MAX_RIC_SUBSETS}"
        )));
    }
    let a = a.normalize_columns()?;
    let cols: Vec<Vec<Complex64>> = (0..n).map(|k| a.column(k)).collect();
    let gram: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|i| {
            let (r, c) = (i / n, i % n);
            cols[r].iter().zip(&cols[c]).map(|(x, y)| x.conj() * y).sum()
        })
        .collect();
    Ok((0..n)
        .combinations(s)
        .par_bridge()
        .map(|subset| {
            let g = DMatrix::from_fn(s, s, |r, c| gram[subset[r] * n + subset[c]]);
            g.symmetric_eigenvalues()
                .iter()
                .map(|&l| (l - 1.0).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub trials: u64,
    pub s: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio`: a lower bound on the true distortion, never a certificate.
    pub empirical_distortion: f64,
    pub bound_kind: &'static str,
}

/// Samples `s`-sparse vectors (uniform support, Gaussian nonzeros) and records
/// the extremes of `‖Ax‖₁ / ‖x‖₂`. Trial `t` draws from `derive(seed, t)`.
pub fn probe_l1(a: &Matrix, s: usize, trials: u64, seed: u64) -> Result<ProbeReport> {
    let n = a.cols();
    if s == 0 || s > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= s <= N, got s = {s}, N = {n}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let field = a.field();
    let (min_ratio, max_ratio) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(seed::derive(seed, t));
            let support = sample(&mut rng, n, s).into_vec();
            let values: Vec<Complex64> = (0..s)
                .map(|_| match field {
                    Field::Real => Complex64::new(seed::gaussian(&mut rng), 0.0),
                    Field::Complex => seed::complex_gaussian(&mut rng),
                })
                .collect();
            let nx = values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let l1: f64 = (0..a.rows())
                .map(|j| {
                    support
                        .iter()
                        .zip(&values)
                        .map(|(&k, v)| a.get(j, k) * v)
                        .sum::<Complex64>()
                        .norm()
                })
                .sum();
            let r = l1 / nx;
            (r, r)
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |x, y| (x.0.min(y.0), x.1.max(y.1)),
        );
    Ok(ProbeReport {
        trials,
        s,
        min_ratio,
        max_ratio,
        empirical_distortion: max_ratio / min_ratio,
        bound_kind: "lower bound on the true distortion",
    })
}
