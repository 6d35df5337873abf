//! Norm identities for matrices with unimodular entries, and the ℓ1 floor
//! obtained from ℓ2 and ℓ4 norms.
//!
//! For `B ∈ ℂ^{q×r}` with `|B_{j,k}| = 1` and any `x`:
//!
//! ```text
//! ‖Bx‖₂² = q‖x‖₂² + Σ_{k≠k'} G_{k,k'} conj(x_k) x_k'            G_{k,k'} = Σ_j conj(B_jk) B_jk'
//! ‖Bx‖₄⁴ = 2‖x‖₂²‖Bx‖₂² − q‖x‖₄⁴ + Σ₁
//!        = 2‖x‖₂²‖Bx‖₂² − q‖x‖₄⁴ + Σ_{k≠k'} (Σ_j conj(B_jk)² B_jk'²) conj(x_k)² x_k'² + Σ₂
//! ```
//!
//! `Σ₁` runs over ordered pairs `(k,k')`, `(ℓ,ℓ')` of distinct indices with
//! `(k,k') ≠ (ℓ,ℓ')`; `Σ₂` additionally excludes `(k,k') = (ℓ',ℓ)`. The
//! functions here enumerate those index sets literally and serve as oracles.

use crate::error::{Error, Result};
use crate::matrix::{norm, norm_pow, Matrix, Vector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Entries must satisfy `||B_jk| - 1| <= UNIMODULAR_TOL`.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// Column limit for the quartic `Σ₁`/`Σ₂` enumeration.
pub const MAX_QUARTIC_COLS: usize = 32;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub direct_value: f64,
    pub formula_value: f64,
    pub abs_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma1: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<Complex64>,
    /// Second route through the squared-pair sum and `Σ₂` (ℓ4 identity only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula_bis_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_gap_bis: Option<f64>,
}

impl IdentityReport {
    /// Largest of the reported gaps.
    pub fn max_gap(&self) -> f64 {
        self.abs_gap.max(self.abs_gap_bis.unwrap_or(0.0))
    }
}

pub fn check_unimodular(b: &Matrix) -> Result<()> {
    for j in 0..b.rows() {
        for (k, z) in b.row(j).iter().enumerate() {
            if (z.norm() - 1.0).abs() > UNIMODULAR_TOL {
                return Err(Error::NotUnimodular { row: j, col: k });
            }
        }
    }
    Ok(())
}

fn check_len(b: &Matrix, x: &Vector) -> Result<()> {
    if x.len() != b.cols() {
        return Err(Error::DimensionMismatch {
            expected: b.cols(),
            found: x.len(),
        });
    }
    Ok(())
}

/// Deterministic pairwise summation.
fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => ZERO,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Columns of `B` as contiguous vectors.
fn columns(b: &Matrix) -> Vec<Vec<Complex64>> {
    (0..b.cols()).map(|k| b.column(k)).collect()
}

pub fn l2_identity(b: &Matrix, x: &Vector) -> Result<IdentityReport> {
    check_unimodular(b)?;
    check_len(b, x)?;
    let q = b.rows() as f64;
    let xs = x.entries();
    let direct = norm_pow(b.matvec(x)?.entries(), 2);
    let cols = columns(b);
    let mut terms = Vec::new();
    for (k, ck) in cols.iter().enumerate() {
        for (kk, ckk) in cols.iter().enumerate() {
            if k != kk {
                let g: Complex64 = ck.iter().zip(ckk).map(|(a, c)| a.conj() * c).sum();
                terms.push(g * xs[k].conj() * xs[kk]);
            }
        }
    }
    let formula = q * norm_pow(xs, 2) + pairwise_sum(&terms).re;
    Ok(IdentityReport {
        direct_value: direct,
        formula_value: formula,
        abs_gap: (direct - formula).abs(),
        sigma1: None,
        sigma2: None,
        formula_bis_value: None,
        abs_gap_bis: None,
    })
}

/// `(Σ₁, Σ₂)` by literal enumeration of ordered pairs of ordered pairs.
pub fn quartic_sums(b: &Matrix, x: &Vector) -> Result<(Complex64, Complex64)> {
    check_len(b, x)?;
    let r = b.cols();
    if r > MAX_QUARTIC_COLS {
        return Err(Error::TooManyColumns {
            cols: r,
            max: MAX_QUARTIC_COLS,
        });
    }
    let cols = columns(b);
    let xs = x.entries();
    let pairs: Vec<(usize, usize)> = (0..r)
        .flat_map(|k| (0..r).filter(move |&kk| kk != k).map(move |kk| (k, kk)))
        .collect();
    // v_{k,k'}[j] = conj(B_jk) B_jk'; then B_jl conj(B_jl') = conj(v_{l,l'}[j]).
    let pair_vecs: Vec<Vec<Complex64>> = pairs
        .iter()
        .map(|&(k, kk)| cols[k].iter().zip(&cols[kk]).map(|(a, c)| a.conj() * c).collect())
        .collect();
    let partial: Vec<(Complex64, Complex64)> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, &(k, kk))| {
            let mut s1 = Vec::with_capacity(pairs.len());
            let mut s2 = Vec::with_capacity(pairs.len());
            for (i2, &(l, ll)) in pairs.iter().enumerate() {
                if (k, kk) == (l, ll) {
                    continue;
                }
                let four: Complex64 = pair_vecs[i].iter().zip(&pair_vecs[i2]).map(|(a, c)| a * c.conj()).sum();
                let term = four * xs[k].conj() * xs[kk] * xs[l] * xs[ll].conj();
                s1.push(term);
                if (k, kk) != (ll, l) {
                    s2.push(term);
                }
            }
            (pairwise_sum(&s1), pairwise_sum(&s2))
        })
        .collect();
    let s1: Vec<_> = partial.iter().map(|t| t.0).collect();
    let s2: Vec<_> = partial.iter().map(|t| t.1).collect();
    Ok((pairwise_sum(&s1), pairwise_sum(&s2)))
}

/// `Σ₁` in `O(qr)` through `S_j = |(Bx)_j|² − ‖x‖₂²` and `Σ_j S_j² = q(‖x‖₂⁴ − ‖x‖₄⁴) + Σ₁`.
pub fn sigma1_fast(b: &Matrix, x: &Vector) -> Result<f64> {
    check_unimodular(b)?;
    let bx = b.matvec(x)?;
    let x2 = norm_pow(x.entries(), 2);
    let x4 = norm_pow(x.entries(), 4);
    let sum_sq: f64 = bx.entries().iter().map(|z| (z.norm_sqr() - x2).powi(2)).sum();
    Ok(sum_sq - b.rows() as f64 * (x2 * x2 - x4))
}

pub fn l4_identity(b: &Matrix, x: &Vector) -> Result<IdentityReport> {
    check_unimodular(b)?;
    check_len(b, x)?;
    let (sigma1, sigma2) = quartic_sums(b, x)?;
    let q = b.rows() as f64;
    let xs = x.entries();
    let bx = b.matvec(x)?;
    let direct = norm_pow(bx.entries(), 4);
    let base = 2.0 * norm_pow(xs, 2) * norm_pow(bx.entries(), 2) - q * norm_pow(xs, 4);
    let formula = base + sigma1.re;

    let cols = columns(b);
    let mut squared_pairs = Vec::new();
    for (k, ck) in cols.iter().enumerate() {
        for (kk, ckk) in cols.iter().enumerate() {
            if k != kk {
                let g: Complex64 = ck.iter().zip(ckk).map(|(a, c)| (a.conj() * c).powu(2)).sum();
                squared_pairs.push(g * xs[k].conj().powu(2) * xs[kk].powu(2));
            }
        }
    }
    let bis = base + pairwise_sum(&squared_pairs).re + sigma2.re;
    Ok(IdentityReport {
        direct_value: direct,
        formula_value: formula,
        abs_gap: (direct - formula).abs(),
        sigma1: Some(sigma1),
        sigma2: Some(sigma2),
        formula_bis_value: Some(bis),
        abs_gap_bis: Some((direct - bis).abs()),
    })
}

/// `‖y‖₂³ / ‖y‖₄²`, a lower bound on `‖y‖₁`.
pub fn holder_floor(y: &Vector) -> Result<f64> {
    if y.is_zero() {
        return Err(Error::ZeroVector);
    }
    let l2 = y.norm(2.0);
    let l4sq = norm_pow(y.entries(), 4).sqrt();
    Ok(l2.powi(3) / l4sq)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingRatios {
    pub r1: f64,
    pub r2: f64,
    pub r4: f64,
}

/// `‖Ax‖_e / ‖x‖₂` for `e ∈ {1, 2, 4}`.
pub fn embedding_ratios(a: &Matrix, x: &Vector) -> Result<EmbeddingRatios> {
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let y = a.matvec(x)?;
    let nx = x.norm(2.0);
    Ok(EmbeddingRatios {
        r1: norm(y.entries(), 1.0) / nx,
        r2: norm(y.entries(), 2.0) / nx,
        r4: norm(y.entries(), 4.0) / nx,
    })
}
