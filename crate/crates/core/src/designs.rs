//! Weighted spherical designs and their relation to isometric embeddings
//! `ℓ2ⁿ → ℓ_{2k}^N`.
//!
//! With `δ = δ_{n,2k} = ∫ |⟨x,y⟩|^{2k} dσ(y)` and the distribution tensor
//! `D = ∫ ⊗^k(y ⊗ ȳ) dσ(y)`, every weighted point set satisfies
//!
//! ```text
//! ‖Σ τ_i ⊗^k(x_i ⊗ x̄_i) − D‖² = Σ_{i,j} τ_i τ_j |⟨x_i,x_j⟩|^{2k} − δ ≥ 0
//! ```
//!
//! so the defect is computed from the Gram sum and `D` is never materialized
//! (except for `k = 1`, where `D = I/n`, as an independent check).

use crate::error::{Error, Result};
use crate::matrix::{Field, Matrix, Meta};
use crate::seed;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

/// Tolerance on unit norms and on the weight total.
pub const POINT_SET_TOL: f64 = 1e-12;

/// Samples per Monte Carlo block; each block has its own sub-seed.
const MC_BLOCK: u64 = 1 << 16;

/// `δ_{n,2k}`: `(2k−1)!!/(n(n+2)⋯(n+2k−2))` over ℝ, `k!/(n(n+1)⋯(n+k−1))` over ℂ.
pub fn delta_closed_form(n: u32, k: u32, field: Field) -> f64 {
    assert!(n >= 1 && k >= 1, "need n, k >= 1");
    let n = n as f64;
    (0..k)
        .map(|i| {
            let i = i as f64;
            match field {
                Field::Real => (2.0 * i + 1.0) / (n + 2.0 * i),
                Field::Complex => (i + 1.0) / (n + i),
            }
        })
        .product()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Averages `|⟨e_1, y⟩|^{2k}` over uniform `y` on the sphere (normalized Gaussians).
pub fn delta_monte_carlo(n: u32, k: u32, field: Field, samples: u64, seed: u64) -> Result<MonteCarloEstimate> {
    if samples < 1000 {
        return Err(Error::InvalidArgument(format!(
            "need at least 1000 samples, got {samples}"
        )));
    }
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument("need n, k >= 1".into()));
    }
    let blocks = samples.div_ceil(MC_BLOCK);
    let partial: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = seed::rng(seed::derive(seed, b));
            let count = MC_BLOCK.min(samples - b * MC_BLOCK);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let mut first = 0.0;
                let mut total = 0.0;
                for i in 0..n {
                    let sq = match field {
                        Field::Real => seed::gaussian(&mut rng).powi(2),
                        Field::Complex => seed::complex_gaussian(&mut rng).norm_sqr(),
                    };
                    if i == 0 {
                        first = sq;
                    }
                    total += sq;
                }
                let v = (first / total).powi(k as i32);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let count = samples as f64;
    let mean = sum / count;
    let var = ((sum_sq - count * mean * mean) / (count - 1.0)).max(0.0);
    Ok(MonteCarloEstimate {
        estimate: mean,
        stderr: (var / count).sqrt(),
        samples,
    })
}

/// Unit vectors `x_i` with nonnegative weights `τ_i` summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPointSet {
    field: Field,
    dim: usize,
    points: Vec<Vec<Complex64>>,
    weights: Vec<f64>,
}

impl WeightedPointSet {
    pub fn new(field: Field, points: Vec<Vec<Complex64>>, weights: Vec<f64>) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidPointSet(msg));
        if points.is_empty() {
            return invalid("no points".into());
        }
        if points.len() != weights.len() {
            return invalid(format!("{} points but {} weights", points.len(), weights.len()));
        }
        let dim = points[0].len();
        if dim == 0 {
            return invalid("points must have dimension >= 1".into());
        }
        for (i, x) in points.iter().enumerate() {
            if x.len() != dim {
                return invalid(format!("point {i} has dimension {}, expected {dim}", x.len()));
            }
            let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (nrm - 1.0).abs() > POINT_SET_TOL {
                return invalid(format!("point {i} has norm {nrm}"));
            }
            if field == Field::Real && x.iter().any(|z| z.im != 0.0) {
                return invalid(format!("point {i} is not real"));
            }
        }
        if let Some(i) = weights.iter().position(|&t| t.is_nan() || t < 0.0) {
            return invalid(format!("weight {i} is negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > POINT_SET_TOL {
            return invalid(format!("weights sum to {total}"));
        }
        Ok(Self {
            field,
            dim,
            points,
            weights,
        })
    }

    pub fn uniform(field: Field, points: Vec<Vec<Complex64>>) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        let weights = vec![w; points.len()];
        Self::new(field, points, weights)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Points as matrix rows; weights travel in `meta.params.weights`.
    pub fn to_matrix(&self) -> Matrix {
        let data = self.points.iter().flatten().copied().collect();
        let meta = Meta::new("point_set").param("weights", self.weights.clone());
        Matrix::from_entries(self.field, self.len(), self.dim, data)
            .expect("point set shape is consistent")
            .with_meta(meta)
    }

    /// Inverse of [`to_matrix`](Self::to_matrix); missing weights mean uniform.
    pub fn from_matrix(a: &Matrix) -> Result<Self> {
        let points = (0..a.rows()).map(|j| a.row(j).to_vec()).collect();
        match a.meta().params.get("weights") {
            None => Self::uniform(a.field(), points),
            Some(Value::Array(ws)) => {
                let weights = ws
                    .iter()
                    .map(|w| {
                        w.as_f64()
                            .ok_or_else(|| Error::InvalidPointSet("non-numeric weight".into()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::new(a.field(), points, weights)
            }
            Some(_) => Err(Error::InvalidPointSet("weights must be an array".into())),
        }
    }
}

fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

/// `Σ_{i,j} τ_i τ_j |⟨x_i,x_j⟩|^{2k}`.
pub fn frame_potential(ps: &WeightedPointSet, k: u32) -> f64 {
    let rows: Vec<f64> = (0..ps.len())
        .into_par_iter()
        .map(|i| {
            let xi = &ps.points[i];
            ps.points
                .iter()
                .zip(&ps.weights)
                .map(|(xj, tj)| tj * inner(xi, xj).norm_sqr().powi(k as i32))
                .sum::<f64>()
                * ps.weights[i]
        })
        .collect();
    rows.iter().sum()
}

/// `Σ τ_i τ_j |⟨x_i,x_j⟩|^{2k} − δ_{n,2k}`; nonnegative up to rounding.
pub fn design_defect(ps: &WeightedPointSet, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    Ok(frame_potential(ps, k) - delta_closed_form(ps.dim as u32, k, ps.field))
}

/// Largest dimension for the explicit `k = 1` tensor.
pub const MAX_EXPLICIT_DIM: usize = 64;

/// `‖Σ τ_i x_i x_i* − I/n‖_F²`, the `k = 1` defect with `D` written out.
pub fn tensor_defect_explicit(ps: &WeightedPointSet, k: u32) -> Result<f64> {
    if k != 1 {
        return Err(Error::UnsupportedK(k));
    }
    let n = ps.dim;
    if n > MAX_EXPLICIT_DIM {
        return Err(Error::TooLarge(format!("dimension {n} > {MAX_EXPLICIT_DIM}")));
    }
    let mut t = vec![Complex64::new(0.0, 0.0); n * n];
    for (x, &tau) in ps.points.iter().zip(&ps.weights) {
        for a in 0..n {
            for b in 0..n {
                t[a * n + b] += x[a] * x[b].conj() * tau;
            }
        }
    }
    for a in 0..n {
        t[a * n + a] -= 1.0 / n as f64;
    }
    Ok(t.iter().map(|z| z.norm_sqr()).sum())
}

/// Point set read off the rows `a_i*` of `A`: `x_i = a_i/‖a_i‖`,
/// `τ_i = ‖a_i‖^{2k}/S` with `S = Σ ‖a_i‖^{2k}`. Returns `(set, S)`.
pub fn matrix_to_design(a: &Matrix, k: u32) -> Result<(WeightedPointSet, f64)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let mut points = Vec::with_capacity(a.rows());
    let mut masses = Vec::with_capacity(a.rows());
    for j in 0..a.rows() {
        let row = a.row(j);
        let nrm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 {
            return Err(Error::ZeroRow(j));
        }
        points.push(row.iter().map(|z| z.conj() / nrm).collect());
        masses.push(nrm.powi(2 * k as i32));
    }
    let s: f64 = masses.iter().sum();
    let weights = masses.iter().map(|w| w / s).collect();
    Ok((WeightedPointSet::new(a.field(), points, weights)?, s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainDirection {
    /// Design bound `ε₂` → tensor bound `ε₃ = √ε₂`.
    TwoToThree,
    /// Tensor bound `ε₃` → embedding bound `ε₁ = ε₃/δ`.
    ThreeToOne,
    /// Embedding bound `ε₁ ≤ 1/2` → design bound `ε₂ = 4ε₁δ`.
    OneToTwo,
}

impl std::str::FromStr for ChainDirection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2to3" => Ok(Self::TwoToThree),
            "3to1" => Ok(Self::ThreeToOne),
            "1to2" => Ok(Self::OneToTwo),
            _ => Err(Error::InvalidArgument(format!(
                "unknown direction {s:?} (expected 2to3, 3to1 or 1to2)"
            ))),
        }
    }
}

pub fn epsilon_chain(direction: ChainDirection, eps: f64, n: u32, k: u32, field: Field) -> Result<f64> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {eps}")));
    }
    let delta = delta_closed_form(n, k, field);
    match direction {
        ChainDirection::TwoToThree => Ok(eps.sqrt()),
        ChainDirection::ThreeToOne => Ok(eps / delta),
        ChainDirection::OneToTwo if eps > 0.5 => Err(Error::EpsilonOutOfRange(eps)),
        ChainDirection::OneToTwo => Ok(4.0 * eps * delta),
    }
}

/// The three mutually implied tolerances, starting from a design bound `ε₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonChain {
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
}

impl EpsilonChain {
    pub fn from_design_bound(eps2: f64, n: u32, k: u32, field: Field) -> Result<Self> {
        let eps3 = epsilon_chain(ChainDirection::TwoToThree, eps2, n, k, field)?;
        let eps1 = epsilon_chain(ChainDirection::ThreeToOne, eps3, n, k, field)?;
        Ok(Self { eps1, eps2, eps3 })
    }
}
