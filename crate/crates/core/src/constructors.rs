//! Measurement matrix constructions.
//!
//! Phase arguments are always reduced modulo the period in exact integer
//! arithmetic before being scaled by `2π/period`, so entries are accurate to
//! the last bit regardless of the size of `j·g(k)`.

use crate::error::{Error, Result};
use crate::golomb::{build_ruler, odd_prime};
use crate::matrix::{Field, Matrix, Meta};
use crate::num_theory::{enumerate_polys, family_size, is_prime, prime_in_range, PrimeModulus};
use crate::seed;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Hard cap on the number of entries any constructor will allocate.
pub const MAX_ENTRIES: u64 = 50_000_000;

/// `exp(i2π r/period)` for `r` already reduced into `[0, period)`.
pub fn unit_phase(r: u64, period: u64) -> Complex64 {
    let theta = std::f64::consts::TAU * (r as f64) / (period as f64);
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

fn check_size(rows: u64, cols: u64) -> Result<()> {
    match rows.checked_mul(cols) {
        Some(n) if n <= MAX_ENTRIES => Ok(()),
        _ => Err(Error::TooLarge(format!(
            "{rows} x {cols} matrix exceeds {MAX_ENTRIES} entries"
        ))),
    }
}

/// Rows of the Golomb phase matrix for prime `p`: `m = 6p² - 6p + 1`.
pub fn golomb_rows(p: u64) -> u64 {
    6 * p * p - 6 * p + 1
}

/// `m × N` matrix of independent signs drawn from ChaCha8 seeded with `seed`.
pub fn rademacher(m: usize, n: usize, seed: u64) -> Result<Matrix> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParams("rademacher needs m, N >= 1".into()));
    }
    check_size(m as u64, n as u64)?;
    let mut rng = seed::rng(seed);
    let data: Vec<f64> = (0..m * n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let meta = Meta::new("rademacher")
        .param("m", m)
        .param("N", n)
        .param("rng", "chacha8")
        .with_seed(seed);
    Ok(Matrix::from_real(m, n, data)?.with_meta(meta))
}

fn weil_degree(p: PrimeModulus, d: usize) -> Result<()> {
    if d == 0 || d as u64 >= p.get() {
        return Err(Error::InvalidParams(format!(
            "degree bound must satisfy 1 <= d < p, got d = {d}, p = {p}"
        )));
    }
    Ok(())
}

/// `p × N` matrix with entries `exp(i2π k f(k)/p)/√p`, rows `k ∈ 𝔽_p`, columns the
/// first `N` polynomials of degree at most `d` (all `p^{d+1}` when `n` is `None`).
pub fn weil(p: u64, d: usize, n: Option<u64>) -> Result<Matrix> {
    let p = PrimeModulus::new(p)?;
    weil_degree(p, d)?;
    let family = family_size(p, d);
    let n = n.unwrap_or(family);
    if n == 0 {
        return Err(Error::InvalidParams("weil needs at least one column".into()));
    }
    check_size(p.get(), n)?;
    let polys = enumerate_polys(p, d, n)?;
    let scale = 1.0 / (p.get() as f64).sqrt();
    let a = Matrix::from_fn(Field::Complex, p.get() as usize, n as usize, |k, f| {
        let k = k as u64;
        unit_phase(p.mul(k, polys[f].eval(k)), p.get()) * scale
    });
    let meta = Meta::new("weil")
        .param("p", p.get())
        .param("d", d)
        .param("N", n)
        .param("family", "lex, c0 least significant");
    Ok(a.with_meta(meta))
}

/// `m × m²` matrix of translations and modulations of the Alltop vector:
/// column `x·m + y` has entries `exp(i2π((j+x)³ + y·j)/m)/√m`.
pub fn alltop(m: u64) -> Result<Matrix> {
    if m < 5 || !is_prime(m) {
        return Err(Error::InvalidParams(format!("alltop needs a prime m >= 5, got {m}")));
    }
    check_size(m, m * m)?;
    let scale = 1.0 / (m as f64).sqrt();
    let mm = m as u128;
    let a = Matrix::from_fn(Field::Complex, m as usize, (m * m) as usize, |j, col| {
        let (x, y) = ((col as u64 / m) as u128, (col as u64 % m) as u128);
        let j = j as u128;
        let t = (j + x) % mm;
        let r = (t * t % mm * t + y * j) % mm;
        unit_phase(r as u64, m) * scale
    });
    Ok(a.with_meta(Meta::new("alltop").param("m", m)))
}

/// `p² × p^{d+1}` binary matrix: row `a·p + b`, column `f` is `1/√p` iff `f(a) = b`.
pub fn devore(p: u64, d: usize) -> Result<Matrix> {
    let p = PrimeModulus::new(p)?;
    weil_degree(p, d)?;
    let family = family_size(p, d);
    let pp = p.get();
    check_size(pp * pp, family)?;
    let polys = enumerate_polys(p, d, family)?;
    let scale = 1.0 / (pp as f64).sqrt();
    let a = Matrix::from_fn(Field::Real, (pp * pp) as usize, family as usize, |row, f| {
        let (a, b) = (row as u64 / pp, row as u64 % pp);
        Complex64::new(if polys[f].eval(a) == b { scale } else { 0.0 }, 0.0)
    });
    let meta = Meta::new("devore")
        .param("p", pp)
        .param("d", d)
        .param("family", "lex, c0 least significant");
    Ok(a.with_meta(meta))
}

/// `m × p` Golomb phase matrix, `A″_{j,k} = exp(i2π j g(k)/m)` with `m = 6p² - 6p + 1`.
pub fn golomb_phase(p: u64) -> Result<Matrix> {
    let ruler = build_ruler(p)?;
    let m = ruler.phase_rows();
    check_size(m, p)?;
    let marks = ruler.marks();
    let a = Matrix::from_fn(Field::Complex, m as usize, p as usize, |j, k| {
        let r = (j as u128 * marks[k] as u128 % m as u128) as u64;
        unit_phase(r, m)
    });
    Ok(a.with_meta(Meta::new("golomb_phase").param("p", p).param("m", m)))
}

/// `(m+p) × p` matrix `[(2m)^{-1/4} A″ ; 2^{-1/4} I_p]`, an exact ℓ2 → ℓ4 isometry.
pub fn golomb_stacked(p: u64) -> Result<Matrix> {
    let phase = golomb_phase(p)?;
    let m = phase.rows() as f64;
    let top = phase.scaled((2.0 * m).powf(-0.25));
    let bottom = Matrix::identity(p as usize).scaled(2f64.powf(-0.25));
    let meta = Meta::new("golomb_stacked").param("p", p).param("m", phase.rows());
    Ok(top.vstack(&bottom)?.with_meta(meta))
}

/// Parameters of the composed Golomb × Weil construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComposedPlan {
    pub s: u64,
    pub n: u64,
    pub p: u64,
    pub d: usize,
    pub m: u64,
    pub p_overridden: bool,
}

/// Smallest `d >= 0` with `p^{d+1} >= n`.
fn min_degree(p: u64, n: u64) -> usize {
    let mut d = 0;
    let mut size = p;
    while size < n {
        size = size.saturating_mul(p);
        d += 1;
    }
    d
}

/// `(lo, hi) = (9s²⌈ln²N⌉, 18s²⌈ln²N⌉)`, the window the prime is taken from.
pub fn composed_prime_window(s: u64, n: u64) -> (u64, u64) {
    let ln = (n as f64).ln();
    let l2 = (ln * ln).ceil() as u64;
    (9 * s * s * l2, 18 * s * s * l2)
}

pub fn composed_plan(s: u64, n: u64, p_override: Option<u64>) -> Result<ComposedPlan> {
    if s == 0 || n == 0 {
        return Err(Error::InvalidParams("composed needs s, N >= 1".into()));
    }
    let (p, overridden) = match p_override {
        Some(p) => (odd_prime(p)?.get(), true),
        None => {
            let (lo, hi) = composed_prime_window(s, n);
            let infeasible = |why: &str| {
                Error::InvalidParams(format!(
                    "no admissible prime for s = {s}, N = {n}: p must lie in [{lo}, {hi}] and {why}; \
                     pass an explicit p to build outside that regime"
                ))
            };
            let p = prime_in_range(lo.max(3), hi)
                .map_err(|_| infeasible("the window is empty"))?
                .get();
            if (p as u128) * (p as u128) >= n as u128 {
                return Err(infeasible(&format!(
                    "N > p² is required, but p = {p} gives p² = {}",
                    p * p
                )));
            }
            (p, false)
        }
    };
    let d = min_degree(p, n).max(1);
    if d as u64 >= p {
        return Err(Error::InvalidParams(format!(
            "degree bound d = {d} must be below p = {p}; increase p"
        )));
    }
    Ok(ComposedPlan {
        s,
        n,
        p,
        d,
        m: golomb_rows(p),
        p_overridden: overridden,
    })
}

/// `m × N` product of the Golomb phase matrix and the first `N` Weil columns.
pub fn composed(s: u64, n: u64, p_override: Option<u64>) -> Result<Matrix> {
    let plan = composed_plan(s, n, p_override)?;
    let family = family_size(PrimeModulus::new(plan.p)?, plan.d);
    if n > family {
        return Err(Error::CountExceedsFamily { count: n, family });
    }
    check_size(plan.m, n)?;
    let outer = golomb_phase(plan.p)?;
    let inner = weil(plan.p, plan.d, Some(n))?;
    let meta = Meta::new("composed")
        .param("s", s)
        .param("N", n)
        .param("p", plan.p)
        .param("d", plan.d)
        .param("m", plan.m)
        .param("p_overridden", plan.p_overridden)
        .param("family", "lex, c0 least significant");
    Ok(outer.matmul(&inner)?.with_meta(meta))
}

/// Every construction with its parameters, for serialized requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Construction {
    Rademacher { m: usize, n: usize, seed: u64 },
    Alltop { m: u64 },
    Devore { p: u64, d: usize },
    Weil { p: u64, d: usize, n: Option<u64> },
    GolombPhase { p: u64 },
    GolombStacked { p: u64 },
    Composed { s: u64, n: u64, p: Option<u64> },
}

impl Construction {
    pub fn build(&self) -> Result<Matrix> {
        match *self {
            Construction::Rademacher { m, n, seed } => rademacher(m, n, seed),
            Construction::Alltop { m } => alltop(m),
            Construction::Devore { p, d } => devore(p, d),
            Construction::Weil { p, d, n } => weil(p, d, n),
            Construction::GolombPhase { p } => golomb_phase(p),
            Construction::GolombStacked { p } => golomb_stacked(p),
            Construction::Composed { s, n, p } => composed(s, n, p),
        }
    }
}
