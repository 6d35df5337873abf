//! Dense real/complex matrices and vectors.
//!
//! Both fields share one representation: entries are `Complex64`, and a real
//! matrix is one whose imaginary parts are all exactly zero. The `field` tag is
//! what the rest of the crate (and the CMX writer) keys off.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Field::Real => "real",
            Field::Complex => "complex",
        })
    }
}

impl std::str::FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            _ => Err(Error::InvalidArgument(format!("unknown field {s:?}"))),
        }
    }
}

/// Provenance record carried alongside a matrix.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub construction: String,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Meta {
    pub fn new(construction: impl Into<String>) -> Self {
        Self {
            construction: construction.into(),
            ..Self::default()
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_owned(), value.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn get_u64(&self, key: &str) -> Option<u64> {
        self.params.get(key).and_then(Value::as_u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector {
    field: Field,
    entries: Vec<Complex64>,
}

impl Vector {
    pub fn new(field: Field, entries: Vec<Complex64>) -> Self {
        assert!(!entries.is_empty(), "vector length must be >= 1");
        Self { field, entries }
    }

    pub fn real(entries: impl IntoIterator<Item = f64>) -> Self {
        Self::new(
            Field::Real,
            entries.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn complex(entries: Vec<Complex64>) -> Self {
        Self::new(Field::Complex, entries)
    }

    pub fn zeros(field: Field, len: usize) -> Self {
        Self::new(field, vec![Complex64::new(0.0, 0.0); len])
    }

    /// Standard basis vector `e_k`.
    pub fn basis(field: Field, len: usize, k: usize) -> Self {
        let mut v = Self::zeros(field, len);
        v.entries[k] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn norm(&self, exponent: f64) -> f64 {
        norm(self.entries(), exponent)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Number of nonzero entries.
    pub fn support_size(&self) -> usize {
        self.entries.iter().filter(|z| z.norm_sqr() != 0.0).count()
    }
}

/// `(Σ|v_i|^e)^(1/e)`.
pub fn norm(v: &[Complex64], exponent: f64) -> f64 {
    assert!(exponent >= 1.0, "norm exponent must be >= 1");
    if exponent == 2.0 {
        return v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    }
    if exponent == 1.0 {
        return v.iter().map(|z| z.norm()).sum();
    }
    if exponent.fract() == 0.0 && exponent as i32 % 2 == 0 {
        let half = exponent as i32 / 2;
        return v
            .iter()
            .map(|z| z.norm_sqr().powi(half))
            .sum::<f64>()
            .powf(1.0 / exponent);
    }
    v.iter()
        .map(|z| z.norm().powf(exponent))
        .sum::<f64>()
        .powf(1.0 / exponent)
}

/// `Σ|v_i|^e` for even integer `e`, without the final root.
pub fn norm_pow(v: &[Complex64], even_exponent: u32) -> f64 {
    debug_assert!(even_exponent.is_multiple_of(2));
    let half = (even_exponent / 2) as i32;
    v.iter().map(|z| z.norm_sqr().powi(half)).sum()
}

/// Dense row-major `m × N` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
    meta: Meta,
}

impl Matrix {
    pub fn from_entries(field: Field, rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if field == Field::Real {
            if let Some(i) = data.iter().position(|z| z.im != 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "real matrix has nonzero imaginary part at ({}, {})",
                    i / cols,
                    i % cols
                )));
            }
        }
        Ok(Self {
            field,
            rows,
            cols,
            data,
            meta: Meta::default(),
        })
    }

    pub fn from_real(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Self::from_entries(
            Field::Real,
            rows,
            cols,
            data.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Builds a matrix entry by entry; rows are filled in parallel.
    pub fn from_fn<F>(field: Field, rows: usize, cols: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> Complex64 + Sync,
    {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
        data.par_chunks_mut(cols).enumerate().for_each(|(j, row)| {
            for (k, z) in row.iter_mut().enumerate() {
                *z = f(j, k);
            }
        });
        if field == Field::Real {
            for z in &mut data {
                z.im = 0.0;
            }
        }
        Self {
            field,
            rows,
            cols,
            data,
            meta: Meta::default(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(Field::Real, n, n, |j, k| {
            Complex64::new(if j == k { 1.0 } else { 0.0 }, 0.0)
        })
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Self::from_fn(field, rows, cols, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = meta;
        self
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut Meta {
        &mut self.meta
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.data[j * self.cols + k]
    }

    pub fn set(&mut self, j: usize, k: usize, value: Complex64) {
        if self.field == Field::Real && value.im != 0.0 {
            self.field = Field::Complex;
        }
        self.data[j * self.cols + k] = value;
    }

    pub fn row(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.cols..(j + 1) * self.cols]
    }

    pub fn column(&self, k: usize) -> Vec<Complex64> {
        (0..self.rows).map(|j| self.get(j, k)).collect()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.cols];
        for row in self.data.chunks(self.cols) {
            for (acc, z) in sq.iter_mut().zip(row) {
                *acc += z.norm_sqr();
            }
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// Copy with every column scaled to unit ℓ2 norm.
    pub fn normalize_columns(&self) -> Result<Matrix> {
        let norms = self.column_norms();
        if let Some(k) = norms.iter().position(|&n| n == 0.0) {
            return Err(Error::ZeroColumn(k));
        }
        let mut out = self.clone();
        for row in out.data.chunks_mut(self.cols) {
            for (z, n) in row.iter_mut().zip(&norms) {
                *z /= n;
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> Matrix {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|z| *z *= factor);
        out
    }

    /// `A x`; a real matrix accepts a complex `x` by promotion.
    pub fn matvec(&self, x: &Vector) -> Result<Vector> {
        self.check_cols(x.len())?;
        let out = self
            .data
            .chunks(self.cols)
            .map(|row| row.iter().zip(x.entries()).map(|(a, b)| a * b).sum())
            .collect();
        Ok(Vector::new(self.field.join(x.field()), out))
    }

    /// `A* y` (conjugate transpose).
    pub fn adjoint_matvec(&self, y: &Vector) -> Result<Vector> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: y.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for (row, yj) in self.data.chunks(self.cols).zip(y.entries()) {
            for (acc, a) in out.iter_mut().zip(row) {
                *acc += a.conj() * yj;
            }
        }
        Ok(Vector::new(self.field.join(y.field()), out))
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let n = rhs.cols;
        Ok(Matrix::from_fn(self.field.join(rhs.field), self.rows, n, |j, f| {
            self.row(j)
                .iter()
                .enumerate()
                .map(|(k, a)| a * rhs.data[k * n + f])
                .sum()
        }))
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &Matrix) -> Result<Matrix> {
        if self.cols != below.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: below.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Matrix::from_entries(self.field.join(below.field), self.rows + below.rows, self.cols, data)
    }

    /// Copy keeping only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, self.rows, cols.len(), |j, c| self.get(j, cols[c]))
    }

    fn check_cols(&self, len: usize) -> Result<()> {
        if len != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: len,
            });
        }
        Ok(())
    }
}
