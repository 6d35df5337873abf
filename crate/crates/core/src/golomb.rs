//! The Erdős–Turán Golomb ruler `g(k) = 2pk + (k² mod p)`.

use crate::error::{Error, Result};
use crate::num_theory::{square_mod, PrimeModulus};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GolombRuler {
    p: PrimeModulus,
    marks: Vec<u64>,
}

impl GolombRuler {
    pub fn p(&self) -> PrimeModulus {
        self.p
    }

    pub fn marks(&self) -> &[u64] {
        &self.marks
    }

    /// `q = 3p(p-1) + 1`; every mark lies in `[0, q-1]`.
    pub fn range_bound(&self) -> u64 {
        let p = self.p.get();
        3 * p * (p - 1) + 1
    }

    /// `2q - 1 = 6p² - 6p + 1`, the row count of the phase matrix built from this ruler.
    pub fn phase_rows(&self) -> u64 {
        2 * self.range_bound() - 1
    }
}

/// Checks that `p` is an odd prime and returns it as a modulus.
pub fn odd_prime(p: u64) -> Result<PrimeModulus> {
    if p < 3 {
        return Err(Error::InvalidModulus(p));
    }
    PrimeModulus::new(p).map_err(|_| Error::InvalidModulus(p))
}

pub fn build_ruler(p: u64) -> Result<GolombRuler> {
    let p = odd_prime(p)?;
    let marks = (0..p.get()).map(|k| 2 * p.get() * k + square_mod(k, p)).collect();
    Ok(GolombRuler { p, marks })
}

/// True iff all ordered differences `marks[k] - marks[k']`, `k != k'`, are distinct.
pub fn verify_ruler(marks: &[u64]) -> bool {
    let mut diffs = Vec::with_capacity(marks.len() * marks.len().saturating_sub(1));
    for (i, &a) in marks.iter().enumerate() {
        for (j, &b) in marks.iter().enumerate() {
            if i != j {
                diffs.push(a as i64 - b as i64);
            }
        }
    }
    diffs.sort_unstable();
    diffs.windows(2).all(|w| w[0] != w[1])
}
