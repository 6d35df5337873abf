//! Integer and prime-field arithmetic.
//!
//! Everything here is exact. Primality uses a deterministic Miller-Rabin witness
//! set that is proven correct for every 64-bit input, so constructions built on
//! top of it never rest on a probable prime.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest modulus accepted for field arithmetic.
pub const MAX_MODULUS: u64 = (1 << 31) - 1;

/// A certified prime `p`, the size of the field 𝔽_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p > MAX_MODULUS {
            return Err(Error::InvalidParams(format!(
                "modulus {p} exceeds the supported maximum {MAX_MODULUS}"
            )));
        }
        if !is_prime(p) {
            return Err(Error::InvalidParams(format!("{p} is not prime")));
        }
        Ok(Self(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// Reduces an arbitrary integer into `[0, p-1]`.
    pub fn reduce(self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.0
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        (a * b) % self.0
    }
}

impl TryFrom<u64> for PrimeModulus {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PrimeModulus> for u64 {
    fn from(p: PrimeModulus) -> u64 {
        p.0
    }
}

impl std::fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test, exact for all `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    // The first twelve primes are a complete witness set below 3.3e24.
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime in the closed interval `[lo, hi]`.
pub fn prime_in_range(lo: u64, hi: u64) -> Result<PrimeModulus> {
    if lo > hi {
        return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
    }
    (lo..=hi)
        .find(|&n| is_prime(n))
        .ok_or(Error::NoPrimeInRange { lo, hi })
        .and_then(PrimeModulus::new)
}

/// `k² mod p`, the quantity written `(k²)_p` in the ruler construction.
pub fn square_mod(k: u64, p: PrimeModulus) -> u64 {
    debug_assert!(k < p.get());
    p.mul(k, k)
}

/// A polynomial over 𝔽_p stored by coefficients `c_0, …, c_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyOverFp {
    modulus: PrimeModulus,
    coeffs: Vec<u64>,
}

impl PolyOverFp {
    pub fn new(modulus: PrimeModulus, coeffs: Vec<u64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= modulus.get()) {
            return Err(Error::InvalidArgument(format!(
                "coefficient {c} outside [0, {}]",
                modulus.get() - 1
            )));
        }
        Ok(Self { modulus, coeffs })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    /// Coefficients in increasing degree order.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Degree bound `d = len - 1` (not the true degree).
    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation at `k`, result in `[0, p-1]`.
    pub fn eval(&self, k: u64) -> u64 {
        let p = self.modulus;
        let k = k % p.get();
        self.coeffs.iter().rev().fold(0, |acc, &c| p.add(p.mul(acc, k), c))
    }
}

pub fn poly_eval(f: &PolyOverFp, k: u64) -> u64 {
    f.eval(k)
}

/// Number of polynomials of degree at most `d` over 𝔽_p, saturating at `u64::MAX`.
pub fn family_size(p: PrimeModulus, d: usize) -> u64 {
    let mut n: u64 = 1;
    for _ in 0..=d {
        n = n.saturating_mul(p.get());
    }
    n
}

/// The first `count` polynomials of degree at most `d`.
///
/// The coefficient tuple is read as a base-`p` counter with `c_0` as the
/// least significant digit, so `[0,0]` comes first, then `[1,0]`, `[2,0]`, ….
pub fn enumerate_polys(p: PrimeModulus, d: usize, count: u64) -> Result<Vec<PolyOverFp>> {
    let family = family_size(p, d);
    if count > family {
        return Err(Error::CountExceedsFamily { count, family });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut digits = vec![0u64; d + 1];
    for _ in 0..count {
        out.push(PolyOverFp {
            modulus: p,
            coeffs: digits.clone(),
        });
        for c in digits.iter_mut() {
            *c += 1;
            if *c < p.get() {
                break;
            }
            *c = 0;
        }
    }
    Ok(out)
}
