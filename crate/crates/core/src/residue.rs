//! Residue rings `Z/p^k` and truncated power series rings `F_p[t]/(t^e)`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest modulus accepted; keeps every product of two residues inside `u128`
/// and every sum inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 62;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for d in [2u64, 3, 5, 7, 11, 13] {
        if n % d == 0 {
            return n == d;
        }
    }
    let mut d = 17u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A prime power `p^k` with `k >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    p: u64,
    k: u32,
    value: u64,
}

impl Modulus {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::invalid("level k must be at least 1"));
        }
        let value = checked_pow(p, k)
            .filter(|&v| v <= MAX_MODULUS)
            .ok_or_else(|| Error::invalid(format!("{p}^{k} exceeds the supported modulus range")))?;
        Ok(Modulus { p, k, value })
    }

    pub fn prime(self) -> u64 {
        self.p
    }

    pub fn level(self) -> u32 {
        self.k
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn residue(self, v: u64) -> Residue {
        Residue {
            value: v % self.value,
            modulus: self,
        }
    }

    /// Canonical representative of a signed integer.
    pub fn reduce_i64(self, v: i64) -> u64 {
        v.rem_euclid(self.value as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.value {
            s - self.value
        } else {
            s
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.value as u128) as u64
    }

    #[inline]
    pub fn pow(self, mut base: u64, mut exp: u32) -> u64 {
        let mut acc = 1 % self.value;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.k)
    }
}

pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// An element of `Z/p^k`, stored as its canonical representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: Modulus,
}

impl Residue {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> Modulus {
        self.modulus
    }

    fn check(self, other: Residue) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                expected: self.modulus.value,
                found: other.modulus.value,
            });
        }
        Ok(())
    }

    pub fn try_add(self, other: Residue) -> Result<Residue> {
        self.check(other)?;
        Ok(Residue {
            value: self.modulus.add(self.value, other.value),
            modulus: self.modulus,
        })
    }

    pub fn try_mul(self, other: Residue) -> Result<Residue> {
        self.check(other)?;
        Ok(Residue {
            value: self.modulus.mul(self.value, other.value),
            modulus: self.modulus,
        })
    }

    /// Reduction `Z/p^k -> Z/p^j` for `j <= k`.
    pub fn reduce_to(self, level: u32) -> Result<Residue> {
        if level > self.modulus.k {
            return Err(Error::invalid(format!(
                "cannot reduce a residue mod {} to level {level}",
                self.modulus
            )));
        }
        let m = Modulus::new(self.modulus.p, level)?;
        Ok(m.residue(self.value))
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// An element of `F_p[t]/(t^e)`, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<u64>,
    p: u64,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<u64>, p: u64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("truncation length must be at least 1"));
        }
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        let coeffs = coeffs.into_iter().map(|c| c % p).collect();
        Ok(TruncatedSeries { coeffs, p })
    }

    pub fn constant(c: u64, p: u64, len: usize) -> Self {
        let mut coeffs = vec![0; len];
        coeffs[0] = c % p;
        TruncatedSeries { coeffs, p }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + b) % self.p)
            .collect();
        TruncatedSeries { coeffs, p: self.p }
    }

    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.p;
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| ((*a as u128 * c as u128) % self.p as u128) as u64)
            .collect();
        TruncatedSeries { coeffs, p: self.p }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let e = self.coeffs.len();
        let p = self.p as u128;
        let mut out = vec![0u128; e];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs[..e - i].iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % p;
            }
        }
        TruncatedSeries {
            coeffs: out.into_iter().map(|c| c as u64).collect(),
            p: self.p,
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = TruncatedSeries::constant(1, self.p, self.coeffs.len());
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(101));
        assert!(!is_prime(289));
    }

    #[test]
    fn modulus_rejects_composites_and_level_zero() {
        assert!(Modulus::new(9, 1).is_err());
        assert!(Modulus::new(3, 0).is_err());
        assert_eq!(Modulus::new(3, 4).unwrap().value(), 81);
    }

    #[test]
    fn mixed_moduli_are_refused() {
        let a = Modulus::new(3, 2).unwrap().residue(4);
        let b = Modulus::new(5, 1).unwrap().residue(4);
        assert!(matches!(a.try_add(b), Err(Error::ModulusMismatch { .. })));
    }

    #[test]
    fn series_product_truncates() {
        // (1 + t)^3 mod (t^3) over F_5 = 1 + 3t + 3t^2
        let s = TruncatedSeries::new(vec![1, 1, 0], 5).unwrap();
        assert_eq!(s.pow(3).coeffs(), &[1, 3, 3]);
        let t = TruncatedSeries::new(vec![0, 1], 3).unwrap();
        assert!(t.mul(&t).is_zero());
    }
}
