use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use num_traits::Zero;

use super::DirichletPolynomial;
use crate::arith::{factor_table, Exponents};
use crate::error::{Error, Result};

/// Polynomial in the prime variables `z_1, z_2, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPolynomial<T> {
    terms: BTreeMap<Exponents, T>,
}

impl<T: Clone + Zero> MultiPolynomial<T> {
    pub fn new() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exponents, T)>) -> Self
    where
        T: Add<Output = T>,
    {
        let mut out = Self::new();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn add_term(&mut self, e: Exponents, c: T)
    where
        T: Add<Output = T>,
    {
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&e) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(e, v);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, T> {
        &self.terms
    }

    pub fn coeff(&self, e: &Exponents) -> Option<&T> {
        self.terms.get(e)
    }

    /// Number of variables actually used.
    pub fn variables(&self) -> usize {
        self.terms.keys().map(|e| e.max_index()).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self
    where
        T: Add<Output = T> + for<'x> Mul<&'x T, Output = T>,
    {
        let mut out = Self::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.mul(eb), ca.clone() * cb);
            }
        }
        out
    }

    /// Inverse of the lift: collect monomials back into `n^{−s}` terms, truncated length `len`.
    pub fn bohr_drop(&self, len: usize) -> Result<DirichletPolynomial<T>> {
        let mut coeffs = vec![T::zero(); len];
        for (e, c) in &self.terms {
            let n = e.value().filter(|&n| n as usize <= len).ok_or_else(|| {
                Error::OutOfRange(format!(
                    "monomial {:?} exceeds truncation {len}",
                    e.entries()
                ))
            })?;
            coeffs[n as usize - 1] = c.clone();
        }
        DirichletPolynomial::new(coeffs)
    }
}

impl<T: Clone + Zero> Default for MultiPolynomial<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl MultiPolynomial<Complex64> {
    /// Value at `z = (z_1, …, z_K)`.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::zero();
        for (e, c) in &self.terms {
            let mut m = *c;
            for &(i, a) in e.entries() {
                let zi = z.get(i as usize - 1).ok_or(Error::InsufficientCharacter {
                    have: z.len(),
                    need: i as usize,
                    index: e.value().unwrap_or(0) as usize,
                })?;
                m *= zi.powu(a);
            }
            acc += m;
        }
        Ok(acc)
    }
}

/// Lift `Σ a_n n^{−s}` to `Σ a_n z^{α(n)}`.
pub fn bohr_lift<T: Clone + Zero + Add<Output = T>>(
    f: &DirichletPolynomial<T>,
) -> MultiPolynomial<T> {
    let table = factor_table(f.len());
    let mut terms = BTreeMap::new();
    for (n, c) in f.support() {
        terms.insert(table.exponents(n), c.clone());
    }
    MultiPolynomial { terms }
}
