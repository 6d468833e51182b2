//! Dirichlet polynomials `f(s) = Σ_{n<=N} a_n n^{−s}`.

mod character;
mod multi;

use std::ops::{Add, Mul};
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use num_traits::Zero;
use serde_json::Value;

pub use character::{Character, Domain};
pub use multi::{bohr_lift, MultiPolynomial};

use crate::arith::factor_table;
use crate::error::{Error, Result};
use crate::json;

/// Length above which `log n` comes from a shared table.
pub const LOG_CACHE_THRESHOLD: usize = 10_000;

/// Dense coefficients `a_1, …, a_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletPolynomial<T = Complex64> {
    coeffs: Vec<T>,
}

impl<T: Clone + Zero> DirichletPolynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter(
                "truncation length N must be positive".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![T::zero(); len])
    }

    /// Polynomial of length `len` with the listed `(n, a_n)` entries.
    pub fn from_terms(len: usize, terms: &[(usize, T)]) -> Result<Self> {
        let mut f = Self::zeros(len)?;
        for (n, c) in terms {
            if *n == 0 || *n > len {
                return Err(Error::OutOfRange(format!("index {n} outside [1, {len}]")));
            }
            f.coeffs[n - 1] = c.clone();
        }
        Ok(f)
    }

    pub fn constant(c: T) -> Self {
        Self { coeffs: vec![c] }
    }

    /// Truncation length N.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `a_n`, zero beyond N.
    pub fn coeff(&self, n: usize) -> T {
        if n >= 1 && n <= self.coeffs.len() {
            self.coeffs[n - 1].clone()
        } else {
            T::zero()
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn set(&mut self, n: usize, c: T) {
        self.coeffs[n - 1] = c;
    }

    /// `f(+∞) = a_1`.
    pub fn value_at_infinity(&self) -> T {
        self.coeffs[0].clone()
    }

    /// Nonzero `(n, a_n)` pairs.
    pub fn support(&self) -> impl Iterator<Item = (usize, &T)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i + 1, c))
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(usize, &T) -> U) -> DirichletPolynomial<U> {
        DirichletPolynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| f(i + 1, c))
                .collect(),
        }
    }

    /// Same coefficients, truncation length changed (extra indices must be zero).
    pub fn with_len(&self, len: usize) -> Result<Self> {
        if let Some((n, _)) = self.support().filter(|(n, _)| *n > len).last() {
            return Err(Error::OutOfRange(format!(
                "nonzero coefficient at {n} beyond new length {len}"
            )));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len.max(1), T::zero());
        Self::new(coeffs)
    }

    /// Index of the largest prime dividing an index of the support.
    pub fn prime_support(&self) -> usize {
        let table = factor_table(self.len());
        self.support()
            .map(|(n, _)| table.largest_prime_index(n))
            .max()
            .unwrap_or(0)
    }
}

/// Dirichlet product truncated at `n_out`; exact when `n_out >= N_f N_g`.
pub fn multiply<T>(
    f: &DirichletPolynomial<T>,
    g: &DirichletPolynomial<T>,
    n_out: usize,
) -> Result<DirichletPolynomial<T>>
where
    T: Clone + Zero + Add<Output = T> + for<'x> Mul<&'x T, Output = T>,
{
    if n_out == 0 || n_out as u128 > f.len() as u128 * g.len() as u128 {
        return Err(Error::OutOfRange(format!(
            "output length {n_out} must lie in [1, {}]",
            f.len() as u128 * g.len() as u128
        )));
    }
    let gs: Vec<(usize, &T)> = g.support().collect();
    let mut out = vec![T::zero(); n_out];
    for (i, a) in f.support() {
        for &(j, b) in &gs {
            let k = i * j;
            if k > n_out {
                break;
            }
            out[k - 1] = std::mem::replace(&mut out[k - 1], T::zero()) + a.clone() * b;
        }
    }
    DirichletPolynomial::new(out)
}

/// `f^m` without truncation, refusing products longer than `budget`.
pub fn power_full<T>(
    f: &DirichletPolynomial<T>,
    m: u32,
    budget: u128,
) -> Result<DirichletPolynomial<T>>
where
    T: Clone + Zero + Add<Output = T> + for<'x> Mul<&'x T, Output = T> + num_traits::One,
{
    if m == 0 {
        return Ok(DirichletPolynomial::constant(T::one()));
    }
    let top = f.support().map(|(n, _)| n).last().unwrap_or(1);
    let needed = (top as u128).checked_pow(m).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::MemoryBudget { needed, budget });
    }
    let base = f.with_len(top)?;
    let mut acc = base.clone();
    for _ in 1..m {
        let len = acc.len() * top;
        acc = multiply(&acc, &base, len)?;
    }
    Ok(acc)
}

fn log_table(len: usize) -> Arc<Vec<f64>> {
    static CACHE: RwLock<Option<Arc<Vec<f64>>>> = RwLock::new(None);
    if let Some(t) = CACHE.read().unwrap_or_else(|e| e.into_inner()).as_ref() {
        if t.len() > len {
            return Arc::clone(t);
        }
    }
    let mut guard = CACHE.write().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = guard.as_ref() {
        if t.len() > len {
            return Arc::clone(t);
        }
    }
    let t: Arc<Vec<f64>> = Arc::new(
        (0..=len)
            .map(|n| if n == 0 { 0.0 } else { (n as f64).ln() })
            .collect(),
    );
    *guard = Some(Arc::clone(&t));
    t
}

/// `log n` for `1 <= n <= len`, as a vector indexed by `n`.
pub fn logs(len: usize) -> Arc<Vec<f64>> {
    if len > LOG_CACHE_THRESHOLD {
        log_table(len)
    } else {
        Arc::new(
            (0..=len)
                .map(|n| if n == 0 { 0.0 } else { (n as f64).ln() })
                .collect(),
        )
    }
}

impl DirichletPolynomial<Complex64> {
    /// Real coefficients promoted to complex.
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `Σ a_n exp(−s log n)`.
    pub fn evaluate(&self, s: Complex64) -> Complex64 {
        let n = self.len();
        if n > LOG_CACHE_THRESHOLD {
            let t = log_table(n);
            self.support().map(|(k, a)| a * (-s * t[k]).exp()).sum()
        } else {
            self.support()
                .map(|(k, a)| a * (-s * (k as f64).ln()).exp())
                .sum()
        }
    }

    /// Coefficients `a_n n^{−σ}`.
    pub fn translate(&self, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::OutOfRange(format!(
                "translation requires sigma >= 0, got {sigma}"
            )));
        }
        let t = logs(self.len());
        Ok(self.map(|n, a| {
            if a.is_zero() {
                *a
            } else {
                a * (-sigma * t[n]).exp()
            }
        }))
    }

    /// Coefficients `−a_n log n`.
    pub fn derivative(&self) -> Self {
        let t = logs(self.len());
        self.map(|n, a| -a * t[n])
    }

    /// Coefficients `a_n χ(n)`; the character must cover every prime in the support.
    pub fn twist(&self, chi: &Character) -> Result<Self> {
        let table = factor_table(self.len());
        let mut out = self.clone();
        for (n, a) in self.coeffs.iter().enumerate().map(|(i, a)| (i + 1, a)) {
            if a.is_zero() {
                continue;
            }
            let mut v = *a;
            let mut missing = None;
            table.for_each_factor(n, |i, e| match chi.coords().get(i as usize - 1) {
                Some(c) => v *= c.powu(e),
                None => missing = Some(i as usize),
            });
            if let Some(need) = missing {
                return Err(Error::InsufficientCharacter {
                    have: chi.k(),
                    need,
                    index: n,
                });
            }
            out.coeffs[n - 1] = v;
        }
        Ok(out)
    }

    /// `Σ |a_n|²`.
    pub fn l2_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `{"N": …, "coeffs": [[n, re, im], …]}` over the nonzero coefficients.
    pub fn to_json_value(&self) -> Value {
        let coeffs: Vec<Value> = self
            .support()
            .map(|(n, c)| {
                Value::Array(vec![
                    Value::from(n as u64),
                    json::num(c.re),
                    json::num(c.im),
                ])
            })
            .collect();
        serde_json::json!({ "N": self.len(), "coeffs": coeffs })
    }

    pub fn to_json(&self) -> String {
        json::to_string(&self.to_json_value())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let len = v
            .get("N")
            .and_then(Value::as_u64)
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::Parse("polynomial needs a positive integer \"N\"".into()))?;
        let rows = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("polynomial needs a \"coeffs\" array".into()))?;
        let mut f = Self::zeros(len as usize)?;
        let mut seen = vec![false; len as usize];
        for row in rows {
            let r = row
                .as_array()
                .filter(|r| r.len() == 3 || r.len() == 2)
                .ok_or_else(|| {
                    Error::Parse(format!("coefficient row {row} must be [n, re, im]"))
                })?;
            let n = r[0]
                .as_u64()
                .filter(|&n| n >= 1 && n <= len)
                .ok_or_else(|| {
                    Error::Parse(format!("coefficient index {} outside [1, {len}]", r[0]))
                })? as usize;
            let re = r[1]
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("bad real part {}", r[1])))?;
            let im = match r.get(2) {
                Some(x) => x
                    .as_f64()
                    .ok_or_else(|| Error::Parse(format!("bad imaginary part {x}")))?,
                None => 0.0,
            };
            if std::mem::replace(&mut seen[n - 1], true) {
                return Err(Error::Parse(format!("coefficient index {n} listed twice")));
            }
            f.coeffs[n - 1] = Complex64::new(re, im);
        }
        Ok(f)
    }
}

/// `Σ_{n<=N} n^{−σ} n^{−s}`: the truncated `ζ(σ + ·)`.
pub fn truncated_zeta(len: usize, sigma: f64) -> Result<DirichletPolynomial<Complex64>> {
    DirichletPolynomial::new(
        (1..=len)
            .map(|n| Complex64::new((n as f64).powf(-sigma), 0.0))
            .collect(),
    )
}

/// The monomial `n^{−s}`.
pub fn monomial(n: usize) -> Result<DirichletPolynomial<Complex64>> {
    DirichletPolynomial::from_terms(n, &[(n, Complex64::new(1.0, 0.0))])
}
