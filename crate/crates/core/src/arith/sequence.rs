use std::ops::{Add, Mul};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::primes::smallest_factor_table;
use crate::error::{Error, Result};

/// Values `a(1), …, a(N)`; index `n` is stored at position `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithmeticSequence<T> {
    values: Vec<T>,
}

impl<T: Clone + Zero> ArithmeticSequence<T> {
    pub fn from_vec(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "sequence length must be positive".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> T) -> Result<Self> {
        Self::from_vec((1..=len).map(f).collect())
    }

    /// `δ₁ = (1, 0, 0, …)`.
    pub fn unit(len: usize) -> Result<Self>
    where
        T: One,
    {
        Self::from_fn(len, |n| if n == 1 { T::one() } else { T::zero() })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `a(n)` for `1 <= n <= N`.
    pub fn get(&self, n: usize) -> &T {
        &self.values[n - 1]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<T> {
        self.values
    }
}

/// `(a ∗ b)(n) = Σ_{d | n} a(d) b(n/d)` by the divisor-pair loop.
pub fn dirichlet_convolve<T>(
    a: &ArithmeticSequence<T>,
    b: &ArithmeticSequence<T>,
) -> Result<ArithmeticSequence<T>>
where
    T: Clone + Zero + Add<Output = T> + for<'x> Mul<&'x T, Output = T>,
{
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    let mut out = vec![T::zero(); n];
    for d in 1..=n {
        let ad = &a.values[d - 1];
        if ad.is_zero() {
            continue;
        }
        for e in 1..=n / d {
            let be = &b.values[e - 1];
            if be.is_zero() {
                continue;
            }
            let idx = d * e - 1;
            out[idx] = std::mem::replace(&mut out[idx], T::zero()) + ad.clone() * be;
        }
    }
    Ok(ArithmeticSequence { values: out })
}

/// Multiplicative sequence from its prime-power values `local(p, k)`.
pub fn multiplicative<T>(
    len: usize,
    mut local: impl FnMut(u64, u32) -> T,
) -> Result<ArithmeticSequence<T>>
where
    T: Clone + Zero + One + for<'x> Mul<&'x T, Output = T>,
{
    if len == 0 {
        return Err(Error::InvalidParameter(
            "sequence length must be positive".into(),
        ));
    }
    let spf = smallest_factor_table(len);
    let mut out: Vec<T> = vec![T::zero(); len + 1];
    out[1] = T::one();
    for n in 2..=len {
        let p = spf[n] as usize;
        let mut rest = n / p;
        let mut k = 1;
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        out[n] = local(p as u64, k) * &out[rest];
    }
    out.remove(0);
    Ok(ArithmeticSequence { values: out })
}

/// Coefficients of `ζ^q`: multiplicative, `p^k ↦ q(q+1)⋯(q+k−1)/k!`.
pub fn zeta_power_coeffs(q: f64, len: usize) -> Result<ArithmeticSequence<f64>> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::OutOfRange(format!(
            "zeta power exponent must be positive, got {q}"
        )));
    }
    let mut local = vec![1.0f64];
    let mut acc = 1.0;
    for k in 1..64 {
        acc *= (q + k as f64 - 1.0) / k as f64;
        local.push(acc);
    }
    multiplicative(len, |_, k| local[k as usize])
}

/// Exact rational coefficients of `ζ^q`.
pub fn zeta_power_coeffs_exact(
    q: &BigRational,
    len: usize,
) -> Result<ArithmeticSequence<BigRational>> {
    if *q <= BigRational::zero() {
        return Err(Error::OutOfRange(format!(
            "zeta power exponent must be positive, got {q}"
        )));
    }
    let mut local = vec![BigRational::one()];
    let mut acc = BigRational::one();
    for k in 1..64u32 {
        let kk = BigRational::from_integer(k.into());
        acc = acc * (q + &kk - BigRational::one()) / kk;
        local.push(acc.clone());
    }
    multiplicative(len, |_, k| local[k as usize].clone())
}

/// `A^q` truncated to `len` terms for a real sequence with `A(1) = 1`.
///
/// Uses `F′A = qA′F` in coefficient form:
/// `F(n) log n = Σ_{d | n, d < n} F(d) A(n/d) (q log(n/d) − log d)`.
pub fn dirichlet_power(a: &[f64], q: f64) -> Result<Vec<f64>> {
    if a.is_empty() || a[0] != 1.0 {
        return Err(Error::InvalidParameter(
            "dirichlet_power needs A(1) = 1".into(),
        ));
    }
    let n = a.len();
    let logs: Vec<f64> = (0..=n)
        .map(|k| if k == 0 { 0.0 } else { (k as f64).ln() })
        .collect();
    let mut acc = vec![0.0f64; n + 1];
    let mut f = vec![0.0f64; n + 1];
    f[1] = 1.0;
    for d in 1..=n {
        if d > 1 {
            f[d] = acc[d] / logs[d];
        }
        let fd = f[d];
        if fd == 0.0 {
            continue;
        }
        let mut e = 2;
        while d * e <= n {
            let ae = a[e - 1];
            if ae != 0.0 {
                acc[d * e] += fd * ae * (q * logs[e] - logs[d]);
            }
            e += 1;
        }
    }
    f.remove(0);
    Ok(f)
}
