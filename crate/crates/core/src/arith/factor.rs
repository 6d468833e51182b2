use std::sync::{Arc, RwLock};

use super::primes::{isqrt, nth_prime, prime_index, primes_up_to, smallest_factor_table};
use crate::error::{Error, Result};

/// Largest argument accepted by [`factorize`].
pub const FACTOR_BOUND: u64 = 1_000_000_000_000;

/// Prime-index exponent vector: `n = Π p_i^{α_i}` stored as sorted `(i, α_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Exponents {
    entries: Vec<(u32, u32)>,
}

impl Exponents {
    pub fn new(mut entries: Vec<(u32, u32)>) -> Result<Self> {
        entries.sort_unstable();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParameter(format!(
                    "repeated prime index {}",
                    w[0].0
                )));
            }
        }
        if entries.iter().any(|&(i, a)| i == 0 || a == 0) {
            return Err(Error::InvalidParameter(
                "prime indices and exponents must be positive".into(),
            ));
        }
        Ok(Self { entries })
    }

    pub fn one() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    pub fn is_one(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest prime index present, 0 for the empty vector.
    pub fn max_index(&self) -> usize {
        self.entries.last().map_or(0, |e| e.0 as usize)
    }

    /// Total degree `Σ α_i`.
    pub fn degree(&self) -> u32 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Monomial product: exponents add.
    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
        Self { entries: out }
    }

    /// `Π p_i^{α_i}`, or `None` on overflow.
    pub fn value(&self) -> Option<u64> {
        let mut n: u64 = 1;
        for &(i, a) in &self.entries {
            let p = nth_prime(i as usize);
            for _ in 0..a {
                n = n.checked_mul(p)?;
            }
        }
        Some(n)
    }

    /// `(prime, exponent)` pairs.
    pub fn prime_powers(&self) -> Vec<(u64, u32)> {
        self.entries
            .iter()
            .map(|&(i, a)| (nth_prime(i as usize), a))
            .collect()
    }
}

/// Prime factorization of `n` by trial division over the cached table.
pub fn factorize(n: u64) -> Result<Exponents> {
    if n == 0 || n > FACTOR_BOUND {
        return Err(Error::OutOfRange(format!(
            "factorize({n}): supported range is [1, {FACTOR_BOUND}]"
        )));
    }
    let mut m = n;
    let root = isqrt(n);
    let table = primes_up_to(root.max(2));
    let mut entries = Vec::new();
    for (i, &p) in table.iter().enumerate() {
        if p * p > m {
            break;
        }
        if m % p == 0 {
            let mut a = 0;
            while m % p == 0 {
                m /= p;
                a += 1;
            }
            entries.push((i as u32 + 1, a));
        }
    }
    if m > 1 {
        entries.push((prime_index(m) as u32, 1));
    }
    Ok(Exponents { entries })
}

/// `d(n) = Π (α_i + 1)`.
pub fn divisor_count(n: u64) -> Result<u64> {
    let e = factorize(n)?;
    Ok(e.entries.iter().map(|&(_, a)| a as u64 + 1).product())
}

/// `C(n, k)` in u128, `None` on overflow.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        // acc·(n−j) is divisible by j+1, and (j+1)/g is coprime to acc/g
        let g = gcd(acc, (j + 1) as u128);
        let den = (j + 1) as u128 / g;
        acc = (acc / g).checked_mul((n - j) as u128 / den)?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `d_m(n)`: multiplicative with `d_m(p^k) = C(m+k-1, m-1)`.
pub fn generalized_divisor(m: u64, n: u64) -> Result<u128> {
    if m == 0 {
        return Err(Error::OutOfRange(
            "generalized_divisor: m must be >= 1".into(),
        ));
    }
    let e = factorize(n)?;
    let mut acc: u128 = 1;
    for &(_, k) in e.entries() {
        let c = binomial_u128(m + k as u64 - 1, m - 1).ok_or(Error::Overflow("d_m(p^k)"))?;
        acc = acc.checked_mul(c).ok_or(Error::Overflow("d_m(n)"))?;
    }
    Ok(acc)
}

/// Smallest-prime-factor table with prime indices, for bulk factorization.
#[derive(Debug)]
pub struct FactorTable {
    spf: Vec<u32>,
    pindex: Vec<u32>,
}

impl FactorTable {
    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    /// Calls `visit(prime_index, exponent)` for each prime factor of `n`, ascending.
    pub fn for_each_factor(&self, mut n: usize, mut visit: impl FnMut(u32, u32)) {
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut a = 0;
            while n % p == 0 {
                n /= p;
                a += 1;
            }
            visit(self.pindex[p], a);
        }
    }

    pub fn exponents(&self, n: usize) -> Exponents {
        let mut entries = Vec::new();
        self.for_each_factor(n, |i, a| entries.push((i, a)));
        Exponents { entries }
    }

    /// Index of the largest prime factor of `n` (0 for n = 1).
    pub fn largest_prime_index(&self, n: usize) -> usize {
        let mut best = 0;
        self.for_each_factor(n, |i, _| best = i as usize);
        best
    }

    pub fn smallest_factor(&self, n: usize) -> usize {
        self.spf[n] as usize
    }

    /// 1-based index of the prime `p <= limit`.
    pub fn index_of_prime(&self, p: usize) -> usize {
        self.pindex[p] as usize
    }
}

/// Cached [`FactorTable`] covering at least `0..=n`.
pub fn factor_table(n: usize) -> Arc<FactorTable> {
    static CACHE: RwLock<Option<Arc<FactorTable>>> = RwLock::new(None);
    if let Some(t) = CACHE.read().unwrap_or_else(|e| e.into_inner()).as_ref() {
        if t.limit() >= n {
            return Arc::clone(t);
        }
    }
    let mut guard = CACHE.write().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = guard.as_ref() {
        if t.limit() >= n {
            return Arc::clone(t);
        }
    }
    let limit = n
        .max(1 << 12)
        .max(guard.as_ref().map_or(0, |t| t.limit() * 2));
    let spf = smallest_factor_table(limit);
    let mut pindex = vec![0u32; limit + 1];
    let mut count = 0;
    for p in 2..=limit {
        if spf[p] as usize == p {
            count += 1;
            pindex[p] = count;
        }
    }
    let t = Arc::new(FactorTable { spf, pindex });
    *guard = Some(Arc::clone(&t));
    t
}

/// `d_m(n)` for all `n <= len` by a multiplicative sieve. Index 0 is unused (0).
pub fn generalized_divisor_table(m: u32, len: usize) -> Result<Vec<u64>> {
    if m == 0 {
        return Err(Error::OutOfRange(
            "generalized_divisor_table: m must be >= 1".into(),
        ));
    }
    let spf = smallest_factor_table(len);
    let mut local = vec![1u64];
    for k in 1..64u64 {
        match binomial_u128(m as u64 + k - 1, m as u64 - 1) {
            Some(c) if c <= u64::MAX as u128 => local.push(c as u64),
            _ => break,
        }
    }
    let mut out = vec![0u64; len + 1];
    if len >= 1 {
        out[1] = 1;
    }
    for n in 2..=len {
        let p = spf[n] as usize;
        let mut rest = n / p;
        let mut k = 1;
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        let c = *local.get(k).ok_or(Error::Overflow("d_m sieve"))?;
        out[n] = out[rest]
            .checked_mul(c)
            .ok_or(Error::Overflow("d_m sieve"))?;
    }
    Ok(out)
}
