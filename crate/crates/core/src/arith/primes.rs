//! Shared prime table.
//!
//! The table is produced by a segmented sieve and grows on demand. Readers
//! receive an `Arc` snapshot, so a slice handed out never changes underneath
//! them.

use std::sync::{Arc, RwLock};

const SEGMENT: u64 = 1 << 18;

struct Table {
    limit: u64,
    primes: Option<Arc<Vec<u64>>>,
}

static TABLE: RwLock<Table> = RwLock::new(Table {
    limit: 1,
    primes: None,
});

/// Snapshot of all primes `<= limit` (the snapshot may contain more).
pub fn primes_up_to(limit: u64) -> Arc<Vec<u64>> {
    {
        let t = TABLE.read().unwrap_or_else(|e| e.into_inner());
        if let Some(p) = t.primes.as_ref().filter(|_| t.limit >= limit) {
            return Arc::clone(p);
        }
    }
    let mut t = TABLE.write().unwrap_or_else(|e| e.into_inner());
    if t.primes.is_none() || t.limit < limit {
        let target = limit.max(t.limit.saturating_mul(2)).max(1 << 16);
        t.primes = Some(Arc::new(sieve(target)));
        t.limit = target;
    }
    Arc::clone(t.primes.as_ref().expect("table initialized"))
}

/// Primes `<= limit` as an owned prefix count: `(snapshot, count)`.
pub fn prime_prefix(limit: u64) -> (Arc<Vec<u64>>, usize) {
    let table = primes_up_to(limit);
    let count = table.partition_point(|&p| p <= limit);
    (table, count)
}

/// The `index`-th prime, 1-based (`nth_prime(1) == 2`).
pub fn nth_prime(index: usize) -> u64 {
    assert!(index >= 1, "prime indices are 1-based");
    let mut limit = 1u64 << 16;
    loop {
        let table = primes_up_to(limit);
        if let Some(&p) = table.get(index - 1) {
            return p;
        }
        limit = limit.saturating_mul(4);
    }
}

/// First `k` primes.
pub fn first_primes(k: usize) -> Vec<u64> {
    if k == 0 {
        return Vec::new();
    }
    let last = nth_prime(k);
    primes_up_to(last)[..k].to_vec()
}

/// 1-based index of the prime `p`. `p` must be prime.
pub fn prime_index(p: u64) -> usize {
    let table = {
        let t = TABLE.read().unwrap_or_else(|e| e.into_inner());
        t.primes.as_ref().filter(|_| t.limit >= p).map(Arc::clone)
    };
    match table {
        Some(t) => t.partition_point(|&q| q < p) + 1,
        None if p <= 1 << 26 => {
            let t = primes_up_to(p);
            t.partition_point(|&q| q < p) + 1
        }
        None => prime_pi(p) as usize,
    }
}

/// Number of primes `<= n` (Lucy Hedgehog recursion, O(n^{3/4})).
pub fn prime_pi(n: u64) -> u64 {
    if n < 2 {
        return 0;
    }
    let r = isqrt(n);
    let mut small = vec![0u64; r as usize + 1];
    let mut large = vec![0u64; r as usize + 1];
    for v in 1..=r {
        small[v as usize] = v - 1;
        large[v as usize] = n / v - 1;
    }
    for p in 2..=r {
        if small[p as usize] == small[p as usize - 1] {
            continue;
        }
        let sp = small[p as usize - 1];
        let p2 = p * p;
        for v in 1..=r {
            let m = n / v;
            if m < p2 {
                break;
            }
            let q = m / p;
            let sub = if q <= r {
                small[q as usize]
            } else {
                large[(n / q) as usize]
            };
            large[v as usize] -= sub - sp;
        }
        let mut v = r;
        while v >= p2 {
            small[v as usize] -= small[(v / p) as usize] - sp;
            v -= 1;
        }
    }
    large[1]
}

pub fn isqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn sieve(limit: u64) -> Vec<u64> {
    let root = isqrt(limit);
    let base = simple_sieve(root.max(2));
    let mut out = Vec::with_capacity((limit as f64 / (limit as f64).ln().max(1.0) * 1.2) as usize);
    let mut seg = vec![false; SEGMENT as usize];
    let mut low = 2u64;
    while low <= limit {
        let high = (low + SEGMENT - 1).min(limit);
        let len = (high - low + 1) as usize;
        seg[..len].fill(false);
        for &p in &base {
            if p * p > high {
                break;
            }
            let mut start = (low.div_ceil(p) * p).max(p * p);
            while start <= high {
                seg[(start - low) as usize] = true;
                start += p;
            }
        }
        for (i, &c) in seg[..len].iter().enumerate() {
            if !c {
                out.push(low + i as u64);
            }
        }
        low = high + 1;
    }
    out
}

/// Smallest-prime-factor table for `0..=n` (entries 0 and 1 are 0).
pub fn smallest_factor_table(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            if p > si || i * p as usize > n {
                break;
            }
            spf[i * p as usize] = p;
        }
    }
    spf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let (t, c) = prime_prefix(30);
        assert_eq!(&t[..c], &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn indices() {
        assert_eq!(nth_prime(25), 97);
        assert_eq!(prime_index(97), 25);
        assert_eq!(prime_index(2), 1);
    }

    #[test]
    fn segmented_matches_simple() {
        let a = sieve(1_000_003);
        let b = simple_sieve(1_000_003);
        assert_eq!(a, b);
    }

    #[test]
    fn lucy_counts() {
        assert_eq!(prime_pi(100), 25);
        assert_eq!(prime_pi(1_000_000), 78_498);
        assert_eq!(prime_pi(1_000_000_000), 50_847_534);
    }

    #[test]
    fn spf_table() {
        let spf = smallest_factor_table(100);
        assert_eq!(spf[91], 7);
        assert_eq!(spf[97], 97);
        assert_eq!(spf[64], 2);
    }
}
