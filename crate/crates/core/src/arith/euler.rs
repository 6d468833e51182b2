use super::primes::prime_prefix;
use crate::error::{Error, Result};

/// Truncated Euler product with its tail diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerProduct {
    pub value: f64,
    pub log_value: f64,
    /// `|log Π|` over the last 10% of primes used.
    pub truncation_estimate: f64,
    pub primes_used: usize,
}

/// `Π_{p <= p_max} local_factor(p)`, accumulated in log space.
pub fn euler_product(local_factor: impl Fn(u64) -> f64, p_max: u64) -> Result<EulerProduct> {
    let (table, count) = prime_prefix(p_max);
    let primes = &table[..count];
    let tail_start = count - count / 10;
    let mut log_sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut tail = 0.0f64;
    for (i, &p) in primes.iter().enumerate() {
        let v = local_factor(p);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveFactor { prime: p, value: v });
        }
        let l = v.ln();
        // Kahan summation
        let y = l - comp;
        let t = log_sum + y;
        comp = (t - log_sum) - y;
        log_sum = t;
        if i >= tail_start {
            tail += l;
        }
    }
    Ok(EulerProduct {
        value: log_sum.exp(),
        log_value: log_sum,
        truncation_estimate: tail.abs(),
        primes_used: count,
    })
}

/// Same as [`euler_product`] with `log local_factor(p)` supplied directly.
pub fn euler_log_product(log_factor: impl Fn(u64) -> f64, p_max: u64) -> Result<EulerProduct> {
    let (table, count) = prime_prefix(p_max);
    let primes = &table[..count];
    let tail_start = count - count / 10;
    let mut log_sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut tail = 0.0f64;
    for (i, &p) in primes.iter().enumerate() {
        let l = log_factor(p);
        if !l.is_finite() {
            return Err(Error::NonPositiveFactor {
                prime: p,
                value: l.exp(),
            });
        }
        let y = l - comp;
        let t = log_sum + y;
        comp = (t - log_sum) - y;
        log_sum = t;
        if i >= tail_start {
            tail += l;
        }
    }
    Ok(EulerProduct {
        value: log_sum.exp(),
        log_value: log_sum,
        truncation_estimate: tail.abs(),
        primes_used: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_product() {
        let e = euler_product(|_| 1.0, 1000).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.truncation_estimate, 0.0);
    }

    #[test]
    fn zeta_two() {
        let e = euler_product(|p| 1.0 / (1.0 - (p as f64).powi(-2)), 1_000_000).unwrap();
        let partial: f64 = (1..=2_000_000u64)
            .rev()
            .map(|n| 1.0 / (n as f64 * n as f64))
            .sum::<f64>()
            + 1.0 / 2_000_000.0;
        assert!((e.value - partial).abs() < 1e-6);
        assert!(e.truncation_estimate > 0.0);
    }

    #[test]
    fn mertens_divergence() {
        let mut prev = 1.0;
        for p_max in [100, 1000, 10_000, 100_000] {
            let v = euler_product(|p| 1.0 - 1.0 / p as f64, p_max)
                .unwrap()
                .value;
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 0.06);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(matches!(
            euler_product(|p| if p == 7 { 0.0 } else { 1.0 }, 100),
            Err(Error::NonPositiveFactor { prime: 7, .. })
        ));
    }
}
