//! Exact combinatorial identities and the closed-form weight check.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{job, log_spaced, Job, LabConfig, VerificationReport};
use crate::arith::{
    dirichlet_convolve, generalized_divisor, generalized_divisor_table, ArithmeticSequence,
};
use crate::error::Result;
use crate::measure::{bergman_weight_by_quadrature, MeasureSpec};

fn choose(n: u64, k: u64) -> BigInt {
    if k > n {
        BigInt::zero()
    } else {
        binomial(BigInt::from(n), BigInt::from(k))
    }
}

fn rational(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// `Σ_k |c_k − e_k|` over `k <= K`, where `c` are the coefficients of
/// `(Σ_{k<=K} C(n+k,n)² z^k)(1−z)^{2n+1}` and `e_k = C(n,k)²` (zero for `k > n`).
fn binomial_defect(n: u64, degree: usize) -> (BigInt, usize) {
    let mut series = Vec::with_capacity(degree + 1);
    let mut c = BigInt::one();
    for k in 0..=degree as u64 {
        series.push(&c * &c);
        c = c * BigInt::from(n + k + 1) / BigInt::from(k + 1);
    }
    let factor: Vec<BigInt> = (0..=2 * n + 1)
        .map(|j| {
            if j % 2 == 0 {
                choose(2 * n + 1, j)
            } else {
                -choose(2 * n + 1, j)
            }
        })
        .collect();
    let mut defect = BigInt::zero();
    let mut mismatched = 0;
    for k in 0..=degree {
        let mut acc = BigInt::zero();
        for (j, f) in factor.iter().enumerate().take(k + 1) {
            acc += f * &series[k - j];
        }
        let expected = {
            let b = choose(n, k as u64);
            &b * &b
        };
        let d = (acc - expected).abs();
        if !d.is_zero() {
            mismatched += 1;
        }
        defect += d;
    }
    (defect, mismatched)
}

/// `(Σ_{k} C(n+k,n)² z^k)(1−z)^{2n+1} = Σ_k C(n,k)² z^k`, coefficientwise for `k <= K`.
pub fn verify_binomial_identity(n: u64, degree: usize) -> VerificationReport {
    let start = Instant::now();
    let (defect, mismatched) = binomial_defect(n, degree);
    VerificationReport::exact("binomial_identity", rational(defect), BigRational::zero())
        .with_param("n", n)
        .with_param("degree", degree)
        .with_param("mismatched_coefficients", mismatched)
        .timed(start)
}

/// The identity for every `0 <= n <= n_max`; `lhs` is the total coefficient defect.
pub fn binomial_identity_range(n_max: u64, degree: usize) -> VerificationReport {
    let start = Instant::now();
    let mut total = BigInt::zero();
    let mut mismatched = 0;
    for n in 0..=n_max {
        let (d, m) = binomial_defect(n, degree);
        total += d;
        mismatched += m;
    }
    VerificationReport::exact("binomial_identity", rational(total), BigRational::zero())
        .with_param("n_max", n_max)
        .with_param("degree", degree)
        .with_param("mismatched_coefficients", mismatched)
        .timed(start)
}

fn alternating_lhs(n: u64, m: u64) -> BigInt {
    let mut acc = BigInt::zero();
    for j in 0..=m.min(2 * n + 1) {
        let c = choose(n + m - j, n);
        let term = choose(2 * n + 1, j) * &c * &c;
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// `Σ_{j<=min(m,2n+1)} (−1)^j C(2n+1,j) C(n+m−j,n)² = C(n,m)²`.
pub fn verify_alternating_sum(n: u64, m: u64) -> VerificationReport {
    let start = Instant::now();
    let rhs = {
        let b = choose(n, m);
        &b * &b
    };
    VerificationReport::exact(
        "alternating_sum",
        rational(alternating_lhs(n, m)),
        rational(rhs),
    )
    .with_param("n", n)
    .with_param("m", m)
    .timed(start)
}

/// All pairs `1 <= n, m <= max`; sides are the sums over pairs, and every
/// pair must match on its own.
pub fn alternating_sum_range(max: u64) -> VerificationReport {
    let start = Instant::now();
    let (mut lhs, mut rhs) = (BigInt::zero(), BigInt::zero());
    let mut mismatched = 0;
    for n in 1..=max {
        for m in 1..=max {
            let l = alternating_lhs(n, m);
            let b = choose(n, m);
            let r = &b * &b;
            if l != r {
                mismatched += 1;
            }
            lhs += l;
            rhs += r;
        }
    }
    VerificationReport::exact("alternating_sum", rational(lhs), rational(rhs))
        .with_param("max", max)
        .with_param("mismatched_pairs", mismatched)
        .with_condition("every pair matches", mismatched == 0)
        .timed(start)
}

/// `d_m` three ways for `m <= m_max`, `n <= n_max`: per-n factorization,
/// the multiplicative sieve, and the m-fold convolution of ones. Also
/// `d_m(p^k) = C(m+k−1, m−1)` for `p ∈ {2, 3}`, `k <= k_max`.
pub fn divisor_consistency(m_max: u32, n_max: usize, k_max: u32) -> Result<VerificationReport> {
    let start = Instant::now();
    let ones = ArithmeticSequence::from_vec(vec![1u64; n_max])?;
    let mut conv = ones.clone();
    let mut failures = 0usize;
    for m in 1..=m_max {
        if m > 1 {
            conv = dirichlet_convolve(&conv, &ones)?;
        }
        let sieve = generalized_divisor_table(m, n_max)?;
        for n in 1..=n_max {
            let direct = generalized_divisor(m as u64, n as u64)?;
            let c = *conv.get(n) as u128;
            if direct != c || sieve[n] as u128 != c {
                failures += 1;
            }
        }
        for p in [2u64, 3] {
            for k in 0..=k_max {
                let v = generalized_divisor(m as u64, p.pow(k))?;
                if BigInt::from(v) != choose((m + k - 1) as u64, (m - 1) as u64) {
                    failures += 1;
                }
            }
        }
    }
    Ok(
        VerificationReport::violations("divisor_function_consistency", failures)
            .with_param("m_max", m_max)
            .with_param("n_max", n_max)
            .with_param("k_max", k_max)
            .timed(start),
    )
}

/// Quadrature weights `∫ n^{−2σ} dμ_α` against `(1 + log n)^{−1−α}`; `lhs` is
/// the largest absolute deviation.
pub fn weight_closed_form(
    alphas: &[f64],
    n_max: u64,
    points: usize,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let ns = log_spaced(2, n_max, points);
    let mut worst = 0.0f64;
    for &a in alphas {
        let mu = MeasureSpec::alpha(a)?;
        for &n in &ns {
            let q = bergman_weight_by_quadrature(&mu, n)?;
            let exact = (1.0 + (n as f64).ln()).powf(-1.0 - a);
            worst = worst.max((q - exact).abs());
        }
    }
    Ok(
        VerificationReport::numeric("weight_closed_form", worst, 0.0, tolerance)
            .with_param("alphas", alphas.to_vec())
            .with_param("n", ns)
            .timed(start),
    )
}

pub(super) fn jobs(cfg: &LabConfig) -> Vec<Job<'_>> {
    let c = &cfg.identities;
    vec![
        job(move || {
            Ok(binomial_identity_range(
                c.binomial_n_max as u64,
                c.binomial_degree,
            ))
        }),
        job(move || Ok(alternating_sum_range(c.alternating_max as u64))),
        job(move || divisor_consistency(c.divisor_m_max, c.divisor_n_max, c.divisor_k_max)),
        job(move || {
            weight_closed_form(
                &c.weight_alphas,
                c.weight_n_max,
                c.weight_points,
                c.weight_tolerance,
            )
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_cases() {
        assert!(verify_binomial_identity(0, 50).passed());
        assert!(verify_binomial_identity(1, 50).passed());
        // n = 1 series is Σ(k+1)² z^k = (1+z)/(1−z)³
        let (d, _) = binomial_defect(1, 10);
        assert!(d.is_zero());
    }

    #[test]
    fn alternating_examples() {
        assert_eq!(alternating_lhs(1, 1), BigInt::from(1));
        assert!(verify_alternating_sum(1, 1).passed());
        let r = verify_alternating_sum(3, 7);
        assert!(r.passed());
        assert_eq!(r.rhs, super::super::Quantity::integer(0));
    }

    #[test]
    fn detects_a_broken_identity() {
        // exponent 2n instead of 2n+1 must leave a nonzero defect
        let n = 2u64;
        let mut series = Vec::new();
        let mut c = BigInt::one();
        for k in 0..20u64 {
            series.push(&c * &c);
            c = c * BigInt::from(n + k + 1) / BigInt::from(k + 1);
        }
        let mut acc = BigInt::zero();
        for j in 0..=(2 * n) {
            let f = if j % 2 == 0 {
                choose(2 * n, j)
            } else {
                -choose(2 * n, j)
            };
            acc += f * &series[(2 * n + 2 - j) as usize];
        }
        assert!(!acc.is_zero());
    }

    #[test]
    fn divisor_and_weight_small() {
        assert!(divisor_consistency(4, 2000, 10).unwrap().passed());
        assert!(weight_closed_form(&[0.0, 1.0], 1000, 8, 1e-9)
            .unwrap()
            .passed());
    }
}
