//! Exact and Monte Carlo norms.
//!
//! Exact paths: `H²`, `A²_μ`, `B²` and the even exponents `p = 2m` through
//! `‖f‖_p^{2m} = ‖f^m‖_2²` in each space. Everything else is sampled on the
//! truncated torus `T^K` or polydisk `D^K`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::factor_table;
use crate::error::{Error, Result};
use crate::json::num;
use crate::measure::{quadrature_rule, MeasureSpec, WeightSequence};
use crate::poly::{power_full, Character, DirichletPolynomial, Domain};
use crate::quad::Rule;
use crate::rng::Stream;

/// Default coefficient budget for full products in even-exponent norms.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Samples per reduction block. Fixed so that results do not depend on
/// the number of worker threads.
const BLOCK: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Quadrature,
    MonteCarlo,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub method: Method,
    pub seed: Option<u64>,
}

impl NormEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            samples: 0,
            method: Method::Exact,
            seed: None,
        }
    }

    pub fn quadrature(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            samples: 0,
            method: Method::Quadrature,
            seed: None,
        }
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "value": num(self.value),
            "std_error": num(self.std_error),
            "samples": self.samples,
            "method": self.method.to_string(),
            "seed": self.seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub k: usize,
    pub samples: u64,
    pub seed: u64,
    pub domain: Domain,
}

impl SamplerConfig {
    pub fn torus(k: usize, samples: u64, seed: u64) -> Self {
        Self {
            k,
            samples,
            seed,
            domain: Domain::Torus,
        }
    }

    pub fn polydisk(k: usize, samples: u64, seed: u64) -> Self {
        Self {
            k,
            samples,
            seed,
            domain: Domain::Polydisk,
        }
    }

    pub fn with_domain(self, domain: Domain) -> Self {
        Self { domain, ..self }
    }
}

/// Coordinates for sample `stream_index`: a pure function of `(seed, stream_index)`.
pub fn sample_character(cfg: &SamplerConfig, stream_index: u64) -> Character {
    let mut coords = Vec::with_capacity(cfg.k);
    fill_coords(cfg, stream_index, &mut coords);
    Character::from_parts(coords, cfg.domain)
}

fn fill_coords(cfg: &SamplerConfig, stream_index: u64, out: &mut Vec<Complex64>) {
    out.clear();
    let mut s = Stream::new(cfg.seed, stream_index);
    for _ in 0..cfg.k {
        match cfg.domain {
            Domain::Torus => {
                let theta = s.next_f64();
                out.push(Complex64::from_polar(1.0, std::f64::consts::TAU * theta));
            }
            Domain::Polydisk => {
                let u = s.next_f64();
                let theta = s.next_f64();
                out.push(Complex64::from_polar(
                    u.sqrt(),
                    std::f64::consts::TAU * theta,
                ));
            }
        }
    }
}

/// `‖f‖_{H²} = (Σ|a_n|²)^{1/2}`.
pub fn h2_norm(f: &DirichletPolynomial) -> NormEstimate {
    NormEstimate::exact(f.l2_squared().sqrt())
}

/// `‖f‖_{A²_μ} = (Σ|a_n|² w_n)^{1/2}`.
pub fn a2_norm(f: &DirichletPolynomial, mu: &MeasureSpec) -> Result<NormEstimate> {
    let ws = WeightSequence::new(mu.clone());
    let top = f.support().map(|(n, _)| n).last().unwrap_or(1);
    let w = ws.prefix(top)?;
    let s: f64 = f.support().map(|(n, a)| a.norm_sqr() * w[n - 1]).sum();
    Ok(NormEstimate::exact(s.sqrt()))
}

/// `‖f‖_{B²} = (Σ|a_n|²/d(n))^{1/2}`.
pub fn b2_norm(f: &DirichletPolynomial) -> NormEstimate {
    NormEstimate::exact(b2_squared(f).sqrt())
}

fn b2_squared(f: &DirichletPolynomial) -> f64 {
    let t = factor_table(f.len());
    f.support()
        .map(|(n, a)| {
            let mut d = 1u64;
            t.for_each_factor(n, |_, e| d *= e as u64 + 1);
            a.norm_sqr() / d as f64
        })
        .sum()
}

fn even_order(p: u32) -> Result<u32> {
    if p < 2 || p % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "exact norm needs an even exponent, got {p}"
        )));
    }
    Ok(p / 2)
}

/// `‖f‖_{H^{2m}} = ‖f^m‖_{H²}^{1/m}`.
pub fn even_hp_norm(f: &DirichletPolynomial, p: u32, budget: u128) -> Result<NormEstimate> {
    let m = even_order(p)?;
    let g = power_full(f, m, budget)?;
    Ok(NormEstimate::exact(
        g.l2_squared().powf(1.0 / (2.0 * m as f64)),
    ))
}

/// `‖f‖_{A^{2m}_μ} = (Σ|b_n|² w_n)^{1/(2m)}` with `b = f^m`.
pub fn even_ap_norm(
    f: &DirichletPolynomial,
    mu: &MeasureSpec,
    p: u32,
    budget: u128,
) -> Result<NormEstimate> {
    let m = even_order(p)?;
    let g = power_full(f, m, budget)?;
    let s = a2_norm(&g, mu)?.value.powi(2);
    Ok(NormEstimate::exact(s.powf(1.0 / (2.0 * m as f64))))
}

/// `‖f‖_{B^{2m}} = (Σ|b_n|²/d(n))^{1/(2m)}` with `b = f^m`.
pub fn even_bp_norm(f: &DirichletPolynomial, p: u32, budget: u128) -> Result<NormEstimate> {
    let m = even_order(p)?;
    let g = power_full(f, m, budget)?;
    Ok(NormEstimate::exact(
        b2_squared(&g).powf(1.0 / (2.0 * m as f64)),
    ))
}

/// Integer `p` if `p` is an even integer.
pub fn as_even(p: f64) -> Option<u32> {
    if p >= 2.0 && p.fract() == 0.0 && (p as u32) % 2 == 0 && p <= 64.0 {
        Some(p as u32)
    } else {
        None
    }
}

/// Dense recurrence for `χ(n)`, `n <= N`.
struct CharacterPlan {
    len: usize,
    // for n >= 2: (n / spf(n), coordinate of spf(n) or usize::MAX when beyond K)
    steps: Vec<(u32, usize)>,
}

impl CharacterPlan {
    fn new(len: usize, k: usize) -> Self {
        let t = factor_table(len);
        let mut steps = vec![(0u32, usize::MAX); len + 1];
        for (n, step) in steps.iter_mut().enumerate().skip(2) {
            let p = t.smallest_factor(n);
            let idx = t.index_of_prime(p);
            *step = ((n / p) as u32, if idx <= k { idx - 1 } else { usize::MAX });
        }
        Self { len, steps }
    }

    fn fill(&self, coords: &[Complex64], out: &mut Vec<Complex64>) {
        out.clear();
        out.resize(self.len + 1, Complex64::new(0.0, 0.0));
        if self.len >= 1 {
            out[1] = Complex64::new(1.0, 0.0);
        }
        for n in 2..=self.len {
            let (rest, c) = self.steps[n];
            out[n] = if c == usize::MAX {
                Complex64::new(0.0, 0.0)
            } else {
                coords[c] * out[rest as usize]
            };
        }
    }
}

/// Running mean and second central moment (Chan et al. merge).
#[derive(Clone)]
struct Moments {
    n: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(k: usize) -> Self {
        Self {
            n: 0.0,
            mean: vec![0.0; k],
            m2: vec![0.0; k],
        }
    }

    fn push(&mut self, y: &[f64]) {
        self.n += 1.0;
        for i in 0..y.len() {
            let d = y[i] - self.mean[i];
            self.mean[i] += d / self.n;
            self.m2[i] += d * (y[i] - self.mean[i]);
        }
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0.0 {
            return;
        }
        let n = self.n + o.n;
        for i in 0..self.mean.len() {
            let d = o.mean[i] - self.mean[i];
            self.mean[i] += d * o.n / n;
            self.m2[i] += o.m2[i] + d * d * self.n * o.n / n;
        }
        self.n = n;
    }
}

fn check_coverage(f: &DirichletPolynomial, cfg: &SamplerConfig) -> Result<()> {
    let need = f.prime_support();
    if need > cfg.k {
        let t = factor_table(f.len());
        let index = f
            .support()
            .map(|(n, _)| n)
            .find(|&n| t.largest_prime_index(n) == need)
            .unwrap_or(0);
        return Err(Error::InsufficientCharacter {
            have: cfg.k,
            need,
            index,
        });
    }
    if cfg.samples < 2 {
        return Err(Error::InvalidParameter(
            "Monte Carlo needs at least 2 samples".into(),
        ));
    }
    Ok(())
}

/// Evaluates `stats` sample statistics per draw; returns `(mean, variance)` each.
fn run_mc<F>(cfg: &SamplerConfig, len: usize, stats: usize, per_sample: F) -> Vec<(f64, f64)>
where
    F: Fn(&[Complex64], &mut [f64]) + Sync,
{
    let plan = CharacterPlan::new(len, cfg.k);
    let blocks = cfg.samples.div_ceil(BLOCK);
    let partial: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = Moments::new(stats);
            let mut coords = Vec::with_capacity(cfg.k);
            let mut chi = Vec::with_capacity(len + 1);
            let mut y = vec![0.0; stats];
            let end = ((b + 1) * BLOCK).min(cfg.samples);
            for i in b * BLOCK..end {
                fill_coords(cfg, i, &mut coords);
                plan.fill(&coords, &mut chi);
                per_sample(&chi, &mut y);
                acc.push(&y);
            }
            acc
        })
        .collect();
    let mut total = Moments::new(stats);
    for m in &partial {
        total.merge(m);
    }
    let n = total.n;
    (0..stats)
        .map(|i| {
            (
                total.mean[i],
                if n > 1.0 {
                    total.m2[i] / (n - 1.0)
                } else {
                    0.0
                },
            )
        })
        .collect()
}

/// Value and std error of `m^{1/p}` from a mean `m` of p-th powers.
fn power_mean_estimate(mean: f64, var: f64, p: f64, cfg: &SamplerConfig) -> NormEstimate {
    let se_m = (var / cfg.samples as f64).sqrt();
    let value = mean.powf(1.0 / p);
    let std_error = if mean > 0.0 {
        se_m * mean.powf(1.0 / p - 1.0) / p
    } else {
        0.0
    };
    NormEstimate {
        value,
        std_error,
        samples: cfg.samples,
        method: Method::MonteCarlo,
        seed: Some(cfg.seed),
    }
}

fn dense(f: &DirichletPolynomial) -> (Vec<usize>, Vec<Complex64>) {
    f.support().map(|(n, a)| (n, *a)).unzip()
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "exponent p must be a finite real >= 1, got {p}"
        )));
    }
    Ok(())
}

/// `(E|f(χ)|^p)^{1/p}` for each `p`, all on one sample set.
fn mc_lift_norms(
    f: &DirichletPolynomial,
    ps: &[f64],
    cfg: &SamplerConfig,
) -> Result<Vec<NormEstimate>> {
    check_coverage(f, cfg)?;
    for &p in ps {
        check_p(p)?;
    }
    let (idx, coef) = dense(f);
    let stats = run_mc(cfg, f.len(), ps.len(), |chi, y| {
        let v: Complex64 = idx.iter().zip(&coef).map(|(&n, a)| a * chi[n]).sum();
        let r = v.norm();
        for (yi, &p) in y.iter_mut().zip(ps) {
            *yi = if p == 2.0 { r * r } else { r.powf(p) };
        }
    });
    Ok(stats
        .iter()
        .zip(ps)
        .map(|(&(m, v), &p)| power_mean_estimate(m, v, p, cfg))
        .collect())
}

fn require_domain(cfg: &SamplerConfig, domain: Domain) -> Result<()> {
    if cfg.domain != domain {
        return Err(Error::InvalidParameter(format!(
            "this estimator samples the {domain}, config says {}",
            cfg.domain
        )));
    }
    Ok(())
}

/// `‖f‖_{H^p}` for several `p` on the same torus samples.
pub fn mc_hp_norms(
    f: &DirichletPolynomial,
    ps: &[f64],
    cfg: &SamplerConfig,
) -> Result<Vec<NormEstimate>> {
    require_domain(cfg, Domain::Torus)?;
    mc_lift_norms(f, ps, cfg)
}

/// `‖f‖_{H^p}` by sampling `T^K`.
pub fn mc_hp_norm(f: &DirichletPolynomial, p: f64, cfg: &SamplerConfig) -> Result<NormEstimate> {
    Ok(mc_hp_norms(f, &[p], cfg)?[0])
}

/// `‖f‖_{B^p}` for several `p` on the same polydisk samples.
pub fn bp_norms_mc(
    f: &DirichletPolynomial,
    ps: &[f64],
    cfg: &SamplerConfig,
) -> Result<Vec<NormEstimate>> {
    require_domain(cfg, Domain::Polydisk)?;
    mc_lift_norms(f, ps, cfg)
}

/// `‖f‖_{B^p}` by sampling `D^K` with normalized area measure per factor.
pub fn bp_norm_mc(f: &DirichletPolynomial, p: f64, cfg: &SamplerConfig) -> Result<NormEstimate> {
    Ok(bp_norms_mc(f, &[p], cfg)?[0])
}

/// σ-rule for `f`, refined on the smooth surrogate `Σ|a_n|² n^{−2σ}`.
pub fn sigma_rule(f: &DirichletPolynomial, mu: &MeasureSpec) -> Result<Rule> {
    let terms: Vec<(f64, f64)> = f
        .support()
        .map(|(n, a)| ((n as f64).ln(), a.norm_sqr()))
        .collect();
    quadrature_rule(mu, |s| {
        terms.iter().map(|&(l, c)| c * (-2.0 * s * l).exp()).sum()
    })
}

/// `‖f‖_{A^p_μ} = (∫ ‖f_σ‖_{H^p}^p dμ)^{1/p}`; the inner norm is exact for
/// even `p` and sampled otherwise.
pub fn ap_norm(
    f: &DirichletPolynomial,
    mu: &MeasureSpec,
    p: f64,
    cfg: &SamplerConfig,
) -> Result<NormEstimate> {
    check_p(p)?;
    if let Some(pe) = as_even(p) {
        let g = power_full(f, pe / 2, DEFAULT_BUDGET)?;
        let rule = sigma_rule(&g, mu)?;
        let terms: Vec<(f64, f64)> = g
            .support()
            .map(|(n, a)| ((n as f64).ln(), a.norm_sqr()))
            .collect();
        let s = rule.apply(|sig| terms.iter().map(|&(l, c)| c * (-2.0 * sig * l).exp()).sum());
        return Ok(NormEstimate::quadrature(s.powf(1.0 / p)));
    }
    Ok(ap_hp_paired(f, mu, p, cfg)?.0)
}

/// `(‖f‖_{A^p_μ}, ‖f‖_{H^p})` from one torus sample set.
pub fn ap_hp_paired(
    f: &DirichletPolynomial,
    mu: &MeasureSpec,
    p: f64,
    cfg: &SamplerConfig,
) -> Result<(NormEstimate, NormEstimate)> {
    check_p(p)?;
    require_domain(cfg, Domain::Torus)?;
    check_coverage(f, cfg)?;
    let rule = sigma_rule(f, mu)?;
    let (idx, coef) = dense(f);
    let logs: Vec<f64> = idx.iter().map(|&n| (n as f64).ln()).collect();
    let rows: Vec<Vec<Complex64>> = rule
        .nodes
        .iter()
        .map(|&s| {
            coef.iter()
                .zip(&logs)
                .map(|(a, &l)| a * (-s * l).exp())
                .collect()
        })
        .collect();
    let weights = rule.weights.clone();
    let stats = run_mc(cfg, f.len(), 2, |chi, y| {
        let vals: Vec<Complex64> = idx.iter().map(|&n| chi[n]).collect();
        let mut acc = 0.0;
        for (row, &w) in rows.iter().zip(&weights) {
            let v: Complex64 = row.iter().zip(&vals).map(|(a, c)| a * c).sum();
            acc += w * v.norm().powf(p);
        }
        y[0] = acc;
        let v: Complex64 = coef.iter().zip(&vals).map(|(a, c)| a * c).sum();
        y[1] = v.norm().powf(p);
    });
    Ok((
        power_mean_estimate(stats[0].0, stats[0].1, p, cfg),
        power_mean_estimate(stats[1].0, stats[1].1, p, cfg),
    ))
}

/// `‖f‖_{D^p_μ} = (|a_1|^p + ‖f′‖_{A^p_μ}^p)^{1/p}`.
pub fn dirichlet_space_norm(
    f: &DirichletPolynomial,
    mu: &MeasureSpec,
    p: f64,
    cfg: &SamplerConfig,
) -> Result<NormEstimate> {
    check_p(p)?;
    let a1 = f.value_at_infinity().norm();
    let d = f.derivative();
    if d.support().next().is_none() {
        return Ok(NormEstimate::exact(a1));
    }
    let inner = ap_norm(&d, mu, p, cfg)?;
    let value = (a1.powf(p) + inner.value.powf(p)).powf(1.0 / p);
    let std_error = if value > 0.0 {
        inner.std_error * (inner.value / value).powf(p - 1.0)
    } else {
        0.0
    };
    Ok(NormEstimate {
        value,
        std_error,
        ..inner
    })
}

/// `‖f‖_{A²_μ}` through the σ-quadrature path (cross-check of the weight path).
pub fn a2_norm_by_quadrature(f: &DirichletPolynomial, mu: &MeasureSpec) -> Result<NormEstimate> {
    ap_norm(f, mu, 2.0, &SamplerConfig::torus(0, 0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{monomial, truncated_zeta};
    use crate::quad::{integrate, Tolerance};
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn poly(terms: &[(usize, f64)]) -> DirichletPolynomial {
        let len = terms.iter().map(|t| t.0).max().unwrap();
        DirichletPolynomial::from_terms(
            len,
            &terms.iter().map(|&(n, a)| (n, c(a))).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn exact_examples() {
        let f = poly(&[(2, 1.0), (3, 1.0)]);
        assert_relative_eq!(h2_norm(&f).value, 2f64.sqrt());
        assert_relative_eq!(b2_norm(&f).value, 1.0);
        assert_relative_eq!(b2_norm(&monomial(7).unwrap()).value, 0.5f64.sqrt());
        let one = DirichletPolynomial::constant(c(1.0));
        assert_eq!(h2_norm(&one).value, 1.0);
        assert_eq!(b2_norm(&one).value, 1.0);
        let mu0 = MeasureSpec::Alpha(0.0);
        assert_eq!(a2_norm(&one, &mu0).unwrap().value, 1.0);
        assert_relative_eq!(
            a2_norm(&monomial(2).unwrap(), &mu0).unwrap().value,
            (1.0 + 2f64.ln()).powf(-0.5),
            max_relative = 1e-15
        );
        let z = truncated_zeta(1000, 1.0).unwrap();
        let tail = 1.0 / 1000.0;
        assert!((h2_norm(&z).value.powi(2) - std::f64::consts::PI.powi(2) / 6.0).abs() <= tail);
    }

    #[test]
    fn dirac_weights_give_hardy_norm() {
        let f = DirichletPolynomial::new(
            (1..40)
                .map(|n| Complex64::new((n as f64).sin(), 1.0 / n as f64))
                .collect(),
        )
        .unwrap();
        assert_relative_eq!(
            a2_norm(&f, &MeasureSpec::DiracAtZero).unwrap().value,
            h2_norm(&f).value
        );
    }

    #[test]
    fn even_norm_of_zeta_matches_divisor_sum() {
        let sigma = 0.8;
        let n = 60;
        let z = truncated_zeta(n, sigma).unwrap();
        let v = even_hp_norm(&z, 4, DEFAULT_BUDGET).unwrap().value.powi(4);
        // f² has coefficient Σ_{de=k, d,e<=N} (de)^{−σ} = #{d | k : d <= N, k/d <= N} k^{−σ}
        let mut expect = 0.0;
        for k in 1..=n * n {
            let cnt = (1..=n).filter(|&d| k % d == 0 && k / d <= n).count() as f64;
            expect += cnt * cnt * (k as f64).powf(-2.0 * sigma);
        }
        assert_relative_eq!(v, expect, max_relative = 1e-12);
        assert_eq!(
            even_hp_norm(&DirichletPolynomial::constant(c(1.0)), 6, DEFAULT_BUDGET)
                .unwrap()
                .value,
            1.0
        );
        assert!(matches!(
            even_hp_norm(&z, 4, 100),
            Err(Error::MemoryBudget { .. })
        ));
        assert!(even_hp_norm(&z, 3, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn mc_constant_is_exact() {
        let one = DirichletPolynomial::constant(c(1.0));
        let e = mc_hp_norm(&one, 3.0, &SamplerConfig::torus(3, 1000, 1)).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.std_error, 0.0);
        let e = bp_norm_mc(&one, 1.5, &SamplerConfig::polydisk(2, 1000, 1)).unwrap();
        assert_eq!(e.value, 1.0);
    }

    #[test]
    fn mc_circle_oracle() {
        // ‖1 + z/2‖_{L³(T)} by 1D quadrature
        let f = poly(&[(1, 1.0), (2, 0.5)]);
        let exact = integrate(
            |t| {
                (Complex64::new(1.0, 0.0) + 0.5 * Complex64::from_polar(1.0, t))
                    .norm()
                    .powi(3)
            },
            0.0,
            std::f64::consts::TAU,
            Tolerance::default(),
        )
        .unwrap()
        .value
            / std::f64::consts::TAU;
        let e = mc_hp_norm(&f, 3.0, &SamplerConfig::torus(1, 200_000, 11)).unwrap();
        assert!((e.value - exact.cbrt()).abs() <= 3.0 * e.std_error);
    }

    #[test]
    fn mc_p2_matches_exact() {
        let f = poly(&[(1, 0.3), (2, 1.0), (6, -0.7), (9, 0.4), (10, 0.2)]);
        let cfg = SamplerConfig::torus(3, 100_000, 5);
        let e = mc_hp_norm(&f, 2.0, &cfg).unwrap();
        assert!((e.value - h2_norm(&f).value).abs() <= 3.0 * e.std_error);
        let e = bp_norm_mc(&f, 2.0, &cfg.with_domain(Domain::Polydisk)).unwrap();
        assert!((e.value - b2_norm(&f).value).abs() <= 3.0 * e.std_error);
        let p4 = mc_hp_norm(&f, 4.0, &cfg).unwrap();
        let exact4 = even_hp_norm(&f, 4, DEFAULT_BUDGET).unwrap().value;
        assert!((p4.value - exact4).abs() <= 3.0 * p4.std_error);
    }

    #[test]
    fn basis_element_bp() {
        for p in [1.0, 3.0, 4.0] {
            let e = bp_norm_mc(
                &monomial(2).unwrap(),
                p,
                &SamplerConfig::polydisk(1, 100_000, 3),
            )
            .unwrap();
            let exact = (2.0 / (p + 2.0)).powf(1.0 / p);
            assert!((e.value - exact).abs() <= 3.0 * e.std_error, "p = {p}");
        }
    }

    #[test]
    fn insufficient_k_is_rejected() {
        let f = monomial(5).unwrap();
        assert!(matches!(
            mc_hp_norm(&f, 3.0, &SamplerConfig::torus(2, 100, 0)),
            Err(Error::InsufficientCharacter { need: 3, .. })
        ));
        assert!(mc_hp_norm(&f, 3.0, &SamplerConfig::polydisk(3, 100, 0)).is_err());
    }

    #[test]
    fn determinism_across_thread_counts() {
        let f = poly(&[(1, 1.0), (2, 0.5), (3, -0.25), (5, 0.125)]);
        let cfg = SamplerConfig::torus(3, 20_000, 99);
        let a = mc_hp_norm(&f, 3.0, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| mc_hp_norm(&f, 3.0, &cfg).unwrap());
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let d = pool4.install(|| mc_hp_norm(&f, 3.0, &cfg).unwrap());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.value.to_bits(), d.value.to_bits());
        assert_eq!(a.std_error.to_bits(), d.std_error.to_bits());
    }

    #[test]
    fn sample_character_properties() {
        let cfg = SamplerConfig::torus(4, 0, 17);
        assert_eq!(sample_character(&cfg, 5), sample_character(&cfg, 5));
        assert_ne!(sample_character(&cfg, 5), sample_character(&cfg, 6));
        assert!(sample_character(&cfg, 9)
            .coords()
            .iter()
            .all(|z| (z.norm() - 1.0).abs() <= 1e-15));
        let pd = SamplerConfig::polydisk(4, 0, 17);
        assert!(sample_character(&pd, 9)
            .coords()
            .iter()
            .all(|z| z.norm() < 1.0));
        let n = 1_000_000u64;
        let mean: Complex64 = (0..n)
            .map(|i| sample_character(&SamplerConfig::torus(1, 0, 3), i).coords()[0])
            .sum::<Complex64>()
            / n as f64;
        assert!(mean.norm() <= 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn ap_paths() {
        let mu = MeasureSpec::Alpha(0.0);
        let f = poly(&[(1, 0.5), (2, 1.0), (3, -0.3), (12, 0.8)]);
        let q = a2_norm_by_quadrature(&f, &mu).unwrap();
        assert_eq!(q.method, Method::Quadrature);
        assert_relative_eq!(
            q.value,
            a2_norm(&f, &mu).unwrap().value,
            max_relative = 1e-9
        );
        let one = DirichletPolynomial::constant(c(1.0));
        assert_relative_eq!(
            ap_norm(&one, &mu, 3.0, &SamplerConfig::torus(1, 100, 1))
                .unwrap()
                .value,
            1.0,
            max_relative = 1e-12
        );
        let a4 = ap_norm(&f, &mu, 4.0, &SamplerConfig::torus(5, 0, 0))
            .unwrap()
            .value;
        assert_relative_eq!(
            a4,
            even_ap_norm(&f, &mu, 4, DEFAULT_BUDGET).unwrap().value,
            max_relative = 1e-9
        );
        let (a, h) = ap_hp_paired(&f, &mu, 3.0, &SamplerConfig::torus(5, 50_000, 2)).unwrap();
        assert!(a.value <= h.value + 2.0 * (a.std_error + h.std_error));
    }

    #[test]
    fn dirichlet_space_examples() {
        let mu0 = MeasureSpec::Alpha(0.0);
        let cfg = SamplerConfig::torus(2, 1000, 1);
        let k = DirichletPolynomial::constant(c(-3.0));
        assert_eq!(
            dirichlet_space_norm(&k, &mu0, 2.0, &cfg).unwrap().value,
            3.0
        );
        let v = dirichlet_space_norm(&monomial(2).unwrap(), &mu0, 2.0, &cfg)
            .unwrap()
            .value;
        let l = 2f64.ln();
        assert_relative_eq!(v, (l * l / (1.0 + l)).sqrt(), max_relative = 1e-9);
        let f = poly(&[(1, 0.7), (3, 1.0)]);
        assert!(
            dirichlet_space_norm(&f, &mu0, 3.0, &SamplerConfig::torus(2, 5000, 4))
                .unwrap()
                .value
                >= 0.7
        );
    }

    #[test]
    fn holder_on_shared_samples() {
        let f = poly(&[(1, 1.0), (2, -0.6), (3, 0.9), (4, 0.2), (6, 0.3)]);
        let ps = [1.0, 1.5, 2.0, 3.0, 4.5];
        let est = mc_hp_norms(&f, &ps, &SamplerConfig::torus(2, 5000, 8)).unwrap();
        assert!(est.windows(2).all(|w| w[0].value <= w[1].value));
    }
}
