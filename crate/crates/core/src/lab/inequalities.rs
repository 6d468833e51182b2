//! Embedding and coefficient inequalities on random polynomials.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use super::config::measure_from_value;
use super::{job, ols, Job, LabConfig, PolynomialModel, VerificationReport};
use crate::arith::{generalized_divisor_table, nth_prime};
use crate::error::{Error, Result};
use crate::json::num;
use crate::measure::{MeasureSpec, WeightSequence};
use crate::norms::{
    a2_norm, ap_hp_paired, ap_norm, as_even, b2_norm, bp_norm_mc, even_ap_norm, even_bp_norm,
    h2_norm, mc_hp_norm, NormEstimate, SamplerConfig, DEFAULT_BUDGET,
};
use crate::poly::{DirichletPolynomial, Domain};
use crate::quad::{integrate, Tolerance};

fn torus_for(f: &DirichletPolynomial, samples: u64, seed: u64) -> SamplerConfig {
    SamplerConfig::torus(f.prime_support(), samples, seed)
}

/// Gaussian model coefficients scaled by `2^bits` and rounded.
fn quantized(model: &PolynomialModel, index: u64, bits: u32) -> Vec<(i128, i128)> {
    let scale = (1u64 << bits) as f64;
    model
        .raw_coefficients(index)
        .into_iter()
        .map(|(a, b)| ((a * scale).round() as i128, (b * scale).round() as i128))
        .collect()
}

/// `(Σ|b_n|²/d(n), (Σ|a_n|²)²)` exactly, with `b = a * a` the Dirichlet square.
pub fn b4_sides(a: &[(i128, i128)]) -> Result<(BigRational, BigInt)> {
    let n = a.len();
    let len = n * n;
    let d = generalized_divisor_table(2, len)?;
    let mut b = vec![(0i128, 0i128); len + 1];
    for (i, &(xr, xi)) in a.iter().enumerate() {
        for (j, &(yr, yi)) in a.iter().enumerate() {
            let k = (i + 1) * (j + 1);
            b[k].0 += xr * yr - xi * yi;
            b[k].1 += xr * yi + xi * yr;
        }
    }
    let mut by_d: BTreeMap<u64, BigInt> = BTreeMap::new();
    for k in 1..=len {
        let (re, im) = b[k];
        if re != 0 || im != 0 {
            *by_d.entry(d[k]).or_default() += BigInt::from(re) * re + BigInt::from(im) * im;
        }
    }
    let lhs = by_d
        .into_iter()
        .fold(BigRational::from_integer(0.into()), |acc, (dk, s)| {
            acc + BigRational::new(s, BigInt::from(dk))
        });
    let h2: BigInt = a
        .iter()
        .map(|&(r, i)| BigInt::from(r) * r + BigInt::from(i) * i)
        .sum();
    Ok((lhs, &h2 * &h2))
}

/// `‖f²‖²_{B²} <= ‖f‖⁴_{H²}` in exact arithmetic on quantized random polynomials.
pub fn b4_contraction(
    trials: u64,
    degree_max: usize,
    scale_bits: u32,
    seed: u64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if scale_bits > 20 || degree_max > 2000 {
        return Err(Error::InvalidParameter(
            "b4 check supports scale_bits <= 20 and degree_max <= 2000".into(),
        ));
    }
    let model = PolynomialModel::new(1, degree_max, seed)?;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let a = quantized(&model, t, scale_bits);
            let (lhs, rhs) = b4_sides(&a)?;
            let ratio = if rhs == BigInt::from(0) {
                0.0
            } else {
                num_traits::ToPrimitive::to_f64(&(&lhs / BigRational::from_integer(rhs.clone())))
                    .unwrap_or(f64::NAN)
            };
            Ok((lhs <= BigRational::from_integer(rhs), ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    let failed = outcomes.iter().filter(|o| !o.0).count();
    let worst = outcomes.iter().map(|o| o.1).fold(0.0, f64::max);
    Ok(VerificationReport::violations("b4_contraction", failed)
        .with_param("trials", trials)
        .with_param("degree_max", degree_max)
        .with_param("scale_bits", scale_bits)
        .with_real("max_ratio", worst)
        .timed(start))
}

fn mc_slack(a: &NormEstimate, b: &NormEstimate) -> f64 {
    2.0 * (a.std_error.powi(2) + b.std_error.powi(2)).sqrt()
}

/// `(‖f‖_{A^p_μ}, ‖f‖_{H^p})`, exact when `p` is even.
fn ap_and_hp(
    f: &DirichletPolynomial,
    mu: &MeasureSpec,
    p: f64,
    samples: u64,
    seed: u64,
) -> Result<(NormEstimate, NormEstimate)> {
    if p == 2.0 {
        return Ok((a2_norm(f, mu)?, h2_norm(f)));
    }
    if let Some(pe) = as_even(p) {
        return Ok((
            even_ap_norm(f, mu, pe, DEFAULT_BUDGET)?,
            crate::norms::even_hp_norm(f, pe, DEFAULT_BUDGET)?,
        ));
    }
    ap_hp_paired(f, mu, p, &torus_for(f, samples, seed))
}

fn bp_norm(f: &DirichletPolynomial, p: f64, samples: u64, seed: u64) -> Result<NormEstimate> {
    if p == 2.0 {
        return Ok(b2_norm(f));
    }
    if let Some(pe) = as_even(p) {
        return even_bp_norm(f, pe, DEFAULT_BUDGET);
    }
    bp_norm_mc(
        f,
        p,
        &torus_for(f, samples, seed).with_domain(Domain::Polydisk),
    )
}

fn hp_norm(f: &DirichletPolynomial, p: f64, samples: u64, seed: u64) -> Result<NormEstimate> {
    if p == 2.0 {
        return Ok(h2_norm(f));
    }
    if let Some(pe) = as_even(p) {
        return crate::norms::even_hp_norm(f, pe, DEFAULT_BUDGET);
    }
    mc_hp_norm(f, p, &torus_for(f, samples, seed))
}

/// `‖f‖_{A^p_μ} <= ‖f‖_{H^p}` and `‖f‖_{B^{2p}} <= ‖f‖_{H^p}` on random
/// polynomials, each within two combined standard errors.
pub fn contractions(
    mu: &MeasureSpec,
    model: &PolynomialModel,
    trials: u64,
    ps: &[f64],
    samples: u64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let checks = (0..trials)
        .into_par_iter()
        .map(|t| {
            let f = model.sample(t);
            let mut fails = (0usize, 0usize);
            for &p in ps {
                let (a, h) = ap_and_hp(&f, mu, p, samples, model.seed ^ t)?;
                if a.value > h.value + mc_slack(&a, &h) {
                    fails.0 += 1;
                }
                let b = bp_norm(&f, 2.0 * p, samples, model.seed ^ t)?;
                let h = if h.method == crate::norms::Method::MonteCarlo && as_even(p).is_none() {
                    hp_norm(&f, p, samples, model.seed ^ t)?
                } else {
                    h
                };
                if b.value > h.value + mc_slack(&b, &h) {
                    fails.1 += 1;
                }
            }
            Ok(fails)
        })
        .collect::<Result<Vec<_>>>()?;
    let a_fail: usize = checks.iter().map(|c| c.0).sum();
    let b_fail: usize = checks.iter().map(|c| c.1).sum();
    Ok(
        VerificationReport::violations("contractions", a_fail + b_fail)
            .with_param("measure", mu.to_config())
            .with_param("trials", trials)
            .with_param("ps", ps.iter().map(|&p| num(p)).collect::<Vec<_>>())
            .with_param("samples", samples)
            .with_param("ap_above_hp", a_fail)
            .with_param("b2p_above_hp", b_fail)
            .timed(start),
    )
}

/// `∫_𝔻 |z|^p dλ = 2 ∫_0^1 r^{p+1} dr`.
pub fn disk_moment(p: f64) -> Result<f64> {
    Ok(integrate(
        |r| 2.0 * r.powf(p + 1.0),
        0.0,
        1.0,
        Tolerance::new(0.0, 1e-14),
    )?
    .value)
}

/// `‖e_{p_n} − e_{p_m}‖_{B^p} >= (2/(p+2))^{1/p}` up to two standard errors,
/// and the one-variable moment `2/(p+2)` by radial quadrature.
pub fn basis_separation(
    ps: &[f64],
    pairs: &[[usize; 2]],
    samples: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut failed = 0usize;
    let mut rows = Vec::new();
    let mut moment_err = 0.0f64;
    for &p in ps {
        moment_err = moment_err.max((disk_moment(p)? - 2.0 / (p + 2.0)).abs());
        let threshold = (2.0 / (p + 2.0)).powf(1.0 / p);
        for &[n, m] in pairs {
            if n == m || n == 0 || m == 0 {
                return Err(Error::InvalidParameter(format!(
                    "basis pair ({n}, {m}) needs distinct positive indices"
                )));
            }
            let (pn, pm) = (nth_prime(n) as usize, nth_prime(m) as usize);
            let one = num_complex::Complex64::new(1.0, 0.0);
            let f = DirichletPolynomial::from_terms(pn.max(pm), &[(pn, one), (pm, -one)])?;
            let e = bp_norm(&f, p, samples, seed)?;
            let ok = e.value >= threshold - 2.0 * e.std_error;
            if !ok {
                failed += 1;
            }
            rows.push(serde_json::json!({
                "p": num(p), "pair": [n, m], "norm": e.to_json_value(), "threshold": num(threshold), "pass": ok,
            }));
        }
    }
    Ok(VerificationReport::violations("basis_separation", failed)
        .with_param("rows", rows)
        .with_real("moment_max_error", moment_err)
        .with_condition("radial moment matches 2/(p+2)", moment_err <= 1e-10)
        .with_surrogate("strict non-singularity is not a finite computation; a uniform lower bound on basis differences is checked")
        .timed(start))
}

/// Ratios `‖T_ε f‖_{A²_μ}/‖f‖_{A¹_μ}` on random polynomials. Degrees are split
/// into `bins`; the slope of the log bin maximum against log degree measures
/// growth and must stay at most `slope_max`.
#[allow(clippy::too_many_arguments)]
pub fn t_epsilon_experiment(
    mu: &MeasureSpec,
    epsilons: &[f64],
    trials: u64,
    degree_max: usize,
    samples: u64,
    bins: usize,
    slope_max: f64,
    seed: u64,
) -> Result<Vec<VerificationReport>> {
    let start = Instant::now();
    if epsilons.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidParameter("T_ε needs ε > 0".into()));
    }
    if bins < 2 || degree_max < bins {
        return Err(Error::InvalidParameter(
            "need at least two degree bins".into(),
        ));
    }
    let model = PolynomialModel::new(1, degree_max, seed)?;
    let mut eps: Vec<f64> = epsilons.to_vec();
    eps.sort_by(f64::total_cmp);
    // (degree, ratios in ascending ε)
    let data = (0..trials)
        .into_par_iter()
        .map(|t| {
            let f = model.sample(t);
            let a1 = if f.len() == 1 {
                a2_norm(&f, mu)?.value
            } else {
                ap_norm(&f, mu, 1.0, &torus_for(&f, samples, seed ^ t))?.value
            };
            let ratios = eps
                .iter()
                .map(|&e| Ok(a2_norm(&f.translate(e)?, mu)?.value / a1))
                .collect::<Result<Vec<f64>>>()?;
            Ok((f.len(), ratios))
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = data.iter().all(|(_, r)| r.windows(2).all(|w| w[1] <= w[0]));
    let one = DirichletPolynomial::constant(num_complex::Complex64::new(1.0, 0.0));
    let unit_ratio = a2_norm(&one.translate(eps[0])?, mu)?.value / a2_norm(&one, mu)?.value;
    let width = degree_max as f64 / bins as f64;
    let mut reports = Vec::new();
    for (k, &e) in eps.iter().enumerate() {
        let mut best = vec![f64::NEG_INFINITY; bins];
        for (deg, r) in &data {
            let b = (((*deg - 1) as f64 / width) as usize).min(bins - 1);
            best[b] = best[b].max(r[k]);
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = best
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(b, v)| (((b as f64 + 0.5) * width).ln(), v.ln()))
            .unzip();
        let fit = ols(&xs, &ys)?;
        let growth = fit.slope.max(0.0);
        let overall = best.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        reports.push(
            VerificationReport::numeric(format!("t_epsilon_{e}"), growth, 0.0, slope_max)
                .with_real("epsilon", e)
                .with_param("measure", mu.to_config())
                .with_param("trials", trials)
                .with_param("degree_max", degree_max)
                .with_param("samples", samples)
                .with_param("bin_maxima", best.iter().map(|&v| num(v)).collect::<Vec<_>>())
                .with_real("slope", fit.slope)
                .with_real("empirical_max", overall)
                .with_condition("ratio decreases in ε", monotone)
                .with_condition("constant polynomial has ratio 1", unit_ratio == 1.0)
                .with_surrogate("boundedness of T_ε from A¹ to A² is probed by the absence of growth with degree")
                .timed(start),
        );
    }
    Ok(reports)
}

/// Diagonal of `H² → A²_{μ_0}`: `1/(1 + log n)`, nonincreasing and tending to 0.
pub fn eigenvalue_decay(n_max: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let ws = WeightSequence::new(MeasureSpec::alpha(0.0)?);
    let w = ws.prefix(n_max as usize)?;
    let worst = w
        .iter()
        .enumerate()
        .map(|(i, &v)| (v - 1.0 / (1.0 + ((i + 1) as f64).ln())).abs())
        .fold(0.0, f64::max);
    let nonincreasing = w.windows(2).all(|p| p[1] <= p[0]);
    let last = *w.last().unwrap_or(&1.0);
    Ok(VerificationReport::numeric("eigenvalue_decay", worst, 0.0, 1e-12)
        .with_param("n_max", n_max)
        .with_real("last_eigenvalue", last)
        .with_condition("eigenvalues nonincreasing", nonincreasing)
        .with_condition("last eigenvalue below 1/(1 + log n_max) + 1e-12", last <= 1.0 / (1.0 + (n_max as f64).ln()) + 1e-12)
        .with_surrogate("compactness is not finitely testable; decay of the diagonal eigenvalues is reported instead")
        .timed(start))
}

/// Which space a coefficient inequality is about.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSpace {
    Bergman(MeasureSpec),
    B,
}

/// `(Σ w_n^{p′−1}|a_n|^{p′})^{1/p′}`, or `max w_n|a_n|` at `p = 1`.
pub fn weighted_coefficient_norm(f: &DirichletPolynomial, weights: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        return f
            .support()
            .map(|(n, a)| weights[n - 1] * a.norm())
            .fold(0.0, f64::max);
    }
    let q = p / (p - 1.0);
    f.support()
        .map(|(n, a)| weights[n - 1].powf(q - 1.0) * a.norm().powf(q))
        .sum::<f64>()
        .powf(1.0 / q)
}

/// Coefficient side against the space norm: `<=` for `p <= 2`, `>=` for `p >= 2`.
pub fn coefficient_inequalities(
    space: &CoefficientSpace,
    p: f64,
    model: &PolynomialModel,
    trials: u64,
    samples: u64,
    equality_tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    let weights = match space {
        CoefficientSpace::Bergman(mu) => {
            WeightSequence::new(mu.clone()).prefix(model.degree_max)?
        }
        CoefficientSpace::B => generalized_divisor_table(2, model.degree_max)?
            .iter()
            .skip(1)
            .map(|&d| 1.0 / d as f64)
            .collect(),
    };
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let f = model.sample(t);
            let c = weighted_coefficient_norm(&f, &weights, p);
            let seed = model.seed ^ t;
            let norm = match space {
                CoefficientSpace::Bergman(mu) => {
                    if p == 2.0 {
                        a2_norm(&f, mu)?
                    } else if let Some(pe) = as_even(p) {
                        even_ap_norm(&f, mu, pe, DEFAULT_BUDGET)?
                    } else {
                        ap_norm(&f, mu, p, &torus_for(&f, samples, seed))?
                    }
                }
                CoefficientSpace::B => bp_norm(&f, p, samples, seed)?,
            };
            let slack = 2.0 * norm.std_error;
            let ok = if p == 2.0 {
                (c - norm.value).abs() <= equality_tolerance
            } else if p < 2.0 {
                c <= norm.value + slack
            } else {
                norm.value <= c + slack
            };
            Ok((ok, c, norm.value))
        })
        .collect::<Result<Vec<_>>>()?;
    let failed = outcomes.iter().filter(|o| !o.0).count();
    let worst_ratio = outcomes
        .iter()
        .map(|o| if p <= 2.0 { o.1 / o.2 } else { o.2 / o.1 })
        .fold(0.0, f64::max);
    let (label, measure) = match space {
        CoefficientSpace::Bergman(mu) => ("bergman", mu.to_config()),
        CoefficientSpace::B => ("b", serde_json::Value::Null),
    };
    Ok(
        VerificationReport::violations(format!("coefficients_{label}_p{p}"), failed)
            .with_real("p", p)
            .with_param("measure", measure)
            .with_param("trials", trials)
            .with_param("samples", samples)
            .with_param(
                "direction",
                if p == 2.0 {
                    "equality"
                } else if p < 2.0 {
                    "coefficients <= norm"
                } else {
                    "norm <= coefficients"
                },
            )
            .with_real("worst_ratio", worst_ratio)
            .timed(start),
    )
}

pub(super) fn embedding_jobs(cfg: &LabConfig) -> Vec<Job<'_>> {
    let e = &cfg.embeddings;
    let seed = cfg.seed;
    let poly = &cfg.polynomials;
    let mut jobs: Vec<Job<'_>> = vec![
        job(move || b4_contraction(e.b4_trials, e.b4_degree_max, e.b4_scale_bits, seed)),
        job(move || {
            let mu = measure_from_value(&e.measure)?;
            let model = PolynomialModel::new(poly.degree_min, poly.degree_max, seed)?;
            contractions(
                &mu,
                &model,
                e.contraction_trials,
                &e.contraction_ps,
                e.samples,
            )
        }),
        job(move || basis_separation(&e.basis_ps, &e.basis_pairs, e.basis_samples, seed)),
        job(move || eigenvalue_decay(e.eigen_n_max)),
    ];
    let t = &e.t_epsilon;
    jobs.push(Box::new(move || {
        let mu = measure_from_value(&e.measure)?;
        t_epsilon_experiment(
            &mu,
            &t.epsilons,
            t.trials,
            t.degree_max,
            t.samples,
            t.bins,
            t.slope_max,
            seed,
        )
    }));
    jobs
}

pub(super) fn coefficient_jobs(cfg: &LabConfig) -> Vec<Job<'_>> {
    let c = &cfg.coefficients;
    let seed = cfg.seed;
    let poly = &cfg.polynomials;
    let mut jobs: Vec<Job<'_>> = Vec::new();
    for bergman in [true, false] {
        for &p in &c.ps {
            jobs.push(job(move || {
                let space = if bergman {
                    CoefficientSpace::Bergman(measure_from_value(&c.measure)?)
                } else {
                    CoefficientSpace::B
                };
                let model = PolynomialModel::new(poly.degree_min, poly.degree_max, seed)?;
                coefficient_inequalities(
                    &space,
                    p,
                    &model,
                    c.trials,
                    c.samples,
                    c.equality_tolerance,
                )
            }));
        }
    }
    jobs
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn b4_small_example() {
        // f = 1 + 2^{-s}: b = (1, 2, 1) at (1, 2, 4), d = (1, 2, 3)
        let (lhs, rhs) = b4_sides(&[(1, 0), (1, 0)]).unwrap();
        assert_eq!(lhs, BigRational::new(10.into(), 3.into()));
        assert_eq!(rhs, BigInt::from(4));
        // f = e_2: 1/d(4) = 1/3 against 1
        let (lhs, rhs) = b4_sides(&[(0, 0), (1, 0)]).unwrap();
        assert_eq!(lhs, BigRational::new(1.into(), 3.into()));
        assert_eq!(rhs, BigInt::from(1));
    }

    #[test]
    fn b4_random_trials() {
        let r = b4_contraction(50, 60, 16, 7).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn moments_and_separation() {
        for p in [1.0, 2.5, 4.0] {
            assert_relative_eq!(
                disk_moment(p).unwrap(),
                2.0 / (p + 2.0),
                max_relative = 1e-12
            );
        }
        let r = basis_separation(&[1.0, 2.0, 4.0], &[[1, 2]], 20_000, 3).unwrap();
        assert!(r.passed(), "{}", r.to_json_value());
    }

    #[test]
    fn coefficient_equality_at_two() {
        let model = PolynomialModel::new(2, 20, 11).unwrap();
        let mu = MeasureSpec::alpha(0.0).unwrap();
        let r = coefficient_inequalities(&CoefficientSpace::Bergman(mu), 2.0, &model, 20, 0, 1e-12)
            .unwrap();
        assert!(r.passed());
        let r = coefficient_inequalities(&CoefficientSpace::B, 4.0, &model, 20, 0, 1e-12).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn sup_form_at_one() {
        let f = DirichletPolynomial::from_terms(
            3,
            &[
                (1, num_complex::Complex64::new(0.5, 0.0)),
                (2, num_complex::Complex64::new(0.0, 2.0)),
            ],
        )
        .unwrap();
        assert_eq!(weighted_coefficient_norm(&f, &[1.0, 0.5, 0.5], 1.0), 1.0);
    }

    #[test]
    fn eigenvalues_decay() {
        assert!(eigenvalue_decay(10_000).unwrap().passed());
    }

    #[test]
    fn t_epsilon_small() {
        let mu = MeasureSpec::alpha(0.0).unwrap();
        let r = t_epsilon_experiment(&mu, &[0.5, 1.0], 20, 40, 400, 4, 0.5, 1).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r
            .iter()
            .all(|x| x.parameters["bin_maxima"].as_array().unwrap().len() == 4));
    }
}
