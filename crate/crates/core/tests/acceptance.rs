//! Acceptance criteria 1 to 14, one pass/fail line each.
//!
//! Criteria run in sequence so the runtime limits are measured without
//! contention; the verdict lines go straight to stdout.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use dirichlet_spaces::eval::{
    annexe_compare, bp_kernel_witness, eval_norm_bp, eval_norm_hp, AnnexeConfig, Space,
};
use dirichlet_spaces::lab::asymptotics::{eval_sharpness, gamma2_check, injection_blowup};
use dirichlet_spaces::lab::identities::{
    alternating_sum_range, binomial_identity_range, divisor_consistency, weight_closed_form,
};
use dirichlet_spaces::lab::inequalities::{
    b4_contraction, coefficient_inequalities, contractions, CoefficientSpace,
};
use dirichlet_spaces::lab::littlewood::{lp_b2_identity, lp_weight_identity};
use dirichlet_spaces::lab::multipliers::multiplier_constants;
use dirichlet_spaces::lab::{LabConfig, PolynomialModel, VerificationReport};
use dirichlet_spaces::measure::MeasureSpec;
use dirichlet_spaces::norms::{b2_norm, bp_norm_mc, mc_hp_norm, SamplerConfig};
use dirichlet_spaces::poly::DirichletPolynomial;
use dirichlet_spaces::quad::{integrate, Tolerance};
use dirichlet_spaces::Result;
use num_complex::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn all_pass(reports: &[VerificationReport]) -> Outcome {
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name.as_str())
        .collect();
    let names: Vec<&str> = reports.iter().map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Outcome::new(
            true,
            format!("{} reports pass: {}", reports.len(), names.join(", ")),
        )
    } else {
        let detail: Vec<String> = reports
            .iter()
            .filter(|r| !r.passed())
            .map(|r| r.to_json_value().to_string())
            .collect();
        Outcome::new(
            false,
            format!("failed: {}; {}", failed.join(", "), detail.join("; ")),
        )
    }
}

fn within(outcome: Outcome, elapsed: Duration, limit_s: f64) -> Outcome {
    let secs = elapsed.as_secs_f64();
    let pass = outcome.pass && secs < limit_s;
    Outcome::new(
        pass,
        format!("{} [{secs:.2} s, limit {limit_s} s]", outcome.detail),
    )
}

fn timed(limit_s: f64, f: impl FnOnce() -> Result<Outcome>) -> Result<Outcome> {
    let start = Instant::now();
    let out = f()?;
    Ok(within(out, start.elapsed(), limit_s))
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn criterion_1(cfg: &LabConfig) -> Result<Outcome> {
    let id = &cfg.identities;
    assert_eq!((id.binomial_n_max, id.binomial_degree), (40, 300));
    timed(10.0, || Ok(all_pass(&[binomial_identity_range(40, 300)])))
}

fn criterion_2(_: &LabConfig) -> Result<Outcome> {
    timed(5.0, || Ok(all_pass(&[alternating_sum_range(60)])))
}

fn criterion_3(_: &LabConfig) -> Result<Outcome> {
    Ok(all_pass(&[divisor_consistency(6, 100_000, 20)?]))
}

fn criterion_4(cfg: &LabConfig) -> Result<Outcome> {
    let points = cfg.identities.weight_points;
    timed(5.0, || {
        Ok(all_pass(&[weight_closed_form(
            &[-0.5, 0.0, 1.0, 2.5],
            10_000,
            points,
            1e-9,
        )?]))
    })
}

fn criterion_5(cfg: &LabConfig) -> Result<Outcome> {
    let a = &cfg.asymptotics;
    Ok(all_pass(&[gamma2_check(
        a.gamma_primes,
        1e-8,
        0.505,
        [0.9, 1.1],
        a.euler_primes,
    )?]))
}

fn criterion_6(cfg: &LabConfig) -> Result<Outcome> {
    let a = &cfg.asymptotics;
    timed(60.0, || {
        let mut reports = Vec::new();
        for case in &a.blowup {
            assert!(case.window == [0.502, 0.53] && case.tolerance <= 0.1);
            reports.push(injection_blowup(case, a.residual_max, a.blowup_primes)?);
        }
        assert_eq!(reports.len(), 2);
        Ok(all_pass(&reports))
    })
}

fn criterion_7(_: &LabConfig) -> Result<Outcome> {
    let measures = [MeasureSpec::alpha(0.0)?, MeasureSpec::alpha(1.0)?];
    Ok(all_pass(&[
        lp_weight_identity(&measures, 1000, 1e-8)?,
        lp_b2_identity(1000, 1e-10)?,
    ]))
}

fn criterion_8(_: &LabConfig) -> Result<Outcome> {
    Ok(all_pass(&[
        eval_sharpness(0.0, 0.5005, [0.95, 1.05])?,
        eval_sharpness(1.0, 0.5005, [0.95, 1.05])?,
    ]))
}

fn criterion_9(cfg: &LabConfig) -> Result<Outcome> {
    let mut pass = true;
    let mut notes = Vec::new();
    for sigma in [0.6, 1.0] {
        let target = eval_norm_bp(re(sigma), 2.0)?.value;
        let witness = bp_kernel_witness(sigma, 10_000_000)?.value;
        let frac = witness / target;
        pass &= frac >= 0.9;
        notes.push(format!("σ={sigma}: witness/ζ(2σ) = {frac:.4}"));
    }
    let model = PolynomialModel::new(
        cfg.polynomials.degree_min,
        cfg.polynomials.degree_max,
        cfg.seed,
    )?;
    let mut exceed = 0;
    let mut worst = 0.0f64;
    for t in 0..20 {
        let f = model.sample(t);
        let norm = bp_norm_mc(
            &f,
            2.0,
            &SamplerConfig::polydisk(f.prime_support(), 100_000, cfg.seed ^ t),
        )?;
        for sigma in [0.6, 1.0] {
            let bound = eval_norm_bp(re(sigma), 2.0)?.value;
            let at = f.evaluate(re(sigma)).norm();
            worst = worst.max(at / (bound * norm.value));
            if at > bound * (norm.value + 2.0 * norm.std_error) {
                exceed += 1;
            }
        }
    }
    pass &= exceed == 0;
    notes.push(format!(
        "MC exceedances {exceed}/40, worst |f(σ)|/bound {worst:.4}"
    ));
    Ok(Outcome::new(pass, notes.join("; ")))
}

fn criterion_10(cfg: &LabConfig) -> Result<Outcome> {
    let f = DirichletPolynomial::new(vec![re(1.0), re(0.5)])?;
    let tol = Tolerance {
        abs: 1e-15,
        rel: 1e-14,
        max_intervals: 2000,
    };
    let oracle = integrate(
        |t| {
            (re(1.0) + 0.5 * Complex64::from_polar(1.0, t))
                .norm()
                .powi(3)
        },
        0.0,
        2.0 * PI,
        tol,
    )?
    .value
        / (2.0 * PI);
    let oracle = oracle.cbrt();
    let mc = mc_hp_norm(&f, 3.0, &SamplerConfig::torus(1, 1_000_000, cfg.seed))?;
    let hp_ok = (mc.value - oracle).abs() <= 3.0 * mc.std_error && mc.std_error < 0.01 * oracle;

    let model = PolynomialModel::new(
        cfg.polynomials.degree_min,
        cfg.polynomials.degree_max,
        cfg.seed,
    )?;
    let mut misses = 0;
    for t in 0..50 {
        let g = model.sample(t);
        let est = bp_norm_mc(
            &g,
            2.0,
            &SamplerConfig::polydisk(g.prime_support(), 100_000, cfg.seed ^ t),
        )?;
        if (est.value - b2_norm(&g).value).abs() > 3.0 * est.std_error {
            misses += 1;
        }
    }
    Ok(Outcome::new(
        hp_ok && misses == 0,
        format!(
            "H³: mc {:.6} ± {:.2e} vs oracle {oracle:.6}; B² MC outside 3 se on {misses}/50",
            mc.value, mc.std_error
        ),
    ))
}

fn criterion_11(cfg: &LabConfig) -> Result<Outcome> {
    let e = &cfg.embeddings;
    let b4 = b4_contraction(1000, 200, e.b4_scale_bits, cfg.seed)?;
    let model = PolynomialModel::new(
        cfg.polynomials.degree_min,
        cfg.polynomials.degree_max,
        cfg.seed,
    )?;
    let c = contractions(
        &MeasureSpec::alpha(0.0)?,
        &model,
        100,
        &[1.0, 1.5, 2.0],
        e.samples,
    )?;
    Ok(all_pass(&[b4, c]))
}

fn criterion_12(cfg: &LabConfig) -> Result<Outcome> {
    let m = &cfg.multipliers;
    Ok(all_pass(&[multiplier_constants(
        10_000,
        m.r_good,
        m.r_bad,
        &m.a_values,
        0.03,
        1e-12,
    )?]))
}

fn criterion_13(cfg: &LabConfig) -> Result<Outcome> {
    let model = PolynomialModel::new(
        cfg.polynomials.degree_min,
        cfg.polynomials.degree_max,
        cfg.seed,
    )?;
    let samples = cfg.coefficients.samples;
    let mut reports = Vec::new();
    for space in [
        CoefficientSpace::Bergman(MeasureSpec::alpha(0.0)?),
        CoefficientSpace::B,
    ] {
        for p in [1.0, 1.5, 2.0, 3.0, 4.0] {
            reports.push(coefficient_inequalities(
                &space, p, &model, 200, samples, 1e-12,
            )?);
        }
    }
    Ok(all_pass(&reports))
}

fn criterion_14(_: &LabConfig) -> Result<Outcome> {
    let cfg = AnnexeConfig::default();
    let mut pass = true;
    let mut notes = Vec::new();
    for sigma in [0.6, 0.75, 1.0] {
        for m in [2.0, 3.0] {
            let s = re(sigma);
            let hp =
                (eval_norm_hp(s, 2.0 * m)?.value - eval_norm_hp(s, 2.0)?.value.powf(1.0 / m)).abs();
            let bp =
                (eval_norm_bp(s, 2.0 * m)?.value - eval_norm_bp(s, 2.0)?.value.powf(1.0 / m)).abs();
            pass &= hp <= 1e-12 * eval_norm_hp(s, 2.0 * m)?.value
                && bp <= 1e-12 * eval_norm_bp(s, 2.0 * m)?.value;
        }
        for (space, ps) in [
            (Space::Hp, &[1.0, 2.0, 4.0][..]),
            (Space::Bp, &[1.0, 2.0, 4.0][..]),
            (Space::ApMu, &[2.0, 4.0][..]),
        ] {
            let report = annexe_compare(space, sigma, ps, &cfg)?;
            let failed: Vec<String> = report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.detail.clone())
                .collect();
            pass &= failed.is_empty();
            if !failed.is_empty() {
                notes.push(format!("{space} σ={sigma}: {}", failed.join(", ")));
            }
            if space == Space::ApMu {
                let rows: Vec<String> = report
                    .rows
                    .iter()
                    .map(|r| format!("p={} [{:.4}, {:.4}]", r.p, r.lower, r.upper))
                    .collect();
                notes.push(format!("A^p σ={sigma}: {}", rows.join(" ")));
            }
        }
    }
    Ok(Outcome::new(pass, notes.join("; ")))
}

#[test]
fn acceptance_criteria() {
    let cfg = LabConfig::default();
    let criteria: [fn(&LabConfig) -> Result<Outcome>; 14] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
        criterion_13,
        criterion_14,
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, run) in criteria.iter().enumerate() {
        let n = i + 1;
        let outcome = run(&cfg).unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        writeln!(out, "criterion {n:>2}: {verdict}  {}", outcome.detail).unwrap();
        out.flush().unwrap();
        if !outcome.pass {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
