//! Coefficient identities behind the Littlewood–Paley formulas.

use std::time::Instant;

use super::{job, Job, LabConfig, VerificationReport};
use crate::error::Result;
use crate::json::num;
use crate::measure::{bergman_weight, beta_h, MeasureSpec};
use crate::quad::{integrate_to_infinity, Tolerance};

const TOL: Tolerance = Tolerance {
    abs: 0.0,
    rel: 1e-13,
    max_intervals: 4000,
};

/// `4 log²(n) ∫_0^∞ n^{−2σ} β_h(σ) dσ`.
pub fn lp_weight(mu: &MeasureSpec, n: u64) -> Result<f64> {
    let l = (n as f64).ln();
    let mut failure = None;
    let r = integrate_to_infinity(
        |s| match beta_h(mu, s) {
            Ok(b) => (-2.0 * s * l).exp() * b,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        TOL,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(4.0 * l * l * r.value)
}

/// Largest `|4 log²(n) ∫ n^{−2σ} β_h − w_n|` over `n ∈ [2, n_max]` for each measure.
pub fn lp_weight_identity(
    measures: &[MeasureSpec],
    n_max: u64,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_at = serde_json::Value::Null;
    for mu in measures {
        for n in 2..=n_max {
            let d = (lp_weight(mu, n)? - bergman_weight(mu, n)?).abs();
            if d > worst {
                worst = d;
                worst_at = serde_json::json!({"measure": mu.to_config(), "n": n});
            }
        }
    }
    Ok(
        VerificationReport::numeric("littlewood_paley_weight", worst, 0.0, tolerance)
            .with_param(
                "measures",
                measures
                    .iter()
                    .map(MeasureSpec::to_config)
                    .collect::<Vec<_>>(),
            )
            .with_param("n_max", n_max)
            .with_param("worst_at", worst_at)
            .timed(start),
    )
}

/// `∫_0^∞ σ e^{−2σ L} dσ` for `L = log x`.
pub fn lp_b2_integral(log_x: f64) -> Result<f64> {
    Ok(integrate_to_infinity(|s| s * (-2.0 * s * log_x).exp(), 0.0, TOL)?.value)
}

/// `∫ σ n^{−2σ} dσ = 1/(4 log² n)` for `n ∈ [2, n_max]` and at `x = e²`.
pub fn lp_b2_identity(n_max: u64, tolerance: f64) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut scaled_spread = (f64::INFINITY, f64::NEG_INFINITY);
    for n in 2..=n_max {
        let l = (n as f64).ln();
        let v = lp_b2_integral(l)?;
        worst = worst.max((v - 0.25 / (l * l)).abs());
        let scaled = v * l * l;
        scaled_spread = (scaled_spread.0.min(scaled), scaled_spread.1.max(scaled));
    }
    let at_e2 = lp_b2_integral(2.0)?;
    worst = worst.max((at_e2 - 1.0 / 16.0).abs());
    Ok(
        VerificationReport::numeric("littlewood_paley_b2", worst, 0.0, tolerance)
            .with_param("n_max", n_max)
            .with_real("value_at_e_squared", at_e2)
            .with_param(
                "scaled_range",
                vec![num(scaled_spread.0), num(scaled_spread.1)],
            )
            .with_condition(
                "value times log² n is constant",
                scaled_spread.1 - scaled_spread.0 <= 4.0 * tolerance,
            )
            .timed(start),
    )
}

pub(super) fn jobs(cfg: &LabConfig) -> Vec<Job<'_>> {
    let c = &cfg.littlewood_paley;
    vec![
        job(move || {
            let measures = c
                .alphas
                .iter()
                .map(|&a| MeasureSpec::alpha(a))
                .collect::<Result<Vec<_>>>()?;
            lp_weight_identity(&measures, c.n_max, c.weight_tolerance)
        }),
        job(move || lp_b2_identity(c.n_max, c.b2_tolerance)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weight_at_two() {
        let mu = MeasureSpec::alpha(0.0).unwrap();
        assert_relative_eq!(
            lp_weight(&mu, 2).unwrap(),
            1.0 / (1.0 + 2f64.ln()),
            max_relative = 1e-10
        );
    }

    #[test]
    fn weight_for_a_density() {
        let mu = MeasureSpec::parse("gamma:2,3").unwrap();
        for n in [2, 17, 300] {
            assert_relative_eq!(
                lp_weight(&mu, n).unwrap(),
                bergman_weight(&mu, n).unwrap(),
                max_relative = 1e-8
            );
        }
    }

    #[test]
    fn b2_identity_small() {
        assert!(lp_b2_identity(50, 1e-10).unwrap().passed());
        assert_relative_eq!(
            lp_b2_integral(2.0).unwrap(),
            1.0 / 16.0,
            max_relative = 1e-12
        );
    }
}
