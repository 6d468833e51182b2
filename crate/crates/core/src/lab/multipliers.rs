//! Multiplier constants on the disk: `r₀ = 2/3` and the `r² <= 1/2` expansion.

use std::f64::consts::PI;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{job, Job, LabConfig, VerificationReport};
use crate::error::{Error, Result};
use crate::json::num;
use crate::norms::b2_norm;
use crate::poly::DirichletPolynomial;
use crate::quad::{integrate, Tolerance};

const TOL: Tolerance = Tolerance {
    abs: 1e-15,
    rel: 1e-13,
    max_intervals: 4000,
};

/// `(j*, min_j (2/(j+2))^{1/j})` over `1 <= j <= j_max`.
pub fn r0_scan(j_max: u64) -> (u64, f64) {
    (1..=j_max)
        .map(|j| (j, (2.0 / (j as f64 + 2.0)).powf(1.0 / j as f64)))
        .fold(
            (0, f64::INFINITY),
            |best, c| {
                if c.1 < best.1 {
                    c
                } else {
                    best
                }
            },
        )
}

/// `2·3^j >= (j+2)·2^j` for every `1 <= j <= j_max`, in integers; this is
/// `(2/(j+2))^{1/j} >= 2/3`.
pub fn r0_lower_bound_exact(j_max: u64) -> bool {
    let (mut three, mut two) = (BigInt::one(), BigInt::one());
    for j in 1..=j_max {
        three *= 3;
        two *= 2;
        if BigInt::from(2) * &three < BigInt::from(j + 2) * &two {
            return false;
        }
    }
    true
}

/// `x ↦ log(2/(x+2))/x` is increasing: its derivative has the sign of
/// `log u − 1 + 1/u` with `u = (x+2)/2 > 1`, checked on `j <= j_max` along
/// with the values themselves.
pub fn r0_monotone_certificate(j_max: u64) -> bool {
    let g = |x: f64| (2.0 / (x + 2.0)).ln() / x;
    (1..=j_max).all(|j| {
        let u = (j as f64 + 2.0) / 2.0;
        let numerator = u.ln() - 1.0 + 1.0 / u;
        numerator > 0.0 && (j == j_max || g(j as f64) < g(j as f64 + 1.0))
    })
}

/// `sup_{j>=0} r^{2j}(j+2)²/4 <= 1` for rational `r = num/den`, exactly. Terms
/// are compared up to the first `j₀` where the step ratio `r²((j+3)/(j+2))²`
/// drops to at most 1; the ratio decreases in `j`, so later terms only shrink.
pub fn sup_bound_exact(num_r: u64, den_r: u64) -> Result<(bool, BigRational)> {
    if den_r == 0 || num_r >= den_r {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= r < 1, got {num_r}/{den_r}"
        )));
    }
    let r2 = BigRational::new(BigInt::from(num_r * num_r), BigInt::from(den_r * den_r));
    let mut power = BigRational::one();
    let mut sup = BigRational::from_integer(0.into());
    for j in 0u64.. {
        let jb = BigInt::from(j + 2);
        let term =
            &power * BigRational::from_integer(&jb * &jb) / BigRational::from_integer(4.into());
        if term > sup {
            sup = term;
        }
        let step = BigRational::new(BigInt::from((j + 3) * (j + 3)), &jb * &jb) * &r2;
        if step <= BigRational::one() {
            break;
        }
        power *= &r2;
    }
    Ok((sup <= BigRational::one(), sup))
}

/// `sup_j r^{2j}(j+2)²/4` in floating point over `j <= j_max`.
pub fn sup_bound(r: f64, j_max: u64) -> f64 {
    (0..=j_max)
        .map(|j| r.powi(2 * j as i32) * ((j + 2) as f64).powi(2) / 4.0)
        .fold(0.0, f64::max)
}

/// `∫_𝔻 g dλ` with `dλ = r dr dθ / π`, nested adaptive quadrature.
pub fn disk_integral(g: impl Fn(Complex64) -> f64) -> Result<f64> {
    let mut failure = None;
    let outer = integrate(
        |r| match integrate(|t| g(Complex64::from_polar(r, t)), 0.0, 2.0 * PI, TOL) {
            Ok(q) => q.value * r / PI,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        1.0,
        TOL,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(outer.value)
}

/// `‖1 + az‖_{B¹} = ∫_𝔻 |1 + az| dλ`.
pub fn b1_norm_linear(a: f64) -> Result<f64> {
    disk_integral(|z| (1.0 + a * z).norm())
}

/// Least squares `y ≈ c x² + d x⁴`; returns `(c, d)`.
pub fn quadratic_quartic_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let (mut s4, mut s6, mut s8, mut t2, mut t4) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&a, &v) in x.iter().zip(y) {
        let a2 = a * a;
        s4 += a2 * a2;
        s6 += a2 * a2 * a2;
        s8 += a2 * a2 * a2 * a2;
        t2 += a2 * v;
        t4 += a2 * a2 * v;
    }
    let det = s4 * s8 - s6 * s6;
    if x.len() < 2 || !(det.abs() > 0.0) {
        return Err(Error::InvalidParameter(
            "fit needs at least two distinct nonzero points".into(),
        ));
    }
    Ok(((t2 * s8 - t4 * s6) / det, (s4 * t4 - s6 * t2) / det))
}

pub fn multiplier_constants(
    j_max: u64,
    r_good: [u64; 2],
    r_bad: f64,
    a_values: &[f64],
    quadratic_tolerance: f64,
    b2_tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let (j_star, inf) = r0_scan(j_max);
    let r0 = if j_star == 1 {
        BigRational::new(2.into(), 3.into())
    } else {
        BigRational::from_float(inf)
            .ok_or_else(|| Error::InvalidParameter("non-finite r₀".into()))?
    };
    let lower_exact = r0_lower_bound_exact(j_max);
    let monotone = r0_monotone_certificate(j_max);

    let (good_ok, good_sup) = sup_bound_exact(r_good[0], r_good[1])?;
    let bad_sup = sup_bound(r_bad, j_max);

    let norms = a_values
        .iter()
        .map(|&a| b1_norm_linear(a))
        .collect::<Result<Vec<f64>>>()?;
    let excess: Vec<f64> = norms.iter().map(|n| n - 1.0).collect();
    let (c, d) = quadratic_quartic_fit(a_values, &excess)?;

    let r = r_good[0] as f64 / r_good[1] as f64;
    let mut b2_worst = 0.0f64;
    for &a in a_values {
        let target = 1.0 + a * a * r * r / 2.0;
        let f =
            DirichletPolynomial::new(vec![Complex64::new(1.0, 0.0), Complex64::new(a * r, 0.0)])?;
        let by_formula = b2_norm(&f).value.powi(2);
        let by_quadrature = disk_integral(|z| (1.0 + a * r * z).norm_sqr())?;
        b2_worst = b2_worst
            .max((by_formula - target).abs())
            .max((by_quadrature - target).abs());
    }

    Ok(VerificationReport::exact(
        "multiplier_constants",
        r0,
        BigRational::new(2.into(), 3.into()),
    )
    .with_param("j_max", j_max)
    .with_param("argmin_j", j_star)
    .with_real("r0_float", inf)
    .with_param("r_good", format!("{}/{}", r_good[0], r_good[1]))
    .with_real("sup_at_r_good", good_sup.to_f64().unwrap_or(f64::NAN))
    .with_real("r_bad", r_bad)
    .with_real("sup_at_r_bad", bad_sup)
    .with_param(
        "a_values",
        a_values.iter().map(|&a| num(a)).collect::<Vec<_>>(),
    )
    .with_param(
        "b1_norms",
        norms.iter().map(|&v| num(v)).collect::<Vec<_>>(),
    )
    .with_real("quadratic_coefficient", c)
    .with_real("quartic_coefficient", d)
    .with_real("implied_r_squared_bound", 4.0 * c)
    .with_real("b2_max_deviation", b2_worst)
    .with_condition("(2/(j+2))^{1/j} >= 2/3 exactly for all j", lower_exact)
    .with_condition("log(2/(x+2))/x increasing", monotone)
    .with_condition("sup bound holds at r_good", good_ok)
    .with_condition("sup bound fails at r_bad", bad_sup > 1.0)
    .with_condition(
        "quadratic coefficient near 1/8",
        (c - 0.125).abs() <= quadratic_tolerance * 0.125,
    )
    .with_condition(
        "B² norm of 1 + arz matches 1 + a²r²/2",
        b2_worst <= b2_tolerance,
    )
    .timed(start))
}

pub(super) fn jobs(cfg: &LabConfig) -> Vec<Job<'_>> {
    let c = &cfg.multipliers;
    vec![job(move || {
        multiplier_constants(
            c.j_max,
            c.r_good,
            c.r_bad,
            &c.a_values,
            c.quadratic_tolerance,
            c.b2_tolerance,
        )
    })]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn r0_attained_at_one() {
        let (j, v) = r0_scan(1000);
        assert_eq!(j, 1);
        assert_relative_eq!(v, 2.0 / 3.0);
        assert!(r0_lower_bound_exact(200));
    }

    #[test]
    fn sup_bound_cases() {
        let (ok, sup) = sup_bound_exact(2, 3).unwrap();
        assert!(ok);
        assert_eq!(sup, BigRational::one());
        assert!(!sup_bound_exact(71, 100).unwrap().0);
        assert!(sup_bound(0.71, 100) > 1.0);
    }

    #[test]
    fn disk_moments() {
        // ∫|z|^2 dλ = 1/2
        assert_relative_eq!(
            disk_integral(|z| z.norm_sqr()).unwrap(),
            0.5,
            max_relative = 1e-13
        );
        assert_relative_eq!(b1_norm_linear(0.0).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn exact_fit_recovers_coefficients() {
        let x = [0.1, 0.2, 0.3];
        let y: Vec<f64> = x
            .iter()
            .map(|a: &f64| 0.125 * a * a - 0.01 * a.powi(4))
            .collect();
        let (c, d) = quadratic_quartic_fit(&x, &y).unwrap();
        assert_relative_eq!(c, 0.125, max_relative = 1e-10);
        assert_relative_eq!(d, -0.01, max_relative = 1e-6);
    }

    #[test]
    fn full_report_passes() {
        let r = multiplier_constants(
            10_000,
            [2, 3],
            0.71,
            &[0.02, 0.04, 0.06, 0.08, 0.1],
            0.03,
            1e-12,
        )
        .unwrap();
        assert!(r.passed(), "{}", r.to_json_value());
    }
}
