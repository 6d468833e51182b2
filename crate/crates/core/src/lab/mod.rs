//! Verification lab: exact identities, asymptotic fits, inequality checks.
//!
//! Each check returns a [`VerificationReport`]. Suites bundle reports and
//! read their windows, tolerances and sample sizes from a [`LabConfig`].

pub mod asymptotics;
pub mod config;
pub mod identities;
pub mod inequalities;
pub mod littlewood;
pub mod multipliers;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::json::num;
use crate::poly::DirichletPolynomial;
use crate::rng::Stream;

pub use config::LabConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

/// A report side: an exact rational or a float.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    Exact(BigRational),
    Real(f64),
}

impl Quantity {
    pub fn integer(n: impl Into<BigInt>) -> Self {
        Quantity::Exact(BigRational::from_integer(n.into()))
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Quantity::Real(x) => *x,
            Quantity::Exact(r) => {
                use num_traits::ToPrimitive;
                r.to_f64().unwrap_or(f64::NAN)
            }
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Quantity::Real(x) => num(*x),
            Quantity::Exact(r) => Value::String(r.to_string()),
        }
    }
}

/// Outcome of one check.
///
/// `status` is `pass` iff `|lhs − rhs| <= tolerance` (exact equality when both
/// sides are rational and `tolerance = 0`) and every listed condition holds.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub name: String,
    pub status: Status,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub tolerance: f64,
    pub parameters: Map<String, Value>,
    pub conditions: Vec<(String, bool)>,
    pub runtime_ms: u64,
    /// Set when the check is a finite stand-in for a qualitative statement.
    pub surrogate: Option<String>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, lhs: Quantity, rhs: Quantity, tolerance: f64) -> Self {
        let mut r = Self {
            name: name.into(),
            status: Status::Fail,
            lhs,
            rhs,
            tolerance,
            parameters: Map::new(),
            conditions: Vec::new(),
            runtime_ms: 0,
            surrogate: None,
        };
        r.refresh();
        r
    }

    pub fn exact(name: impl Into<String>, lhs: BigRational, rhs: BigRational) -> Self {
        Self::new(name, Quantity::Exact(lhs), Quantity::Exact(rhs), 0.0)
    }

    pub fn numeric(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(name, Quantity::Real(lhs), Quantity::Real(rhs), tolerance)
    }

    /// Count of failed cases against zero.
    pub fn violations(name: impl Into<String>, failed: usize) -> Self {
        Self::new(name, Quantity::integer(failed), Quantity::integer(0), 0.0)
    }

    fn sides_agree(&self) -> bool {
        match (&self.lhs, &self.rhs) {
            (Quantity::Exact(a), Quantity::Exact(b)) if self.tolerance == 0.0 => a == b,
            (a, b) => (a.as_f64() - b.as_f64()).abs() <= self.tolerance,
        }
    }

    fn refresh(&mut self) {
        let ok = self.sides_agree() && self.conditions.iter().all(|c| c.1);
        self.status = if ok { Status::Pass } else { Status::Fail };
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn with_real(self, key: &str, value: f64) -> Self {
        self.with_param(key, num(value))
    }

    pub fn with_condition(mut self, name: impl Into<String>, holds: bool) -> Self {
        self.conditions.push((name.into(), holds));
        self.refresh();
        self
    }

    pub fn with_surrogate(mut self, note: impl Into<String>) -> Self {
        self.surrogate = Some(note.into());
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.runtime_ms = start.elapsed().as_millis() as u64;
        self
    }

    /// Zeroes `runtime_ms`, so identical runs serialize to identical bytes.
    pub fn without_timing(mut self) -> Self {
        self.runtime_ms = 0;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// JSON form; `runtime_ms` is the only field that varies between identical runs.
    pub fn to_json_value(&self) -> Value {
        json!({
            "name": self.name,
            "status": self.status.to_string(),
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "tolerance": num(self.tolerance),
            "parameters": Value::Object(self.parameters.clone()),
            "conditions": self.conditions.iter().map(|(n, ok)| json!({"name": n, "pass": ok})).collect::<Vec<_>>(),
            "runtime_ms": self.runtime_ms,
            "surrogate": self.surrogate,
        })
    }
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidParameter(
            "a fit needs at least two points".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "fit abscissae are all equal".into(),
        ));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    Ok(LinearFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

/// Fits `value ∝ (2σ−1)^{−e}` and returns `e` with the log-space residual.
pub fn blowup_exponent(sigmas: &[f64], values: &[f64]) -> Result<LinearFit> {
    let x: Vec<f64> = sigmas.iter().map(|s| -(2.0 * s - 1.0).ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    ols(&x, &y)
}

/// `points` values spaced evenly in `log(2σ−1)` over `[lo, hi]`.
pub fn sigma_window(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = ((2.0 * lo - 1.0).ln(), (2.0 * hi - 1.0).ln());
    (0..points)
        .map(|k| {
            let t = if points == 1 {
                0.0
            } else {
                k as f64 / (points - 1) as f64
            };
            0.5 * (1.0 + (a + (b - a) * t).exp())
        })
        .collect()
}

/// Log-spaced integers in `[lo, hi]`, deduplicated.
pub fn log_spaced(lo: u64, hi: u64, points: usize) -> Vec<u64> {
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut v: Vec<u64> = (0..points)
        .map(|k| {
            let t = if points == 1 {
                0.0
            } else {
                k as f64 / (points - 1) as f64
            };
            ((a + (b - a) * t).exp().round() as u64).clamp(lo, hi)
        })
        .collect();
    v.dedup();
    v
}

/// Seeded random Dirichlet polynomials: length `N` uniform in
/// `[degree_min, degree_max]`, i.i.d. standard complex Gaussian coefficients,
/// normalized to unit `H²` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialModel {
    pub degree_min: usize,
    pub degree_max: usize,
    pub seed: u64,
}

/// Keeps polynomial streams apart from character streams under the same seed.
const POLY_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

impl PolynomialModel {
    pub fn new(degree_min: usize, degree_max: usize, seed: u64) -> Result<Self> {
        if degree_min == 0 || degree_min > degree_max {
            return Err(Error::InvalidParameter(format!(
                "degree range [{degree_min}, {degree_max}] must satisfy 1 <= min <= max"
            )));
        }
        Ok(Self {
            degree_min,
            degree_max,
            seed,
        })
    }

    fn stream(&self, index: u64) -> Stream {
        Stream::new(self.seed ^ POLY_SALT, index)
    }

    /// Standard complex Gaussian coefficients before normalization.
    pub fn raw_coefficients(&self, index: u64) -> Vec<(f64, f64)> {
        let mut s = self.stream(index);
        let n = s.next_range(self.degree_min as u64, self.degree_max as u64) as usize;
        (0..n)
            .map(|_| {
                let (a, b) = s.next_gaussian_pair();
                (
                    a * std::f64::consts::FRAC_1_SQRT_2,
                    b * std::f64::consts::FRAC_1_SQRT_2,
                )
            })
            .collect()
    }

    pub fn sample(&self, index: u64) -> DirichletPolynomial {
        let raw = self.raw_coefficients(index);
        let norm = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        let coeffs = raw
            .iter()
            .map(|&(a, b)| Complex64::new(a, b) / norm)
            .collect();
        DirichletPolynomial::new(coeffs).expect("model length is positive")
    }
}

/// Named groups of reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Asymptotics,
    LittlewoodPaley,
    Multipliers,
    Embeddings,
    Coefficients,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Identities,
        Suite::Asymptotics,
        Suite::LittlewoodPaley,
        Suite::Multipliers,
        Suite::Embeddings,
        Suite::Coefficients,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Asymptotics => "asymptotics",
            Suite::LittlewoodPaley => "littlewood-paley",
            Suite::Multipliers => "multipliers",
            Suite::Embeddings => "embeddings",
            Suite::Coefficients => "coefficients",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                Error::InvalidParameter(format!(
                    "unknown suite '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

type Job<'a> = Box<dyn Fn() -> Result<Vec<VerificationReport>> + Send + Sync + 'a>;

fn job<'a>(f: impl Fn() -> Result<VerificationReport> + Send + Sync + 'a) -> Job<'a> {
    Box::new(move || Ok(vec![f()?]))
}

/// Runs every report of `suite`; reports are computed concurrently and
/// returned in a fixed order.
pub fn run_suite(suite: Suite, cfg: &LabConfig) -> Result<Vec<VerificationReport>> {
    let jobs: Vec<Job<'_>> = match suite {
        Suite::Identities => identities::jobs(cfg),
        Suite::Asymptotics => asymptotics::jobs(cfg),
        Suite::LittlewoodPaley => littlewood::jobs(cfg),
        Suite::Multipliers => multipliers::jobs(cfg),
        Suite::Embeddings => inequalities::embedding_jobs(cfg),
        Suite::Coefficients => inequalities::coefficient_jobs(cfg),
    };
    let batches = jobs.par_iter().map(|j| j()).collect::<Result<Vec<_>>>()?;
    Ok(batches.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn report_status_rules() {
        let r = VerificationReport::numeric("x", 1.0, 1.0 + 1e-9, 1e-8);
        assert!(r.passed());
        assert!(!r.clone().with_condition("c", false).passed());
        let e = VerificationReport::exact(
            "e",
            BigRational::new(2.into(), 3.into()),
            BigRational::new(4.into(), 6.into()),
        );
        assert!(e.passed());
        assert_eq!(e.to_json_value()["lhs"], "2/3");
        assert!(!VerificationReport::violations("v", 1).passed());
    }

    #[test]
    fn fit_recovers_exponent() {
        let s = sigma_window(0.501, 0.6, 9);
        let v: Vec<f64> = s
            .iter()
            .map(|x| 3.0 * (2.0 * x - 1.0).powf(-1.25))
            .collect();
        let f = blowup_exponent(&s, &v).unwrap();
        assert!((f.slope - 1.25).abs() < 1e-12 && f.residual < 1e-12);
        assert!((s[0] - 0.501).abs() < 1e-15 && (s[8] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn polynomial_model() {
        let m = PolynomialModel::new(3, 9, 42).unwrap();
        let f = m.sample(5);
        assert!((3..=9).contains(&f.len()));
        assert!((f.l2_squared() - 1.0).abs() < 1e-14);
        assert_eq!(f, m.sample(5));
        assert!(PolynomialModel::new(0, 3, 0).is_err());
    }

    proptest! {
        #[test]
        fn ols_is_exact_on_lines(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let x: Vec<f64> = (0..7).map(|k| k as f64 * 0.3).collect();
            let y: Vec<f64> = x.iter().map(|t| a * t + b).collect();
            let f = ols(&x, &y).unwrap();
            prop_assert!((f.slope - a).abs() < 1e-10 && (f.intercept - b).abs() < 1e-10);
        }
    }
}
