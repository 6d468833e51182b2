//! Probability measures on (0, ∞) and their Bergman weights.
//!
//! `w_n = ∫ n^{−2σ} dμ(σ)` and `w̃_n = ∫ n^{−σ} dμ(σ)`. The `μ_α` family has
//! density `2^{α+1} σ^α e^{−2σ} / Γ(α+1)`, for which `w_n = (1 + log n)^{−1−α}`.

use std::fmt;
use std::sync::{Arc, RwLock};

use serde_json::{json, Value};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};
use crate::quad::{self, gauss_laguerre, gauss_legendre, Rule, Tolerance};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Largest tail mass beyond the cutoff accepted for a density.
pub const TAIL_LIMIT: f64 = 1e-12;
/// Required agreement of the total mass with 1.
pub const MASS_TOLERANCE: f64 = 1e-8;
/// Accepted quadrature error for a density weight.
/// Accuracy target for integrals against μ.
const FINE: Tolerance = Tolerance {
    abs: 1e-14,
    rel: 1e-12,
    max_intervals: 4000,
};
const DENSITY: Tolerance = Tolerance {
    abs: 1e-13,
    rel: 1e-13,
    max_intervals: 4000,
};

pub const WEIGHT_TOLERANCE: f64 = 1e-10;

/// A density `h` on (0, ∞) with an effective support `(0, cutoff)` and a
/// certified bound `tail(c) >= ∫_c^∞ h`.
#[derive(Clone)]
pub struct DensityMeasure {
    name: String,
    params: Value,
    h: RealFn,
    cutoff: f64,
    tail: RealFn,
}

impl fmt::Debug for DensityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityMeasure")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("cutoff", &self.cutoff)
            .finish()
    }
}

impl PartialEq for DensityMeasure {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name && self.params == o.params && self.cutoff == o.cutoff
    }
}

impl DensityMeasure {
    pub fn new(
        name: impl Into<String>,
        params: Value,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        cutoff: f64,
        tail: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let m = Self {
            name: name.into(),
            params,
            h: Arc::new(h),
            cutoff,
            tail: Arc::new(tail),
        };
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "density cutoff must be positive, got {cutoff}"
            )));
        }
        let t = (m.tail)(cutoff);
        if !(t >= 0.0 && t <= TAIL_LIMIT) {
            return Err(Error::InvalidParameter(format!(
                "tail bound {t:e} beyond cutoff {cutoff} exceeds {TAIL_LIMIT:e}"
            )));
        }
        for k in 3..=8 {
            let s = 10f64.powi(-k);
            if !((m.h)(s) > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "density vanishes at {s:e}: 0 is not in the support"
                )));
            }
        }
        let mass = m.integrate_finite(|_| 1.0, 0.0, cutoff, DENSITY)?;
        if (mass - 1.0).abs() > MASS_TOLERANCE + t {
            return Err(Error::InvalidParameter(format!(
                "density has total mass {mass}, expected 1"
            )));
        }
        Ok(m)
    }

    /// Gamma law with shape `k` and rate `λ`; `k = α+1, λ = 2` is `μ_α`.
    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0 && rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma density needs shape, rate > 0 (got {shape}, {rate})"
            )));
        }
        let lnorm = shape * rate.ln() - ln_gamma(shape);
        let tail = move |c: f64| statrs::function::gamma::gamma_ur(shape, rate * c);
        let mut cutoff = (shape + 10.0) / rate;
        while tail(cutoff) > TAIL_LIMIT / 10.0 {
            cutoff *= 1.25;
        }
        Self::new(
            "gamma",
            json!({"shape": shape, "rate": rate}),
            move |s: f64| {
                if s <= 0.0 {
                    0.0
                } else {
                    (lnorm + (shape - 1.0) * s.ln() - rate * s).exp()
                }
            },
            cutoff,
            tail,
        )
    }

    /// Half-normal law `2/(s√(2π)) e^{−σ²/(2s²)}`.
    pub fn half_normal(scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "half-normal scale must be positive, got {scale}"
            )));
        }
        let norm = 2.0 / (scale * (2.0 * std::f64::consts::PI).sqrt());
        let tail = move |c: f64| erfc(c / (scale * std::f64::consts::SQRT_2));
        let mut cutoff = 4.0 * scale;
        while tail(cutoff) > TAIL_LIMIT / 10.0 {
            cutoff *= 1.25;
        }
        Self::new(
            "half-normal",
            json!({"scale": scale}),
            move |s: f64| {
                if s < 0.0 {
                    0.0
                } else {
                    norm * (-s * s / (2.0 * scale * scale)).exp()
                }
            },
            cutoff,
            tail,
        )
    }

    pub fn h(&self, sigma: f64) -> f64 {
        (self.h)(sigma)
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn tail_bound(&self, c: f64) -> f64 {
        (self.tail)(c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn integrate_finite(
        &self,
        g: impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        tol: Tolerance,
    ) -> Result<f64> {
        // geometric panels toward 0 help with integrable singularities of h
        let mut total = 0.0;
        let mut hi = b;
        if a == 0.0 {
            let mut lo = b / 16.0;
            for _ in 0..24 {
                total += quad::integrate(|s| g(s) * (self.h)(s), lo, hi, tol)?.value;
                hi = lo;
                lo /= 16.0;
            }
            total += quad::integrate(|s| g(s) * (self.h)(s), 0.0, hi, tol)?.value;
        } else {
            total = quad::integrate(|s| g(s) * (self.h)(s), a, b, tol)?.value;
        }
        Ok(total)
    }
}

/// A probability measure on (0, ∞) with 0 in its support.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    Alpha(f64),
    DiracAtZero,
    Density(DensityMeasure),
}

impl MeasureSpec {
    pub fn alpha(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must exceed -1, got {alpha}"
            )));
        }
        Ok(MeasureSpec::Alpha(alpha))
    }

    /// Parses either a JSON object (`{"type": "alpha", "alpha": 0}`) or a
    /// shorthand: `alpha:0.5`, `dirac0`, `gamma:SHAPE,RATE`, `half-normal:SCALE`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('{') {
            let v: Value = serde_json::from_str(t)?;
            return Self::from_config(&v);
        }
        let (kind, args) = t.split_once(':').unwrap_or((t, ""));
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number {x:?} in measure {t:?}")))
                })
                .collect::<Result<_>>()?
        };
        match (kind, nums.as_slice()) {
            ("alpha", [a]) => Self::alpha(*a),
            ("dirac0", []) => Ok(MeasureSpec::DiracAtZero),
            ("gamma", [k, l]) => Ok(MeasureSpec::Density(DensityMeasure::gamma(*k, *l)?)),
            ("half-normal", [s]) => Ok(MeasureSpec::Density(DensityMeasure::half_normal(*s)?)),
            _ => Err(Error::Parse(format!("unrecognized measure {t:?}"))),
        }
    }

    pub fn from_config(v: &Value) -> Result<Self> {
        let kind = v
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("measure needs a \"type\"".into()))?;
        let num = |key: &str| {
            v.get(key)
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Parse(format!("measure field {key:?} missing")))
        };
        match kind {
            "alpha" => Self::alpha(num("alpha")?),
            "dirac0" => Ok(MeasureSpec::DiracAtZero),
            "density" => {
                let family = v.get("family").and_then(Value::as_str).unwrap_or("gamma");
                let mut d = match family {
                    "gamma" => DensityMeasure::gamma(num("shape")?, num("rate")?)?,
                    "half-normal" => DensityMeasure::half_normal(num("scale")?)?,
                    other => return Err(Error::Parse(format!("unknown density family {other:?}"))),
                };
                if let Some(c) = v.get("cutoff").and_then(Value::as_f64) {
                    let tail = d.tail_bound(c);
                    if !(c > 0.0) || tail > TAIL_LIMIT {
                        return Err(Error::InvalidParameter(format!(
                            "cutoff {c} leaves tail mass {tail:e} above {TAIL_LIMIT:e}"
                        )));
                    }
                    d.cutoff = c;
                }
                Ok(MeasureSpec::Density(d))
            }
            other => Err(Error::Parse(format!("unknown measure type {other:?}"))),
        }
    }

    pub fn to_config(&self) -> Value {
        match self {
            MeasureSpec::Alpha(a) => json!({"type": "alpha", "alpha": a}),
            MeasureSpec::DiracAtZero => json!({"type": "dirac0"}),
            MeasureSpec::Density(d) => {
                let mut v = json!({"type": "density", "family": d.name, "cutoff": d.cutoff});
                if let (Some(obj), Some(p)) = (v.as_object_mut(), d.params.as_object()) {
                    for (k, x) in p {
                        obj.insert(k.clone(), x.clone());
                    }
                }
                v
            }
        }
    }

    /// Density at σ, if the measure has one.
    pub fn density(&self, sigma: f64) -> Option<f64> {
        match self {
            MeasureSpec::Alpha(a) => Some(alpha_density(*a, sigma)),
            MeasureSpec::DiracAtZero => None,
            MeasureSpec::Density(d) => Some(d.h(sigma)),
        }
    }

    /// `μ([0, x])`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(if matches!(self, MeasureSpec::DiracAtZero) && x == 0.0 {
                1.0
            } else {
                0.0
            });
        }
        match self {
            MeasureSpec::Alpha(a) => Ok(gamma_lr(a + 1.0, 2.0 * x)),
            MeasureSpec::DiracAtZero => Ok(1.0),
            MeasureSpec::Density(d) => {
                if x >= d.cutoff {
                    Ok(1.0 - d.tail_bound(x))
                } else {
                    d.integrate_finite(|_| 1.0, 0.0, x, DENSITY)
                }
            }
        }
    }

    /// `∫_{[0, x]} g dμ`.
    pub fn integrate_below(&self, x: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        self.integrate_between(0.0, x, g, FINE)
    }

    /// `∫_{[a, b]} g dμ` for `0 <= a <= b`; the atom of `DiracAtZero` counts when `a = 0`.
    pub fn integrate_between(
        &self,
        a: f64,
        b: f64,
        g: impl Fn(f64) -> f64,
        tol: Tolerance,
    ) -> Result<f64> {
        if !(a >= 0.0 && b >= a) {
            return Err(Error::InvalidParameter(format!(
                "integration range [{a}, {b}] must satisfy 0 <= a <= b"
            )));
        }
        match self {
            MeasureSpec::DiracAtZero => Ok(if a == 0.0 { g(0.0) } else { 0.0 }),
            MeasureSpec::Alpha(al) => {
                // u = σ^{α+1} removes the σ^α endpoint behavior
                let a1 = al + 1.0;
                let c = (a1 * 2f64.ln() - ln_gamma(a1)).exp() / a1;
                let r = quad::integrate(
                    |u| {
                        let s = u.powf(1.0 / a1);
                        g(s) * (-2.0 * s).exp()
                    },
                    a.powf(a1),
                    b.powf(a1),
                    tol,
                )?;
                Ok(c * r.value)
            }
            MeasureSpec::Density(d) => {
                if a >= d.cutoff {
                    return Ok(0.0);
                }
                d.integrate_finite(g, a, b.min(d.cutoff), tol)
            }
        }
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureSpec::Alpha(a) => write!(f, "alpha:{a}"),
            MeasureSpec::DiracAtZero => f.write_str("dirac0"),
            MeasureSpec::Density(d) => write!(f, "{}:{}", d.name, d.params),
        }
    }
}

fn alpha_density(alpha: f64, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    ((alpha + 1.0) * 2f64.ln() - ln_gamma(alpha + 1.0) + alpha * sigma.ln() - 2.0 * sigma).exp()
}

/// `∫ g dμ`.
///
/// `μ_α` uses generalized Gauss–Laguerre in `t = 2σ`, doubling the node
/// count until two successive counts agree to 1e-10. Densities use adaptive
/// panels on `(0, cutoff)` plus the remainder estimate `tail(c)·|g(c)|`,
/// which is a bound for integrands that decrease beyond the cutoff.
pub fn integrate(mu: &MeasureSpec, g: impl Fn(f64) -> f64) -> Result<f64> {
    match mu {
        MeasureSpec::DiracAtZero => Ok(g(0.0)),
        MeasureSpec::Alpha(a) => {
            let ga = ln_gamma(a + 1.0).exp();
            let mut prev = f64::NAN;
            let mut n = 16;
            while n <= 512 {
                let rule = gauss_laguerre(n, *a)?;
                let v = rule.apply(|t| g(0.5 * t)) / ga;
                if (v - prev).abs() <= 1e-10 * v.abs().max(1e-4) {
                    return Ok(v);
                }
                prev = v;
                n *= 2;
            }
            Err(Error::QuadratureNonConvergence {
                error: f64::NAN,
                tolerance: 1e-10,
            })
        }
        MeasureSpec::Density(d) => {
            let body = d.integrate_finite(&g, 0.0, d.cutoff, DENSITY)?;
            let rem = d.tail_bound(d.cutoff) * g(d.cutoff).abs();
            if rem > WEIGHT_TOLERANCE {
                return Err(Error::QuadratureNonConvergence {
                    error: rem,
                    tolerance: WEIGHT_TOLERANCE,
                });
            }
            Ok(body)
        }
    }
}

/// `w_n = ∫ n^{−2σ} dμ(σ)`.
pub fn bergman_weight(mu: &MeasureSpec, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange("weights are indexed from n = 1".into()));
    }
    let l = (n as f64).ln();
    match mu {
        MeasureSpec::Alpha(a) => Ok((1.0 + l).powf(-1.0 - a)),
        MeasureSpec::DiracAtZero => Ok(1.0),
        MeasureSpec::Density(_) => integrate(mu, |s| (-2.0 * s * l).exp()),
    }
}

/// `w̃_n = ∫ n^{−σ} dμ(σ)`.
pub fn tilde_weight(mu: &MeasureSpec, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange("weights are indexed from n = 1".into()));
    }
    let l = (n as f64).ln();
    match mu {
        MeasureSpec::Alpha(a) => Ok((1.0 + 0.5 * l).powf(-1.0 - a)),
        MeasureSpec::DiracAtZero => Ok(1.0),
        MeasureSpec::Density(_) => integrate(mu, |s| (-s * l).exp()),
    }
}

/// `w_n` by quadrature even when a closed form exists (cross-validation path).
pub fn bergman_weight_by_quadrature(mu: &MeasureSpec, n: u64) -> Result<f64> {
    let l = (n as f64).ln();
    integrate(mu, |s| (-2.0 * s * l).exp())
}

/// `w̃_n` by quadrature.
pub fn tilde_weight_by_quadrature(mu: &MeasureSpec, n: u64) -> Result<f64> {
    let l = (n as f64).ln();
    integrate(mu, |s| (-s * l).exp())
}

/// `β_h(σ) = ∫_0^σ (σ − u) h(u) du`.
pub fn beta_h(mu: &MeasureSpec, sigma: f64) -> Result<f64> {
    if !(sigma >= 0.0) {
        return Err(Error::OutOfRange(format!(
            "beta_h needs sigma >= 0, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return match mu {
            MeasureSpec::DiracAtZero => Err(Error::InvalidParameter(
                "beta_h needs a measure with a density".into(),
            )),
            _ => Ok(0.0),
        };
    }
    match mu {
        MeasureSpec::DiracAtZero => Err(Error::InvalidParameter(
            "beta_h needs a measure with a density".into(),
        )),
        MeasureSpec::Alpha(a) => {
            // σ P(α+1, 2σ) − (α+1)/2 · P(α+2, 2σ)
            let x = 2.0 * sigma;
            let small = sigma < 1e-3;
            if small {
                // series avoids cancellation: Σ_k (−1)^k x^{α+2+k} / (k! Γ(α+1) (α+1+k)(α+2+k)) / 2
                let a1 = a + 1.0;
                let lead = ((a1 + 1.0) * x.ln() - ln_gamma(a1)).exp();
                let mut term = 1.0;
                let mut sum = 0.0;
                for k in 0..30 {
                    let kf = k as f64;
                    sum += term / ((a1 + kf) * (a1 + 1.0 + kf));
                    term *= -x / (kf + 1.0);
                }
                Ok(0.5 * lead * sum)
            } else {
                Ok(sigma * gamma_lr(a + 1.0, x) - 0.5 * (a + 1.0) * gamma_lr(a + 2.0, x))
            }
        }
        MeasureSpec::Density(d) => d.integrate_finite(|u| sigma - u, 0.0, sigma, DENSITY),
    }
}

/// A quadrature rule in σ for `∫ · dμ`, refined until `surrogate` is
/// integrated to relative accuracy 1e-10.
pub fn quadrature_rule(mu: &MeasureSpec, surrogate: impl Fn(f64) -> f64) -> Result<Rule> {
    match mu {
        MeasureSpec::DiracAtZero => Ok(Rule {
            nodes: vec![0.0],
            weights: vec![1.0],
        }),
        MeasureSpec::Alpha(a) => {
            let ga = ln_gamma(a + 1.0).exp();
            let mut prev = f64::NAN;
            let mut n = 8;
            while n <= 512 {
                let rule = gauss_laguerre(n, *a)?;
                let v = rule.apply(|t| surrogate(0.5 * t)) / ga;
                if (v - prev).abs() <= 1e-10 * v.abs().max(1e-12) {
                    return Ok(Rule {
                        nodes: rule.nodes.iter().map(|t| 0.5 * t).collect(),
                        weights: rule.weights.iter().map(|w| w / ga).collect(),
                    });
                }
                prev = v;
                n *= 2;
            }
            Err(Error::QuadratureNonConvergence {
                error: f64::NAN,
                tolerance: 1e-10,
            })
        }
        MeasureSpec::Density(d) => {
            let mut prev = f64::NAN;
            let mut panels = 4;
            while panels <= 1024 {
                let rule = composite_rule(d, panels);
                let v = rule.apply(&surrogate);
                if (v - prev).abs() <= 1e-10 * v.abs().max(1e-12) {
                    return Ok(rule);
                }
                prev = v;
                panels *= 2;
            }
            Err(Error::QuadratureNonConvergence {
                error: f64::NAN,
                tolerance: 1e-10,
            })
        }
    }
}

fn composite_rule(d: &DensityMeasure, panels: usize) -> Rule {
    // panels graded toward 0: edges c·(k/P)^2
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for k in 0..panels {
        let a = d.cutoff * (k as f64 / panels as f64).powi(2);
        let b = d.cutoff * ((k + 1) as f64 / panels as f64).powi(2);
        let r = gauss_legendre(12, a, b);
        for (x, w) in r.nodes.iter().zip(&r.weights) {
            nodes.push(*x);
            weights.push(w * d.h(*x));
        }
    }
    Rule { nodes, weights }
}

/// Lazily extended table `n ↦ w_n`.
#[derive(Debug)]
pub struct WeightSequence {
    measure: MeasureSpec,
    values: RwLock<Vec<f64>>,
}

impl WeightSequence {
    pub fn new(measure: MeasureSpec) -> Self {
        Self {
            measure,
            values: RwLock::new(Vec::new()),
        }
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    /// `w_1, …, w_len`.
    pub fn prefix(&self, len: usize) -> Result<Vec<f64>> {
        {
            let v = self.values.read().unwrap_or_else(|e| e.into_inner());
            if v.len() >= len {
                return Ok(v[..len].to_vec());
            }
        }
        let mut v = self.values.write().unwrap_or_else(|e| e.into_inner());
        while v.len() < len {
            let n = v.len() as u64 + 1;
            v.push(bergman_weight(&self.measure, n)?);
        }
        Ok(v[..len].to_vec())
    }

    pub fn get(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::OutOfRange("weights are indexed from n = 1".into()));
        }
        Ok(self.prefix(n)?[n - 1])
    }
}

/// Closed-form `w̃_n` for `μ_α`: `(1 + log(n)/2)^{−1−α}`.
pub fn alpha_tilde_weight(alpha: f64, n: u64) -> f64 {
    (1.0 + 0.5 * (n as f64).ln()).powf(-1.0 - alpha)
}
