//! Reproducing kernels and point-evaluation norms and bounds.
//!
//! Every quantity here depends on `s` only through `Re(s)`.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::{dirichlet_power, zeta_power_coeffs};
use crate::error::{Error, Result};
use crate::json::num;
use crate::measure::{MeasureSpec, WeightSequence};
use crate::norms::{ap_norm, as_even, even_ap_norm, SamplerConfig, DEFAULT_BUDGET};
use crate::poly::DirichletPolynomial;
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::zeta::{log_weighted_tail, log_weighted_zeta, zeta, zeta_minus_one};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Exact,
    UpperBound,
    LowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Space {
    Hp,
    ApMu,
    ApMuZero,
    Bp,
    Dp,
    Disk,
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundKind::Exact => "exact",
            BoundKind::UpperBound => "upper-bound",
            BoundKind::LowerBound => "lower-bound",
        })
    }
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Space::Hp => "hp",
            Space::ApMu => "ap-mu",
            Space::ApMuZero => "ap-mu-zero",
            Space::Bp => "bp",
            Space::Dp => "dp",
            Space::Disk => "disk",
        })
    }
}

/// A value of, or a bound on, `‖δ_s‖` for one space.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalBound {
    pub value: f64,
    pub kind: BoundKind,
    pub space: Space,
    /// The point; for the disk this is `z`.
    pub s: Complex64,
    pub p: f64,
    pub measure: Option<MeasureSpec>,
    /// Nonzero only when a Monte Carlo norm enters the value.
    pub std_error: f64,
}

impl EvalBound {
    fn new(
        value: f64,
        kind: BoundKind,
        space: Space,
        s: Complex64,
        p: f64,
        measure: Option<&MeasureSpec>,
    ) -> Self {
        Self {
            value,
            kind,
            space,
            s,
            p,
            measure: measure.cloned(),
            std_error: 0.0,
        }
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "value": num(self.value),
            "kind": self.kind.to_string(),
            "space": self.space.to_string(),
            "s": [num(self.s.re), num(self.s.im)],
            "p": num(self.p),
            "measure": self.measure.as_ref().map(|m| m.to_config()),
            "std_error": num(self.std_error),
        })
    }
}

fn check_half_plane(s: Complex64) -> Result<f64> {
    if !(s.re > 0.5) || !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::OutOfRange(format!(
            "point evaluation needs Re(s) > 1/2, got {}",
            s.re
        )));
    }
    Ok(s.re)
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "exponent p must be a finite real >= 1, got {p}"
        )));
    }
    Ok(())
}

/// Conjugate exponent; `∞` for `p = 1`.
fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `‖δ_s‖_{(H^p)*} = ζ(2 Re s)^{1/p}`.
pub fn eval_norm_hp(s: Complex64, p: f64) -> Result<EvalBound> {
    let sigma = check_half_plane(s)?;
    check_p(p)?;
    Ok(EvalBound::new(
        zeta(2.0 * sigma)?.powf(1.0 / p),
        BoundKind::Exact,
        Space::Hp,
        s,
        p,
        None,
    ))
}

/// `‖δ_s‖_{(B^p)*} = ζ(2 Re s)^{2/p}`.
pub fn eval_norm_bp(s: Complex64, p: f64) -> Result<EvalBound> {
    let sigma = check_half_plane(s)?;
    check_p(p)?;
    Ok(EvalBound::new(
        zeta(2.0 * sigma)?.powf(2.0 / p),
        BoundKind::Exact,
        Space::Bp,
        s,
        p,
        None,
    ))
}

/// Truncated kernel sum with a bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSum {
    pub value: Complex64,
    pub terms: usize,
    pub tail_bound: f64,
}

/// Upper bound on `Σ_{n>N} n^{−x}/w_n`.
fn kernel_tail(mu: &MeasureSpec, x: f64, n: usize) -> Result<f64> {
    let m = n as f64;
    match mu {
        MeasureSpec::DiracAtZero => Ok(m.powf(1.0 - x) / (x - 1.0)),
        MeasureSpec::Alpha(a) => log_weighted_tail(1.0 + a, x, m),
        MeasureSpec::Density(_) => {
            // w_n >= μ([0, δ]) n^{−2δ}; best δ on a grid in (0, (x−1)/2)
            let mut best = f64::INFINITY;
            for k in 1..16 {
                let d = 0.5 * (x - 1.0) * k as f64 / 16.0;
                let mass = mu.cdf(d)?;
                if mass > 0.0 {
                    let e = x - 2.0 * d;
                    best = best.min(m.powf(1.0 - e) / ((e - 1.0) * mass));
                }
            }
            Ok(best)
        }
    }
}

/// `K_μ(s, w) = Σ_{n<=N} n^{−w−s̄}/w_n` with a tail bound from `w_n` lower bounds.
pub fn kernel_a2(mu: &MeasureSpec, s: Complex64, w: Complex64, n: usize) -> Result<KernelSum> {
    check_half_plane(s)?;
    check_half_plane(w)?;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "kernel truncation must be >= 1".into(),
        ));
    }
    let ws = WeightSequence::new(mu.clone()).prefix(n)?;
    let e = w + s.conj();
    let mut value = Complex64::new(0.0, 0.0);
    for k in (1..=n).rev() {
        value += (-e * (k as f64).ln()).exp() / ws[k - 1];
    }
    Ok(KernelSum {
        value,
        terms: n,
        tail_bound: kernel_tail(mu, e.re, n)?,
    })
}

/// Kernel coefficients `c_n = n^{−s̄}/w_n`, `n <= N`, so that `⟨f, K_s⟩ = Σ a_n c̄_n w_n = f(s)`.
pub fn kernel_coefficients(
    mu: &MeasureSpec,
    s: Complex64,
    n: usize,
) -> Result<DirichletPolynomial> {
    check_half_plane(s)?;
    let ws = WeightSequence::new(mu.clone()).prefix(n)?;
    DirichletPolynomial::new(
        (1..=n)
            .map(|k| (-s.conj() * (k as f64).ln()).exp() / ws[k - 1])
            .collect(),
    )
}

/// Relative accuracy for the density-measure kernel sum.
const DENSITY_KERNEL_REL: f64 = 1e-10;
const DENSITY_KERNEL_MAX_TERMS: usize = 1 << 18;

/// `‖δ_s‖_{(A²_μ)*} = K_μ(s, s)^{1/2}`.
pub fn eval_norm_a2(mu: &MeasureSpec, s: Complex64) -> Result<EvalBound> {
    let sigma = check_half_plane(s)?;
    let x = 2.0 * sigma;
    let k = match mu {
        MeasureSpec::DiracAtZero => zeta(x)?,
        MeasureSpec::Alpha(a) => log_weighted_zeta(1.0 + a, x)?,
        MeasureSpec::Density(_) => {
            let mut n = 1024;
            loop {
                let ks = kernel_a2(
                    mu,
                    Complex64::new(sigma, 0.0),
                    Complex64::new(sigma, 0.0),
                    n,
                )?;
                let tol = DENSITY_KERNEL_REL * ks.value.re;
                if ks.tail_bound <= tol {
                    break ks.value.re + 0.5 * ks.tail_bound;
                }
                if n >= DENSITY_KERNEL_MAX_TERMS {
                    return Err(Error::TruncationInsufficient {
                        tail: ks.tail_bound,
                        tolerance: tol,
                    });
                }
                n *= 4;
            }
        }
    };
    Ok(EvalBound::new(
        k.sqrt(),
        BoundKind::Exact,
        Space::ApMu,
        s,
        2.0,
        Some(mu),
    ))
}

/// `‖δ_s‖_{(A^p_μ)*} <= ‖δ_s‖_{(A²_μ)*}^{2/p}` for even `p`.
pub fn eval_bound_ap_even(mu: &MeasureSpec, s: Complex64, p: u32) -> Result<EvalBound> {
    if p < 2 || p % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "even-exponent bound needs an even p, got {p}"
        )));
    }
    let a2 = eval_norm_a2(mu, s)?;
    let kind = if p == 2 {
        BoundKind::Exact
    } else {
        BoundKind::UpperBound
    };
    Ok(EvalBound::new(
        a2.value.powf(2.0 / p as f64),
        kind,
        Space::ApMu,
        s,
        p as f64,
        Some(mu),
    ))
}

/// Default η grid on `(0, δ)`: 32 log-spaced fractions `g ∈ [1e−4, 1/2]`,
/// used both as `δg` (small η) and `δ(1−g)` (η near δ).
pub fn default_eta_grid(delta: f64) -> Vec<f64> {
    const POINTS: usize = 32;
    let (lo, hi) = (1e-4f64.ln(), 0.5f64.ln());
    let mut grid = Vec::with_capacity(2 * POINTS);
    for k in 0..POINTS {
        let g = (lo + (hi - lo) * k as f64 / (POINTS - 1) as f64).exp();
        grid.push(delta * g);
        if k + 1 < POINTS {
            grid.push(delta * (1.0 - g));
        }
    }
    grid.sort_by(f64::total_cmp);
    grid
}

/// `inf_η ‖Δ(σ − ·)‖_{L^{p′}([0, L], μ)} / μ([0, L])`, `L = σ − 1/2 − η`.
fn translate_bound(
    mu: &MeasureSpec,
    sigma: f64,
    p: f64,
    eta_grid: Option<&[f64]>,
    delta_fn: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let delta = sigma - 0.5;
    let owned;
    let grid = match eta_grid {
        Some(g) => g,
        None => {
            owned = default_eta_grid(delta);
            &owned
        }
    };
    if grid.is_empty() {
        return Err(Error::InvalidParameter("η grid is empty".into()));
    }
    if let Some(&e) = grid.iter().find(|&&e| !(e > 0.0 && e < delta)) {
        return Err(Error::OutOfRange(format!(
            "η = {e} outside (0, Re(s) − 1/2 = {delta})"
        )));
    }
    let q = conjugate(p);
    // ascending L = δ − η, so the L^{p′} integrals accumulate piece by piece
    let mut ls: Vec<f64> = grid.iter().map(|e| delta - e).collect();
    ls.sort_by(f64::total_cmp);
    let failure = RefCell::new(None);
    let integrand = |t: f64| match delta_fn(sigma - t) {
        Ok(d) => d.powf(q),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let mut best = f64::INFINITY;
    let mut acc = 0.0;
    let mut prev = 0.0;
    for l in ls {
        let mass = mu.cdf(l)?;
        let num = if q.is_infinite() {
            // Δ decreases in its argument: the sup sits at t = L
            delta_fn(sigma - l)?
        } else {
            acc += mu.integrate_between(prev, l, &integrand, BOUND_TOL)?;
            prev = l;
            if let Some(e) = failure.borrow_mut().take() {
                return Err(e);
            }
            acc.powf(1.0 / q)
        };
        if mass > 0.0 {
            best = best.min(num / mass);
        }
    }
    if !best.is_finite() {
        return Err(Error::Divergent(format!(
            "no η in the grid gives a finite bound at σ = {sigma}"
        )));
    }
    Ok(best)
}

/// Accuracy of the L^{p′} integrals inside the translation bounds.
const BOUND_TOL: Tolerance = Tolerance {
    abs: 0.0,
    rel: 1e-9,
    max_intervals: 4000,
};

/// Upper bound on `‖δ_s‖_{(A^p_μ)*}` from the `H^p` evaluation norm on
/// translates.
pub fn eval_bound_ap_general(
    mu: &MeasureSpec,
    s: Complex64,
    p: f64,
    eta_grid: Option<&[f64]>,
) -> Result<EvalBound> {
    let sigma = check_half_plane(s)?;
    check_p(p)?;
    let v = translate_bound(mu, sigma, p, eta_grid, |t| Ok(zeta(2.0 * t)?.powf(1.0 / p)))?;
    Ok(EvalBound::new(
        v,
        BoundKind::UpperBound,
        Space::ApMu,
        s,
        p,
        Some(mu),
    ))
}

/// `Δ_{p,∞}(t)`: evaluation norm on `H^p` functions with `f(+∞) = 0`,
/// bounded by `min(ζ(2t)^{1/p}, ζ(t) − 1)`.
pub fn hp_zero_eval_bound(t: f64, p: f64) -> Result<f64> {
    let hp = zeta(2.0 * t)?.powf(1.0 / p);
    if t > 1.0 {
        Ok(hp.min(zeta_minus_one(t)?))
    } else {
        Ok(hp)
    }
}

/// Upper bound on `δ_s` over `{f ∈ A^p_μ : f(+∞) = 0}`.
pub fn eval_bound_ap_zero(
    mu: &MeasureSpec,
    s: Complex64,
    p: f64,
    eta_grid: Option<&[f64]>,
) -> Result<EvalBound> {
    let sigma = check_half_plane(s)?;
    check_p(p)?;
    let v = translate_bound(mu, sigma, p, eta_grid, |t| hp_zero_eval_bound(t, p))?;
    Ok(EvalBound::new(
        v,
        BoundKind::UpperBound,
        Space::ApMuZero,
        s,
        p,
        Some(mu),
    ))
}

/// `|f(s)| <= 2^{1/p′} max(1, ∫_{Re s}^∞ B(t) dt) ‖f‖_{D^p_μ}` with `B` the
/// zero-constant `A^p_μ` bound.
pub fn eval_bound_dp(mu: &MeasureSpec, s: Complex64, p: f64) -> Result<EvalBound> {
    let sigma = check_half_plane(s)?;
    check_p(p)?;
    let mut failure = None;
    let r = integrate_to_infinity(
        |t| match eval_bound_ap_zero(mu, Complex64::new(t, 0.0), p, None) {
            Ok(b) => b.value,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        sigma,
        Tolerance::new(1e-10, 1e-6),
    )
    .map_err(|e| match e {
        Error::QuadratureNonConvergence { error, .. } => Error::Divergent(format!(
            "D^p tail integral from σ = {sigma} did not converge (error {error:e})"
        )),
        other => other,
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    if !r.value.is_finite() {
        return Err(Error::Divergent(format!(
            "D^p tail integral from σ = {sigma} is not finite"
        )));
    }
    let factor = if p == 1.0 {
        1.0
    } else {
        2f64.powf(1.0 - 1.0 / p)
    };
    Ok(EvalBound::new(
        factor * r.value.max(1.0),
        BoundKind::UpperBound,
        Space::Dp,
        s,
        p,
        Some(mu),
    ))
}

/// Test-function lower bound `max_F |F(σ)| / ‖F‖_{A^p_μ}` over two families:
/// the partial sum of `(ζ_σ)^{2/p}` and the `2/p`-th Dirichlet power of the
/// truncated `A²_μ` kernel. `‖F‖` is exact for even `p` and sampled otherwise.
pub fn eval_lower_ap(
    mu: &MeasureSpec,
    sigma: f64,
    p: f64,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<EvalBound> {
    let s = Complex64::new(sigma, 0.0);
    check_half_plane(s)?;
    check_p(p)?;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "test-function truncation must be >= 1".into(),
        ));
    }
    let q = 2.0 / p;
    let family_a = zeta_power_coeffs(q, n)?.into_vec();
    let ws = WeightSequence::new(mu.clone()).prefix(n)?;
    let kernel: Vec<f64> = (1..=n)
        .map(|k| (k as f64).powf(-sigma) / ws[k - 1])
        .collect();
    let family_b = dirichlet_power(&kernel, q)?;
    // family A coefficients are ζ^{2/p} ones scaled by n^{−σ}
    let family_a: Vec<f64> = family_a
        .iter()
        .enumerate()
        .map(|(i, c)| c * ((i + 1) as f64).powf(-sigma))
        .collect();

    let k = crate::arith::prime_pi(n as u64) as usize;
    let cfg = SamplerConfig::torus(k.max(1), samples, seed);
    let mut best: Option<(f64, f64)> = None;
    for coeffs in [family_a, family_b] {
        let f = DirichletPolynomial::from_real(&coeffs)?;
        let at = f.evaluate(s).norm();
        let norm = match as_even(p) {
            Some(pe) => even_ap_norm(&f, mu, pe, DEFAULT_BUDGET)?,
            None => ap_norm(&f, mu, p, &cfg)?,
        };
        if norm.value <= 0.0 {
            continue;
        }
        let value = at / norm.value;
        let se = value * norm.std_error / norm.value;
        if best.is_none_or(|(v, _)| value > v) {
            best = Some((value, se));
        }
    }
    let (value, std_error) =
        best.ok_or_else(|| Error::Divergent("test functions have zero norm".into()))?;
    let mut out = EvalBound::new(value, BoundKind::LowerBound, Space::ApMu, s, p, Some(mu));
    out.std_error = std_error;
    Ok(out)
}

/// `Σ_{n<=N} d(n) n^{−2σ}` by the hyperbola method on prefix sums of `n^{−2σ}`.
pub fn divisor_partial_sum(sigma: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let r = crate::arith::isqrt(n);
    // prefix sums P(x) = Σ_{k<=x} k^{−2σ} at x = ⌊N/a⌋, a <= r, and at r
    let mut targets: Vec<u64> = (1..=r).map(|a| n / a).collect();
    targets.push(r);
    targets.sort_unstable();
    targets.dedup();
    let mut prefix = std::collections::HashMap::with_capacity(targets.len());
    let (mut acc, mut comp) = (0.0f64, 0.0f64);
    let mut next = 0;
    for k in 1..=n {
        let y = (k as f64).powf(-2.0 * sigma) - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        while next < targets.len() && targets[next] == k {
            prefix.insert(k, acc);
            next += 1;
        }
    }
    let pr = prefix[&r];
    let mut total = 0.0;
    for a in 1..=r {
        total += (a as f64).powf(-2.0 * sigma) * prefix[&(n / a)];
    }
    2.0 * total - pr * pr
}

/// Normalized `B²` kernel witness `f(σ)/‖f‖_{B²}` for `f = Σ_{n<=N} d(n) n^{−σ} n^{−s}`,
/// which equals `(Σ_{n<=N} d(n) n^{−2σ})^{1/2}`.
pub fn bp_kernel_witness(sigma: f64, n: u64) -> Result<EvalBound> {
    let s = Complex64::new(sigma, 0.0);
    check_half_plane(s)?;
    let v = divisor_partial_sum(sigma, n).sqrt();
    Ok(EvalBound::new(
        v,
        BoundKind::LowerBound,
        Space::Bp,
        s,
        2.0,
        None,
    ))
}

/// Radial weight `S(r) dr` on `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiskWeight {
    /// `S ≡ 1`.
    Uniform,
    /// `S(r) = (β+1)(1−r)^β`, `β > −1`.
    Power(f64),
}

impl DiskWeight {
    fn density(&self, r: f64) -> f64 {
        match *self {
            DiskWeight::Uniform => 1.0,
            DiskWeight::Power(b) => (b + 1.0) * (1.0 - r).powf(b),
        }
    }

    /// `S([a, 1])`.
    fn mass_above(&self, a: f64) -> f64 {
        match *self {
            DiskWeight::Uniform => 1.0 - a,
            DiskWeight::Power(b) => (1.0 - a).powf(b + 1.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            DiskWeight::Power(b) if !(b > -1.0) => Err(Error::InvalidParameter(format!(
                "disk weight exponent must exceed −1, got {b}"
            ))),
            _ => Ok(()),
        }
    }
}

/// Upper bound on point evaluation at `z` for the weighted Bergman space
/// `A^p_S` of the disk, built from `‖δ_{z/r}‖_{H^p} = (1 − |z/r|²)^{−1/p}`.
pub fn disk_eval_bound(
    weight: DiskWeight,
    z: Complex64,
    p: f64,
    eta_grid: Option<&[f64]>,
) -> Result<EvalBound> {
    check_p(p)?;
    weight.validate()?;
    let a = z.norm();
    if !(a < 1.0) {
        return Err(Error::OutOfRange(format!(
            "disk point must satisfy |z| < 1, got {a}"
        )));
    }
    let delta = 1.0 - a;
    let owned;
    let grid = match eta_grid {
        Some(g) => g,
        None => {
            owned = default_eta_grid(delta);
            &owned
        }
    };
    if grid.is_empty() {
        return Err(Error::InvalidParameter("η grid is empty".into()));
    }
    let q = conjugate(p);
    let hp = |r: f64| (1.0 - (a / r).powi(2)).powf(-1.0 / p);
    let mut best = f64::INFINITY;
    for &eta in grid {
        if !(eta > 0.0 && eta < delta) {
            return Err(Error::OutOfRange(format!("η = {eta} outside (0, 1 − |z|)")));
        }
        let lo = a + eta;
        let mass = weight.mass_above(lo);
        let num = if q.is_infinite() {
            hp(lo)
        } else {
            integrate(
                |r| hp(r).powf(q) * weight.density(r),
                lo,
                1.0,
                Tolerance::new(1e-14, 1e-10),
            )?
            .value
            .powf(1.0 / q)
        };
        best = best.min(num / mass);
    }
    Ok(EvalBound::new(
        best,
        BoundKind::UpperBound,
        Space::Disk,
        z,
        p,
        None,
    ))
}

/// Interval estimate of `N_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnexeRow {
    pub p: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationCheck {
    pub relation: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnexeReport {
    pub space: Space,
    pub sigma: f64,
    pub rows: Vec<AnnexeRow>,
    pub checks: Vec<RelationCheck>,
}

impl AnnexeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "space": self.space.to_string(),
            "sigma": num(self.sigma),
            "rows": self.rows.iter().map(|r| json!({"p": num(r.p), "lower": num(r.lower), "upper": num(r.upper)})).collect::<Vec<_>>(),
            "checks": self.checks.iter().map(|c| json!({"relation": c.relation, "pass": c.pass, "detail": c.detail})).collect::<Vec<_>>(),
        })
    }
}

/// Settings for the `A^p_μ` rows of [`annexe_compare`].
#[derive(Debug, Clone)]
pub struct AnnexeConfig {
    pub measure: MeasureSpec,
    /// Test-function truncation per exponent `p`.
    pub truncation: fn(f64) -> usize,
    pub samples: u64,
    pub seed: u64,
}

impl Default for AnnexeConfig {
    fn default() -> Self {
        Self {
            measure: MeasureSpec::Alpha(0.0),
            truncation: |p| if p <= 2.0 { 10_000 } else { 2_000 },
            samples: 20_000,
            seed: 0,
        }
    }
}

const ALGEBRAIC_TOL: f64 = 1e-12;

/// Interval table of `N_p` and the three comparison relations:
/// (i) `N_p >= N_{q1} N_{q2}` when `1/p = 1/q1 + 1/q2`,
/// (ii) `N_p >= N_q` for `q >= p`,
/// (iii) `N_{pm} <= N_p^{1/m}`, with equality asserted for exact rows.
pub fn annexe_compare(
    space: Space,
    sigma: f64,
    p_list: &[f64],
    cfg: &AnnexeConfig,
) -> Result<AnnexeReport> {
    let s = Complex64::new(sigma, 0.0);
    check_half_plane(s)?;
    let mut rows = Vec::with_capacity(p_list.len());
    for &p in p_list {
        check_p(p)?;
        let (lower, upper) = match space {
            Space::Hp => {
                let v = eval_norm_hp(s, p)?.value;
                (v, v)
            }
            Space::Bp => {
                let v = eval_norm_bp(s, p)?.value;
                (v, v)
            }
            Space::ApMu => {
                let lo = eval_lower_ap(
                    &cfg.measure,
                    sigma,
                    p,
                    (cfg.truncation)(p),
                    cfg.samples,
                    cfg.seed,
                )?;
                let up = match as_even(p) {
                    Some(pe) => eval_bound_ap_even(&cfg.measure, s, pe)?.value,
                    None => eval_bound_ap_general(&cfg.measure, s, p, None)?.value,
                };
                ((lo.value - 2.0 * lo.std_error).max(0.0), up)
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "comparison table is not defined for space {other}"
                )));
            }
        };
        rows.push(AnnexeRow { p, lower, upper });
    }
    let exact = matches!(space, Space::Hp | Space::Bp);
    let mut checks = Vec::new();
    for r in &rows {
        checks.push(RelationCheck {
            relation: "ordered".into(),
            pass: r.lower <= r.upper * (1.0 + ALGEBRAIC_TOL),
            detail: format!("p = {}: lower {} <= upper {}", r.p, r.lower, r.upper),
        });
    }
    for a in &rows {
        for b in &rows {
            for c in &rows {
                let lhs = 1.0 / a.p;
                if b.p <= c.p && (lhs - 1.0 / b.p - 1.0 / c.p).abs() <= 1e-12 {
                    checks.push(RelationCheck {
                        relation: "product".into(),
                        pass: a.upper * (1.0 + ALGEBRAIC_TOL) >= b.lower * c.lower,
                        detail: format!("N_{} >= N_{} N_{}", a.p, b.p, c.p),
                    });
                }
            }
            if b.p > a.p {
                checks.push(RelationCheck {
                    relation: "monotone".into(),
                    pass: a.upper * (1.0 + ALGEBRAIC_TOL) >= b.lower,
                    detail: format!("N_{} >= N_{}", a.p, b.p),
                });
                let m = b.p / a.p;
                if m.fract() == 0.0 {
                    let root = a.upper.powf(1.0 / m);
                    let mut pass = b.lower <= root * (1.0 + ALGEBRAIC_TOL);
                    if exact {
                        pass &= (b.upper - a.lower.powf(1.0 / m)).abs() <= ALGEBRAIC_TOL * root;
                    }
                    checks.push(RelationCheck {
                        relation: "power".into(),
                        pass,
                        detail: format!("N_{} <= N_{}^(1/{m})", b.p, a.p),
                    });
                }
            }
        }
    }
    Ok(AnnexeReport {
        space,
        sigma,
        rows,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn hp_and_bp_examples() {
        assert_relative_eq!(
            eval_norm_hp(re(1.0), 2.0).unwrap().value,
            (PI * PI / 6.0).sqrt(),
            max_relative = 1e-13
        );
        assert!(
            eval_norm_hp(re(1.0), 3.0).unwrap().value < eval_norm_hp(re(1.0), 2.0).unwrap().value
        );
        assert!(eval_norm_hp(re(0.51), 1.0).unwrap().value <= 51.0);
        assert_relative_eq!(
            eval_norm_bp(re(1.0), 2.0).unwrap().value,
            PI * PI / 6.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            eval_norm_bp(re(1.0), 4.0).unwrap().value,
            (PI * PI / 6.0).sqrt(),
            max_relative = 1e-13
        );
        assert!(matches!(
            eval_norm_hp(re(0.5), 2.0),
            Err(Error::OutOfRange(_))
        ));
        assert!(eval_norm_bp(re(0.4), 2.0).is_err());
    }

    #[test]
    fn vertical_invariance() {
        let mu = MeasureSpec::Alpha(0.5);
        for sigma in [0.6, 0.9, 2.0] {
            let (a, b) = (re(sigma), Complex64::new(sigma, 17.0));
            assert_eq!(
                eval_norm_hp(a, 3.0).unwrap().value,
                eval_norm_hp(b, 3.0).unwrap().value
            );
            assert_eq!(
                eval_norm_a2(&mu, a).unwrap().value,
                eval_norm_a2(&mu, b).unwrap().value
            );
            assert_eq!(
                eval_bound_ap_general(&mu, a, 3.0, None).unwrap().value,
                eval_bound_ap_general(&mu, b, 3.0, None).unwrap().value
            );
        }
    }

    #[test]
    fn a2_closed_forms() {
        let mu0 = MeasureSpec::Alpha(0.0);
        let sigma = 0.8;
        // Σ(1+log n) n^{−x} = ζ(x) − ζ′(x); ζ′ by a symmetric difference of ζ
        let x = 2.0 * sigma;
        let h = 1e-5;
        let dz = (zeta(x + h).unwrap() - zeta(x - h).unwrap()) / (2.0 * h);
        assert_relative_eq!(
            eval_norm_a2(&mu0, re(sigma)).unwrap().value.powi(2),
            zeta(x).unwrap() - dz,
            max_relative = 1e-8
        );
        assert!((eval_norm_a2(&mu0, re(40.0)).unwrap().value - 1.0).abs() < 1e-11);
        assert_relative_eq!(
            eval_norm_a2(&MeasureSpec::DiracAtZero, re(1.0))
                .unwrap()
                .value,
            eval_norm_hp(re(1.0), 2.0).unwrap().value,
            max_relative = 1e-14
        );
    }

    #[test]
    fn a2_matches_direct_kernel_sum() {
        for mu in [
            MeasureSpec::Alpha(0.0),
            MeasureSpec::Alpha(1.0),
            MeasureSpec::Alpha(2.5),
        ] {
            let s = re(2.0);
            let ks = kernel_a2(&mu, s, s, 20_000).unwrap();
            let exact = eval_norm_a2(&mu, s).unwrap().value.powi(2);
            assert!(ks.value.re <= exact);
            assert!(
                (exact - ks.value.re).abs() <= ks.tail_bound + 1e-10 * exact,
                "{mu}"
            );
        }
    }

    #[test]
    fn density_kernel_uses_weights() {
        let mu = MeasureSpec::parse("gamma:2,4").unwrap();
        let s = re(3.0);
        let v = eval_norm_a2(&mu, s).unwrap().value.powi(2);
        let ks = kernel_a2(&mu, s, s, 4000).unwrap();
        assert!((v - ks.value.re).abs() <= ks.tail_bound + 1e-9);
    }

    #[test]
    fn dirac_kernel_is_zeta() {
        let s = Complex64::new(0.9, 2.0);
        let w = Complex64::new(1.3, -0.5);
        let ks = kernel_a2(&MeasureSpec::DiracAtZero, s, w, 500).unwrap();
        let direct: Complex64 = (1..=500)
            .map(|n| (-(w + s.conj()) * (n as f64).ln()).exp())
            .sum();
        assert!((ks.value - direct).norm() <= 1e-12 * direct.norm());
    }

    #[test]
    fn reproducing_property() {
        let mu = MeasureSpec::Alpha(1.0);
        let s = Complex64::new(0.7, 3.0);
        let f = DirichletPolynomial::new(vec![
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.7, -0.1),
            Complex64::new(0.2, 0.2),
        ])
        .unwrap();
        let k = kernel_coefficients(&mu, s, 6).unwrap();
        let ws = WeightSequence::new(mu).prefix(6).unwrap();
        let inner: Complex64 = (1..=6)
            .map(|n| f.coeff(n) * k.coeff(n).conj() * ws[n - 1])
            .sum();
        assert!((inner - f.evaluate(s)).norm() <= 1e-13);
    }

    #[test]
    fn ap_even_bound() {
        let mu0 = MeasureSpec::Alpha(0.0);
        assert_eq!(
            eval_bound_ap_even(&mu0, re(0.8), 2).unwrap().value,
            eval_norm_a2(&mu0, re(0.8)).unwrap().value
        );
        let v = eval_bound_ap_even(&mu0, re(1.0), 4).unwrap().value;
        assert_relative_eq!(
            v,
            log_weighted_zeta(1.0, 2.0).unwrap().powf(0.25),
            max_relative = 1e-14
        );
        assert!(eval_bound_ap_even(&mu0, re(1.0), 3).is_err());
    }

    #[test]
    fn ap_general_basics() {
        let mu = MeasureSpec::Alpha(0.0);
        let b = eval_bound_ap_general(&mu, re(3.0), 3.0, None).unwrap();
        assert!(b.value >= 1.0 && b.value.is_finite());
        let sigma = 0.8;
        let eta = (sigma - 0.5) / 2.0;
        let v = eval_bound_ap_general(&mu, re(sigma), 1.0, Some(&[eta]))
            .unwrap()
            .value;
        let l = sigma - 0.5 - eta;
        assert_relative_eq!(
            v,
            zeta(1.0 + 2.0 * eta).unwrap() / mu.cdf(l).unwrap(),
            max_relative = 1e-14
        );
        assert!(eval_bound_ap_general(&mu, re(0.8), 2.0, Some(&[])).is_err());
        assert!(eval_bound_ap_general(&mu, re(0.8), 2.0, Some(&[0.31])).is_err());
        // the Dirac measure reduces to the Hardy evaluation norm
        let d = eval_bound_ap_general(&MeasureSpec::DiracAtZero, re(0.8), 3.0, None)
            .unwrap()
            .value;
        assert_relative_eq!(
            d,
            eval_norm_hp(re(0.8), 3.0).unwrap().value,
            max_relative = 1e-12
        );
    }

    #[test]
    fn ap_general_sits_above_even_exact() {
        // at p = 2 the general bound dominates the exact A² evaluation norm
        let mu = MeasureSpec::Alpha(1.0);
        for sigma in [0.55, 0.7, 1.0, 2.0] {
            let g = eval_bound_ap_general(&mu, re(sigma), 2.0, None)
                .unwrap()
                .value;
            let e = eval_norm_a2(&mu, re(sigma)).unwrap().value;
            assert!(g >= e * (1.0 - 1e-12), "σ = {sigma}: {g} < {e}");
        }
    }

    #[test]
    fn zero_variant_decays() {
        let mu = MeasureSpec::Alpha(0.0);
        let a = eval_bound_ap_zero(&mu, re(4.0), 2.0, None).unwrap().value;
        let b = eval_bound_ap_zero(&mu, re(8.0), 2.0, None).unwrap().value;
        assert!(b < a && a < 1.0);
        assert!(hp_zero_eval_bound(1.5, 2.0).unwrap() <= zeta(3.0).unwrap().sqrt());
    }

    #[test]
    fn dp_large_sigma_limit() {
        let mu = MeasureSpec::Alpha(0.0);
        let v = eval_bound_dp(&mu, re(20.0), 2.0).unwrap().value;
        assert_relative_eq!(v, 2f64.sqrt(), max_relative = 1e-12);
        let v1 = eval_bound_dp(&mu, re(20.0), 1.0).unwrap().value;
        assert_eq!(v1, 1.0);
        assert!(eval_bound_dp(&mu, re(0.6), 2.0).unwrap().value > v);
    }

    #[test]
    fn lower_bound_trivial_and_sandwich() {
        let mu = MeasureSpec::Alpha(0.0);
        let one = eval_lower_ap(&mu, 0.8, 2.0, 1, 0, 0).unwrap();
        assert_eq!(one.value, 1.0);
        for sigma in [0.6, 0.8, 1.2] {
            let lo = eval_lower_ap(&mu, sigma, 2.0, 2000, 0, 0).unwrap().value;
            let ex = eval_norm_a2(&mu, re(sigma)).unwrap().value;
            assert!(lo <= ex * (1.0 + 1e-12) && lo >= 0.5 * ex);
            let lo4 = eval_lower_ap(&mu, sigma, 4.0, 300, 0, 0).unwrap().value;
            let up4 = eval_bound_ap_even(&mu, re(sigma), 4).unwrap().value;
            assert!(lo4 <= up4 && lo4 >= 1e-2 * up4);
        }
    }

    #[test]
    fn kernel_witness_sum() {
        // hyperbola method vs a divisor sieve
        let n = 5000u64;
        let sigma = 0.7;
        let mut d = vec![0u32; n as usize + 1];
        for a in 1..=n as usize {
            for m in (a..=n as usize).step_by(a) {
                d[m] += 1;
            }
        }
        let direct: f64 = (1..=n as usize)
            .map(|k| d[k] as f64 * (k as f64).powf(-2.0 * sigma))
            .sum();
        assert_relative_eq!(divisor_partial_sum(sigma, n), direct, max_relative = 1e-12);
        let w = bp_kernel_witness(1.0, 100_000).unwrap().value;
        assert!(w <= PI * PI / 6.0 && w >= 0.9 * PI * PI / 6.0);
    }

    #[test]
    fn disk_bounds() {
        let z0 = eval_zero_disk();
        assert!(z0 >= 1.0 && z0.is_finite());
        for a in [0.0, 0.3, 0.6, 0.9, 0.99] {
            let z = Complex64::new(a, 0.0);
            let v = disk_eval_bound(DiskWeight::Uniform, z, 2.0, None)
                .unwrap()
                .value;
            let bergman = 1.0 / (1.0 - a * a);
            assert!(v / bergman <= 10.0 && v >= 1.0, "|z| = {a}");
        }
        assert!(disk_eval_bound(DiskWeight::Uniform, Complex64::new(1.0, 0.0), 2.0, None).is_err());
        assert!(
            disk_eval_bound(DiskWeight::Power(-2.0), Complex64::new(0.1, 0.0), 2.0, None).is_err()
        );
    }

    fn eval_zero_disk() -> f64 {
        disk_eval_bound(DiskWeight::Uniform, Complex64::new(0.0, 0.0), 3.0, None)
            .unwrap()
            .value
    }

    #[test]
    fn annexe_exact_spaces() {
        for space in [Space::Hp, Space::Bp] {
            let r = annexe_compare(
                space,
                0.7,
                &[1.0, 2.0, 3.0, 4.0, 6.0, 8.0],
                &AnnexeConfig::default(),
            )
            .unwrap();
            assert!(
                r.passed(),
                "{space}: {:?}",
                r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
            );
            assert!(r.checks.iter().any(|c| c.relation == "power"));
            assert!(r.checks.iter().any(|c| c.relation == "product"));
        }
        assert!(annexe_compare(Space::Disk, 0.7, &[2.0], &AnnexeConfig::default()).is_err());
    }
}
