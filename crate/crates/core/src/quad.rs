//! Quadrature: adaptive Gauss–Kronrod (7/15), generalized Gauss–Laguerre and
//! Gauss–Legendre rules.

use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex};

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_intervals: 4000,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-12, 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).abs();
    (value, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Globally adaptive G7K15 on a finite interval.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total = v;
    let mut total_err = e;
    let mut evals = 15;
    loop {
        if total_err <= tol.abs.max(tol.rel * total.abs()) {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::QuadratureNonConvergence {
                error: total_err,
                tolerance: tol.abs.max(tol.rel * total.abs()),
            });
        }
        let p = heap.pop().expect("non-empty");
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a.min(p.b) && m < p.a.max(p.b)) {
            // interval cannot be split further
            heap.push(p);
            return Err(Error::QuadratureNonConvergence {
                error: total_err,
                tolerance: tol.abs.max(tol.rel * total.abs()),
            });
        }
        let (v1, e1) = gk15(&mut f, p.a, m);
        let (v2, e2) = gk15(&mut f, m, p.b);
        evals += 30;
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.error;
        heap.push(Panel {
            a: p.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: m,
            b: p.b,
            value: v2,
            error: e2,
        });
        if !total.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                error: f64::INFINITY,
                tolerance: tol.abs,
            });
        }
    }
    // resum to shed drift from incremental updates
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations: evals,
    })
}

/// `∫_a^∞ f` through `t = a + u/(1−u)`.
pub fn integrate_to_infinity(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    tol: Tolerance,
) -> Result<QuadResult> {
    integrate(
        |u| {
            let w = 1.0 - u;
            let t = a + u / w;
            let v = f(t);
            if v == 0.0 {
                0.0
            } else {
                v / (w * w)
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// A quadrature rule: nodes and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| if w == 0.0 { 0.0 } else { w * f(x) })
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

type RuleCache = Mutex<HashMap<(usize, u64), Arc<Rule>>>;

fn laguerre_cache() -> &'static RuleCache {
    static CACHE: std::sync::OnceLock<RuleCache> = std::sync::OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Laguerre rule for the weight `t^α e^{−t}` on (0, ∞).
pub fn gauss_laguerre(n: usize, alpha: f64) -> Result<Arc<Rule>> {
    if n == 0 || !(alpha > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "gauss_laguerre(n = {n}, alpha = {alpha})"
        )));
    }
    let key = (n, alpha.to_bits());
    if let Some(r) = laguerre_cache()
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get(&key)
    {
        return Ok(Arc::clone(r));
    }
    let rule = Arc::new(build_laguerre(n, alpha)?);
    laguerre_cache()
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert(key, Arc::clone(&rule));
    Ok(rule)
}

fn build_laguerre(n: usize, alpha: f64) -> Result<Rule> {
    // Golub–Welsch on the Jacobi matrix, then Newton polishing of each node.
    let mut d: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + alpha + 1.0).collect();
    let mut e: Vec<f64> = (1..=n)
        .map(|i| {
            if i < n {
                (i as f64 * (i as f64 + alpha)).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut z0 = vec![0.0f64; n];
    z0[0] = 1.0;
    tridiagonal_ql(&mut d, &mut e, &mut z0)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let nf = n as f64;
    let lg0 = ln_gamma(alpha + 1.0);
    // log Γ(n+α)/Γ(n) = log Γ(α+1) + Σ_{j<n} log(1 + α/j)
    let lg = lg0 + (1..n).map(|j| (alpha / j as f64).ln_1p()).sum::<f64>();
    let g0 = lg0.exp();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &k in &order {
        let mut z = d[k];
        let mut w = g0 * z0[k] * z0[k];
        for _ in 0..3 {
            let (p1, p2) = laguerre_pair(n, alpha, z);
            let pp = (nf * p1 - (nf + alpha) * p2) / z;
            let step = p1 / pp;
            if !step.is_finite() {
                break;
            }
            z -= step;
            let (q1, q2) = laguerre_pair(n, alpha, z);
            let qp = (nf * q1 - (nf + alpha) * q2) / z;
            let denom = nf * qp * q2;
            let formula = -denom.signum() * (lg - denom.abs().ln()).exp();
            if formula.is_finite() && formula > 0.0 {
                w = formula;
            }
            if step.abs() <= 4.0 * f64::EPSILON * z.abs() {
                break;
            }
        }
        nodes.push(z);
        weights.push(w);
    }
    if nodes.windows(2).any(|p| p[1] <= p[0]) || nodes[0] <= 0.0 {
        return Err(Error::QuadratureNonConvergence {
            error: f64::NAN,
            tolerance: 0.0,
        });
    }
    Ok(Rule { nodes, weights })
}

/// `(L_n^{(α)}(z), L_{n−1}^{(α)}(z))` by the three-term recurrence.
fn laguerre_pair(n: usize, alpha: f64, z: f64) -> (f64, f64) {
    let mut p1 = 1.0f64;
    let mut p2 = 0.0f64;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = ((2.0 * jf + 1.0 + alpha - z) * p2 - (jf + alpha) * p3) / (jf + 1.0);
    }
    (p1, p2)
}

/// Implicit QL on a symmetric tridiagonal matrix (diagonal `d`, off-diagonal
/// `e[i]` between rows i and i+1). Eigenvalues replace `d`; `z0` tracks the
/// first row of the eigenvector matrix.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z0: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::QuadratureNonConvergence {
                    error: e[l].abs(),
                    tolerance: 0.0,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z0[i + 1];
                z0[i + 1] = s * z0[i] + c * zf;
                z0[i] = c * z0[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Gauss–Legendre rule on [a, b].
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let xm = 0.5 * (b + a);
    let xl = 0.5 * (b - a);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp;
        loop {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 + 1.0) * z * p2 - j as f64 * p3) / (j as f64 + 1.0);
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        nodes[i] = xm - xl * z;
        nodes[n - 1 - i] = xm + xl * z;
        weights[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    Rule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::function::gamma::gamma;

    #[test]
    fn gk_polynomial_and_smooth() {
        let r = integrate(|x| x * x, 0.0, 3.0, Tolerance::default()).unwrap();
        assert_relative_eq!(r.value, 9.0, max_relative = 1e-14);
        let r = integrate(f64::sin, 0.0, std::f64::consts::PI, Tolerance::default()).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-13);
    }

    #[test]
    fn gk_semi_infinite() {
        let r = integrate_to_infinity(|t| (-t).exp(), 0.0, Tolerance::default()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
        let r = integrate_to_infinity(|t| 1.0 / (1.0 + t * t), 0.0, Tolerance::default()).unwrap();
        assert_relative_eq!(r.value, std::f64::consts::FRAC_PI_2, max_relative = 1e-12);
    }

    #[test]
    fn laguerre_moments() {
        for &alpha in &[-0.5, 0.0, 1.0, 2.5] {
            for &n in &[16usize, 64, 256] {
                let r = gauss_laguerre(n, alpha).unwrap();
                assert_relative_eq!(r.apply(|_| 1.0), gamma(alpha + 1.0), max_relative = 1e-11);
                assert_relative_eq!(r.apply(|t| t * t), gamma(alpha + 3.0), max_relative = 1e-11);
                assert_relative_eq!(
                    r.apply(|t| (-t).exp()),
                    2f64.powf(-alpha - 1.0) * gamma(alpha + 1.0),
                    max_relative = 1e-11
                );
            }
        }
    }

    #[test]
    fn legendre_exact_for_polynomials() {
        let r = gauss_legendre(10, -1.0, 2.0);
        assert_relative_eq!(
            r.apply(|x| x.powi(19)),
            (2f64.powi(20) - 1.0) / 20.0,
            max_relative = 1e-13
        );
    }
}
