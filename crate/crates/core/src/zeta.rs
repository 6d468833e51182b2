//! Real-argument sums `Σ_{n>=1} (1 + log n)^β n^{−x}` for `x > 1`.
//!
//! Direct summation to `M` followed by the integral tail and Euler–Maclaurin
//! corrections. `β = 0` is ζ(x); `β = 1` is ζ(x) − ζ′(x).

use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{Error, Result};

const CUT: usize = 48;
const LARGE_X: f64 = 40.0;
const BERNOULLI: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// ζ(x) for real x > 1.
pub fn zeta(x: f64) -> Result<f64> {
    log_weighted_zeta(0.0, x)
}

/// ζ(x) − ζ′(x) = Σ (1 + log n) n^{−x}.
pub fn zeta_minus_derivative(x: f64) -> Result<f64> {
    log_weighted_zeta(1.0, x)
}

/// ζ(x) − 1 = Σ_{n>=2} n^{−x}, without cancellation for large x.
pub fn zeta_minus_one(x: f64) -> Result<f64> {
    weighted_sum(0.0, x, 2)
}

/// Σ (1 + log n)^β n^{−x} for β >= 0, x > 1.
pub fn log_weighted_zeta(beta: f64, x: f64) -> Result<f64> {
    weighted_sum(beta, x, 1)
}

fn weighted_sum(beta: f64, x: f64, first: usize) -> Result<f64> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(Error::Divergent(format!(
            "Dirichlet sum at x = {x} needs x > 1"
        )));
    }
    if !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "log weight exponent must be >= 0, got {beta}"
        )));
    }
    let f = |t: f64| (1.0 + t.ln()).powf(beta) * t.powf(-x);
    let mut head = 0.0;
    for n in (first..CUT).rev() {
        head += f(n as f64);
    }
    if x > LARGE_X {
        // terms beyond the head are below (first/CUT)^x of it
        return Ok(head);
    }
    let m = CUT as f64;
    let tail = log_weighted_tail(beta, x, m)?;
    let mut corr = 0.5 * f(m);
    // derivative polynomials: f^{(k)}(t) = t^{−x−k} Σ_j c_j u^{β−j}, u = 1 + log t
    let u = 1.0 + m.ln();
    let mut coeffs = vec![1.0f64];
    let mut fact = 1.0f64;
    for k in 0..(2 * BERNOULLI.len()) {
        let mut next = vec![0.0f64; coeffs.len() + 1];
        for (j, &c) in coeffs.iter().enumerate() {
            next[j] -= (x + k as f64) * c;
            next[j + 1] += (beta - j as f64) * c;
        }
        coeffs = next;
        let order = k + 1;
        if order % 2 == 1 {
            let idx = order / 2;
            fact *= if order == 1 {
                2.0
            } else {
                (order as f64) * (order as f64 + 1.0)
            };
            let deriv: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| c * u.powf(beta - j as f64))
                .sum::<f64>()
                * m.powf(-x - order as f64);
            corr -= BERNOULLI[idx] / fact * deriv;
        }
    }
    Ok(head + tail + corr)
}

/// `∫_M^∞ (1 + log t)^β t^{−x} dt = e^{x−1} (x−1)^{−β−1} Γ(β+1, (x−1)(1+log M))`.
pub fn log_weighted_tail(beta: f64, x: f64, m: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::Divergent(format!(
            "tail integral at x = {x} needs x > 1"
        )));
    }
    let a = beta + 1.0;
    let y = (x - 1.0) * (1.0 + m.ln());
    // e^{x−1} (x−1)^{−a} Γ(a, y), grouped to avoid overflow near x = 1
    let scale = (x - 1.0).powf(-a);
    let upper = upper_gamma(a, y);
    Ok((x - 1.0).exp() * scale * upper)
}

/// Non-regularized upper incomplete gamma Γ(a, y).
pub fn upper_gamma(a: f64, y: f64) -> f64 {
    if a.fract() == 0.0 && a <= 20.0 {
        // Γ(k+1, y) = k! e^{−y} Σ_{j<=k} y^j / j!
        let k = a as u32 - 1;
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..=k {
            term *= y / j as f64;
            sum += term;
        }
        let kfact: f64 = (1..=k).map(|j| j as f64).product();
        return kfact * (-y).exp() * sum;
    }
    gamma_ur(a, y) * gamma(a)
}
