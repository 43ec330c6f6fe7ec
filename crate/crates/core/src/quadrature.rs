//! Quadrature rules used by the action-angle integrals.
//!
//! Three rules cover all integrands that appear in this crate:
//!
//! * Gauss-Jacobi with weight `(1 - u)^(-1/2)` for integrals carrying an
//!   inverse-square-root singularity at the upper endpoint,
//! * Gauss-Legendre for smooth integrands,
//! * tanh-sinh (double-exponential) for smooth integrands on truncated
//!   intervals where endpoint behaviour may still be steep.
//!
//! Gauss rules are built with the Golub-Welsch algorithm: nodes are the
//! eigenvalues of the symmetric tridiagonal Jacobi matrix of the weight's
//! orthogonal polynomials and weights come from the first components of the
//! eigenvectors. Rules are cached per node count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::Error;

/// Controls for the adaptive quadrature drivers.
///
/// `nodes` is the starting Gauss node count; adaptive evaluation doubles it
/// until two successive values agree to `tol`, capping at [`MAX_NODES`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub nodes: usize,
    pub tol: f64,
}

pub const MAX_NODES: usize = 1024;

impl QuadratureSpec {
    pub fn new(nodes: usize, tol: f64) -> Result<Self, Error> {
        if nodes < 16 {
            return Err(Error::validation(format!(
                "quadrature node count must be >= 16, got {nodes}"
            )));
        }
        if tol < 1e-14 {
            return Err(Error::validation(format!(
                "quadrature tolerance must be >= 1e-14, got {tol}"
            )));
        }
        Ok(QuadratureSpec { nodes, tol })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes: 64,
            tol: 1e-12,
        }
    }
}

/// Value plus an estimate of the achieved error (difference of the last two
/// refinement levels).
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum RuleKind {
    Legendre,
    JacobiHalf, // weight (1 - x)^(-1/2) on [-1, 1]
}

/// Nodes and weights on the reference interval [-1, 1].
type Rule = Arc<Vec<(f64, f64)>>;

fn rule_cache() -> &'static Mutex<HashMap<(RuleKind, usize), Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<(RuleKind, usize), Rule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn get_rule(kind: RuleKind, n: usize) -> Rule {
    if let Some(r) = rule_cache().lock().unwrap().get(&(kind, n)) {
        return r.clone();
    }
    let rule = Arc::new(match kind {
        RuleKind::Legendre => golub_welsch(n, 0.0, 0.0),
        RuleKind::JacobiHalf => golub_welsch(n, -0.5, 0.0),
    });
    rule_cache().lock().unwrap().insert((kind, n), rule.clone());
    rule
}

/// Recurrence coefficients of the Jacobi polynomials P^(alpha,beta) and the
/// zeroth moment of the weight (1-x)^alpha (1+x)^beta on [-1, 1].
fn jacobi_recurrence(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let ab = alpha + beta;
    for (k, d) in diag.iter_mut().enumerate() {
        let kf = k as f64;
        let denom = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
        *d = if denom == 0.0 {
            // k = 0 with alpha + beta = 0 or -1
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / denom
        };
    }
    for (k, o) in off.iter_mut().enumerate() {
        let kf = (k + 1) as f64; // off-diagonal b_k for k = 1..n-1
        let num = 4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab);
        let den = (2.0 * kf + ab).powi(2) * (2.0 * kf + ab + 1.0) * (2.0 * kf + ab - 1.0);
        *o = (num / den).sqrt();
    }
    // mu0 = 2^(a+b+1) B(a+1, b+1); the two cases used here are closed-form.
    let mu0 = if alpha == 0.0 && beta == 0.0 {
        2.0
    } else if (alpha + 0.5).abs() < 1e-15 && beta == 0.0 {
        2.0 * std::f64::consts::SQRT_2
    } else {
        2f64.powf(ab + 1.0) * beta_fn(alpha + 1.0, beta + 1.0)
    };
    (diag, off, mu0)
}

fn beta_fn(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Lanczos approximation; only used for exotic (alpha, beta) pairs.
fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = 0.999_999_999_999_809_9;
    let t = x + 7.5;
    for (i, &g) in G.iter().enumerate() {
        a += g / (x + (i as f64) + 1.0);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Golub-Welsch: nodes/weights from the symmetric tridiagonal Jacobi matrix.
fn golub_welsch(n: usize, alpha: f64, beta: f64) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let (mut d, mut e, mu0) = jacobi_recurrence(n, alpha, beta);
    e.resize(n, 0.0);
    // First row of the eigenvector matrix.
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tql2_first_row(&mut d, &mut e, &mut z);
    let mut out: Vec<(f64, f64)> = d
        .into_iter()
        .zip(z.into_iter().map(|v| mu0 * v * v))
        .collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Symmetric tridiagonal QL with implicit shifts, tracking only the first
/// row of the accumulated eigenvector matrix (all that quadrature weights
/// need).
fn tql2_first_row(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    if n == 1 {
        return;
    }
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
            assert!(iter <= 50, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // Rotate the tracked eigenvector row.
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Gauss-Legendre approximation of the integral of `f` over [a, b] with `n`
/// nodes.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let rule = get_rule(RuleKind::Legendre, n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(x, w) in rule.iter() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Gauss-Jacobi approximation of `∫_a^b f(u) (b - u)^(-1/2) du` with `n`
/// nodes; the upper-endpoint singularity is absorbed by the weight.
pub fn gauss_jacobi_upper<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let rule = get_rule(RuleKind::JacobiHalf, n);
    // u = mid + half*x maps [-1,1] -> [a,b]; (b-u)^(-1/2) = (half(1-x))^(-1/2).
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for &(x, w) in rule.iter() {
        acc += w * f(mid + half * x);
    }
    acc * half.sqrt()
}

/// Doubles the node count until two successive evaluations differ by less
/// than `tol`, starting from `spec.nodes` and capping at [`MAX_NODES`].
fn adaptive<E: Fn(usize) -> f64>(eval: E, spec: QuadratureSpec) -> QuadResult {
    let mut n = spec.nodes.max(16);
    let mut prev = eval(n);
    loop {
        let next_n = (n * 2).min(MAX_NODES);
        if next_n == n {
            return QuadResult {
                value: prev,
                error: f64::NAN,
            };
        }
        let cur = eval(next_n);
        let err = (cur - prev).abs();
        if err <= spec.tol * (1.0 + cur.abs()) {
            return QuadResult {
                value: cur,
                error: err,
            };
        }
        n = next_n;
        prev = cur;
    }
}

pub fn adaptive_gauss_legendre<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: QuadratureSpec,
) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
        };
    }
    adaptive(|n| gauss_legendre(f, a, b, n), spec)
}

pub fn adaptive_gauss_jacobi_upper<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: QuadratureSpec,
) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
        };
    }
    adaptive(|n| gauss_jacobi_upper(f, a, b, n), spec)
}

/// tanh-sinh quadrature over [a, b]. Node count per level grows as 2^level;
/// refinement stops when two levels agree to `tol` or the cumulative node
/// budget reaches [`MAX_NODES`] * 4.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
        };
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let t_max = 3.8f64; // weights below ~1e-16 beyond this
    let pi_half = std::f64::consts::FRAC_PI_2;
    // Distance of the node from its endpoint, computed without cancellation:
    // 1 - tanh(s) = 2 / (exp(2s) + 1) for s >= 0. Returns the two node
    // positions of the symmetric pair and the common weight factor.
    let pair = |t: f64| -> Option<(f64, f64, f64)> {
        let s = pi_half * t.sinh();
        let offset = half * 2.0 / ((2.0 * s).exp() + 1.0);
        let w = pi_half * t.cosh() / s.cosh().powi(2);
        if offset == 0.0 || !w.is_finite() || w == 0.0 {
            return None;
        }
        Some((a + offset, b - offset, w))
    };
    let mut h = 1.0f64;
    // Level 0: nodes at integer multiples of h.
    let mut sum = {
        let mut acc = pi_half * f(mid);
        let mut k = 1;
        while (k as f64) * h <= t_max {
            if let Some((xl, xr, w)) = pair((k as f64) * h) {
                acc += w * (f(xl) + f(xr));
            }
            k += 1;
        }
        acc
    };
    let mut prev = sum * h * half;
    let mut total_nodes = (2.0 * t_max / h) as usize;
    loop {
        h *= 0.5;
        // Add the new (odd-multiple) nodes of this level.
        let mut k = 1;
        while (k as f64) * h <= t_max {
            if let Some((xl, xr, w)) = pair((k as f64) * h) {
                sum += w * (f(xl) + f(xr));
            }
            total_nodes += 2;
            k += 2;
        }
        let cur = sum * h * half;
        let err = (cur - prev).abs();
        if err <= tol * (1.0 + cur.abs()) || total_nodes >= MAX_NODES * 4 {
            return QuadResult {
                value: cur,
                error: err,
            };
        }
        prev = cur;
    }
}
