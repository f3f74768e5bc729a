//! Gauss–Legendre quadrature, Chebyshev–Gauss–Lobatto points and weighted
//! inner products on `(-1, 1)`.

use std::f64::consts::PI;

use crate::error::{LpgError, Result};

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;

/// Gauss–Legendre rule of order `q`: exact for polynomials of degree `2q - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_i w_i f(x_i)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `(L_q(x), L_q'(x))` for interior `x`.
fn legendre_with_deriv(q: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, x);
    for k in 1..q {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    let qf = q as f64;
    (cur, qf * (x * cur - prev) / (x * x - 1.0))
}

/// Builds the order-`q` Gauss–Legendre rule.
///
/// Nodes are the roots of `L_q`, found by damped Newton iteration started from
/// the Chebyshev points `-cos((2i + 1) pi / 2q)`. Only the non-positive half is
/// iterated; the rest is mirrored so the rule is exactly symmetric.
pub fn gauss_nodes(q: usize) -> Result<QuadratureRule> {
    if q == 0 {
        return Err(LpgError::Config("quadrature order must be positive".into()));
    }
    if q == 1 {
        return Ok(QuadratureRule { nodes: vec![0.0], weights: vec![2.0] });
    }
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let half = q / 2;
    for i in 0..half {
        let mut x = -((2 * i + 1) as f64 * PI / (2 * q) as f64).cos();
        let (lo, hi) = (-1.0, 0.0);
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre_with_deriv(q, x);
            let mut step = p / dp;
            // Damp any step that would leave the half interval.
            while x - step <= lo || x - step > hi {
                step *= 0.5;
            }
            x -= step;
            if step.abs() <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(LpgError::QuadratureConvergence { order: q, node: i });
        }
        let (_, dp) = legendre_with_deriv(q, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[q - 1 - i] = -x;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        let (_, dp) = legendre_with_deriv(q, 0.0);
        nodes[half] = 0.0;
        weights[half] = 2.0 / (dp * dp);
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Chebyshev–Gauss–Lobatto points `x_j = -cos(pi j / N)`, `j = 0..=N`, ascending
/// with exact endpoints and exact mirror symmetry.
pub fn cgl_points(n: usize) -> Vec<f64> {
    assert!(n >= 1, "CGL grid needs N >= 1");
    let mut pts = vec![0.0; n + 1];
    for j in 0..=n / 2 {
        let x = -(PI * j as f64 / n as f64).cos();
        pts[j] = x;
        pts[n - j] = -x;
    }
    pts[0] = -1.0;
    pts[n] = 1.0;
    if n.is_multiple_of(2) {
        pts[n / 2] = 0.0;
    }
    pts
}

/// `sum_i w_i (1 - x_i)^a (1 + x_i)^b f(x_i) g(x_i)`.
///
/// Gauss nodes are interior, so negative exponents never divide by zero; the
/// caller is responsible for the integrand actually being integrable (e.g.
/// `a = -3` requires `f g` to vanish to third order at `x = 1`).
pub fn weighted_inner_product(
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    let mut acc = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let value = (1.0 - x).powf(a) * (1.0 + x).powf(b) * f(x) * g(x);
        if !value.is_finite() {
            return Err(LpgError::NonFinite { x, value });
        }
        acc += w * value;
    }
    Ok(acc)
}
