//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use lpg_core::experiments::ManufacturedProblem;
use lpg_core::legendre::BasisSpec;
use lpg_core::quadrature::gauss_nodes;
use nalgebra::DVector;

/// `u_t + alpha u_xxx - beta u_xx - f` for the manufactured solution, with the
/// spatial derivatives assembled by Leibniz's rule from the two factors.
pub fn manufactured_residual(p: &ManufacturedProblem, x: f64, t: f64, alpha: f64, beta: f64, f: f64) -> f64 {
    let (a, b, c) = (p.a, p.b, p.c);
    let th = b * x + c * t;
    let s = [
        (a * x).sin().powi(2),
        a * (2.0 * a * x).sin(),
        2.0 * a * a * (2.0 * a * x).cos(),
        -4.0 * a.powi(3) * (2.0 * a * x).sin(),
    ];
    let g = [th.sin(), b * th.cos(), -b * b * th.sin(), -b.powi(3) * th.cos()];
    let u_t = c * s[0] * th.cos();
    let u_xx = s[2] * g[0] + 2.0 * s[1] * g[1] + s[0] * g[2];
    let u_xxx = s[3] * g[0] + 3.0 * s[2] * g[1] + 3.0 * s[1] * g[2] + s[0] * g[3];
    u_t + alpha * u_xxx - beta * u_xx - f
}

/// Value and derivatives `[u, u', u'', u''']` of `sum c_n (1 - x) phi_n` at `x`.
pub fn trial_combination(basis: &BasisSpec, coeffs: &DVector<f64>, x: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (n, cn) in coeffs.iter().enumerate() {
        let d = basis.trial_derivs(n, x).unwrap();
        for i in 0..4 {
            out[i] += cn * d[i];
        }
    }
    out
}

/// `(u, phi_m) + (dt/2) alpha (u''', phi_m) - (dt/2) beta (u'', phi_m)` by Gauss quadrature.
pub fn weak_form_apply(basis: &BasisSpec, coeffs: &DVector<f64>, dt: f64, alpha: f64, beta: f64) -> DVector<f64> {
    let rule = gauss_nodes(2 * basis.degree() + 8).unwrap();
    let mut out = DVector::zeros(basis.dim());
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        let u = trial_combination(basis, coeffs, x);
        let integrand = u[0] + 0.5 * dt * alpha * u[3] - 0.5 * dt * beta * u[2];
        for m in 0..basis.dim() {
            out[m] += w * integrand * basis.phi_eval(m, x).unwrap();
        }
    }
    out
}

/// `int u^2 / (1 - x)` for `u = sum c_n (1 - x) phi_n`.
pub fn omega_norm_sq(basis: &BasisSpec, coeffs: &DVector<f64>) -> f64 {
    let rule = gauss_nodes(2 * basis.degree() + 8).unwrap();
    rule.nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&x, &w)| {
            let u = trial_combination(basis, coeffs, x)[0];
            w * u * u / (1.0 - x)
        })
        .sum()
}
