//! Spectra of the step operator and numeric stability certificates.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::assembly::{build_step_matrices, OperatorSet};
use crate::eigen::{eigen_residual, eigenvalues};
use crate::error::{LpgError, Result};
use crate::legendre::BasisSpec;
use crate::solver::{LpgSolver, ModalState};

/// Eigenvalues of the amplification matrix `G = A^{-1} B` (and of `A`).
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub degree: usize,
    pub dt: f64,
    pub alpha: f64,
    pub beta: f64,
    pub eigenvalues: Vec<(f64, f64)>,
    pub spectral_radius: f64,
    /// Largest `||G v - lambda v|| / ||v||` over all computed pairs.
    pub max_residual: f64,
}

impl SpectrumReport {
    fn from_matrix(degree: usize, dt: f64, alpha: f64, beta: f64, g: &nalgebra::DMatrix<f64>) -> Result<Self> {
        let ev: Vec<Complex64> = eigenvalues(g)?;
        let max_residual = ev.iter().map(|&l| eigen_residual(g, l)).fold(0.0, f64::max);
        let spectral_radius = ev.iter().map(|l| l.norm()).fold(0.0, f64::max);
        Ok(Self {
            degree,
            dt,
            alpha,
            beta,
            eigenvalues: ev.iter().map(|l| (l.re, l.im)).collect(),
            spectral_radius,
            max_residual,
        })
    }
}

/// Spectrum of `G = A^{-1} B` for constant coefficients.
pub fn amplification_spectrum(degree: usize, dt: f64, alpha: f64, beta: f64) -> Result<SpectrumReport> {
    let ops = OperatorSet::from_weak_form(BasisSpec::new(degree)?)?;
    let mats = build_step_matrices(&ops, dt, alpha, beta)?;
    let mut g = mats.b.clone();
    for mut col in g.column_iter_mut() {
        let mut v = col.clone_owned();
        mats.solve_in_place(&mut v);
        col.copy_from(&v);
    }
    SpectrumReport::from_matrix(degree, dt, alpha, beta, &g)
}

/// Spectrum of the implicit step matrix `A` itself.
pub fn step_matrix_spectrum(degree: usize, dt: f64, alpha: f64, beta: f64) -> Result<SpectrumReport> {
    let ops = OperatorSet::from_weak_form(BasisSpec::new(degree)?)?;
    let mats = build_step_matrices(&ops, dt, alpha, beta)?;
    SpectrumReport::from_matrix(degree, dt, alpha, beta, &mats.a)
}

/// Hypothesis `(3/8 - eps1/16) alpha - (eps2/8 + 9/8) beta > 0` for one sample;
/// `eps1`, `eps2` are expected positive.
pub fn hypothesis_h_check(alpha: f64, beta: f64, eps1: f64, eps2: f64) -> bool {
    (3.0 / 8.0 - eps1 / 16.0) * alpha - (eps2 / 8.0 + 9.0 / 8.0) * beta > 0.0
}

/// Weighted quantities of one discrete function `u_N`.
#[derive(Debug, Clone, Copy, Default)]
struct WeightedNorms {
    /// `int u^2 / (1 - x)`
    omega: f64,
    /// `int (u')^2`
    grad: f64,
    /// `int (u')^2 / (1 - x)`
    grad_omega: f64,
    /// `int u^2 / (1 - x)^3`
    omega_m3: f64,
    /// `u(-1)`
    left: f64,
}

fn weighted_norms(solver: &LpgSolver, coeffs: &DVector<f64>) -> WeightedNorms {
    let rule = solver.quadrature();
    // p = sum u_n phi_n, so u = (1 - x) p.
    let p = solver.phi_nodes() * coeffs;
    let du = solver.dtrial_nodes() * coeffs;
    let mut out = WeightedNorms::default();
    for (i, (&x, &w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
        let s = 1.0 - x;
        out.omega += w * s * p[i] * p[i];
        out.grad += w * du[i] * du[i];
        out.grad_omega += w * du[i] * du[i] / s;
        out.omega_m3 += w * p[i] * p[i] / s;
    }
    let basis = solver.basis();
    out.left = ModalState { coeffs: coeffs.clone(), k: 0 }.nodal_values(&basis, &[-1.0])[0];
    out
}

/// `||u_N||^2_omega` with `omega = (1 - x)^{-1}`.
pub fn omega_norm_sq(solver: &LpgSolver, coeffs: &DVector<f64>) -> f64 {
    weighted_norms(solver, coeffs).omega
}

/// Both sides of the discrete energy inequality along one run.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityCertificate {
    pub ell: f64,
    /// Left side at every `n = 1..=n_T`.
    pub lhs: Vec<f64>,
    /// Right side at every `n = 1..=n_T`.
    pub rhs: Vec<f64>,
    /// `||u_N^n||^2_omega` for `n = 0..=n_T`.
    pub omega_norms: Vec<f64>,
    pub min_margin: f64,
    /// `true` when some right side falls below its left side. The source norm is
    /// a discrete lower bound, so this is a warning rather than a proof failure.
    pub negative_margin: bool,
}

/// Evaluates
/// `||u^n||^2_w + dt sum (3 l a_k - 1) ||u'||^2 + dt sum a_k |u(-1)|^2
///  + dt sum b_k (||u'||^2_w - ||u||^2_{w^-3}) <= 8 l ||u^0||^2_w + 8 dt l^2 sum ||f||^2_{-1}`
/// with all `u` at half levels and `w = (1 - x)^{-1}`.
///
/// `||f||_{-1}` is replaced by `sup_{v in W_{N-1}} (f, v) / ||v'||`, which for
/// `v = sum c_m phi_m` equals `sqrt(b^T L^{-1} b)` since `(phi_n', phi_m') = l_mn`.
pub fn stability_certificate(solver: &LpgSolver, ell: f64) -> Result<StabilityCertificate> {
    if !(ell >= 1.0) {
        return Err(LpgError::Config(format!("ell = {ell} must be >= 1")));
    }
    let cfg = solver.config();
    let threshold = 1.0 / (3.0 * ell);
    for k in 0..=solver.steps() {
        let (alpha, beta) = cfg.coefficients.at(solver.time(k))?;
        if alpha < threshold - 1e-12 {
            return Err(LpgError::Hypothesis {
                k,
                detail: format!("alpha = {alpha} < 1/(3 ell) = {threshold}"),
            });
        }
        if beta < 0.0 {
            return Err(LpgError::Hypothesis { k, detail: format!("beta = {beta} < 0") });
        }
    }
    let l_diag = solver.operators().l.diagonal();
    let dt = cfg.dt;
    let mut states: Vec<DVector<f64>> = Vec::with_capacity(solver.steps() + 1);
    solver.run_with(|s| {
        states.push(s.coeffs.clone());
        Ok(())
    })?;
    let norm0 = omega_norm_sq(solver, &states[0]);
    let mut omega_norms = vec![norm0];
    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    let (mut lhs_sum, mut rhs_sum) = (0.0, 0.0);
    let mut min_margin = f64::INFINITY;
    for k in 0..solver.steps() {
        let (alpha, beta) = cfg.coefficients.at(solver.time(k))?;
        let half = (&states[k] + &states[k + 1]) * 0.5;
        let nh = weighted_norms(solver, &half);
        lhs_sum += dt
            * ((3.0 * ell * alpha - 1.0) * nh.grad
                + alpha * nh.left * nh.left
                + beta * (nh.grad_omega - nh.omega_m3));
        let b = solver.source_load_vector(k)?;
        let dual: f64 = b.iter().zip(l_diag.iter()).map(|(bm, lm)| bm * bm / lm).sum();
        rhs_sum += 8.0 * dt * ell * ell * dual;
        let nn = omega_norm_sq(solver, &states[k + 1]);
        omega_norms.push(nn);
        let l = nn + lhs_sum;
        let r = 8.0 * ell * norm0 + rhs_sum;
        min_margin = min_margin.min(r - l);
        lhs.push(l);
        rhs.push(r);
    }
    Ok(StabilityCertificate {
        ell,
        lhs,
        rhs,
        omega_norms,
        min_margin,
        negative_margin: min_margin < 0.0,
    })
}
