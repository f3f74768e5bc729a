//! Three entry points for the static page in `www/`. The plain functions are
//! ordinary Rust and tested natively; the `js_*` wrappers only convert errors.

use lpg_core::experiments::ManufacturedProblem;
use lpg_core::profile::Coefficients;
use lpg_core::solver::LpgSolver;
use lpg_core::stability::amplification_spectrum;
use lpg_core::Result;
use wasm_bindgen::prelude::*;

/// Largest degree the page may request; keeps a click under a second.
pub const MAX_DEGREE: usize = 96;
/// Largest number of time steps per request.
pub const MAX_STEPS: usize = 200_000;

fn check(degree: usize, dt: f64, t_final: f64) -> Result<()> {
    if degree > MAX_DEGREE {
        return Err(lpg_core::LpgError::Config(format!("N = {degree} exceeds {MAX_DEGREE}")));
    }
    if dt > 0.0 && t_final / dt > MAX_STEPS as f64 {
        return Err(lpg_core::LpgError::Config(format!("more than {MAX_STEPS} steps requested")));
    }
    Ok(())
}

fn run(degree: usize, dt: f64, t_final: f64, alpha: f64, beta: f64) -> Result<(ManufacturedProblem, LpgSolver, lpg_core::ModalState)> {
    check(degree, dt, t_final)?;
    let problem = ManufacturedProblem::new(Coefficients::constant(alpha, beta));
    let t = lpg_core::experiments::aligned_final_time(t_final, dt);
    let solver = LpgSolver::new(problem.config(degree, dt, t))?;
    let last = solver.run_with(|_| Ok(()))?;
    Ok((problem, solver, last))
}

/// `[x_0, u_N(x_0), u(x_0), x_1, ...]` on `samples` uniform points at the
/// final time, for the manufactured problem with constant coefficients.
pub fn solve_profile(degree: usize, dt: f64, t_final: f64, alpha: f64, beta: f64, samples: usize) -> Result<Vec<f64>> {
    let (problem, solver, last) = run(degree, dt, t_final, alpha, beta)?;
    let samples = samples.max(2);
    let xs: Vec<f64> = (0..samples).map(|i| -1.0 + 2.0 * i as f64 / (samples - 1) as f64).collect();
    let approx = solver.nodal_values(&last, &xs);
    let t = solver.time(last.k);
    Ok(xs.iter().zip(approx).flat_map(|(&x, u)| [x, u, problem.exact(x, t)]).collect())
}

/// Eigenvalues of the amplification matrix, `[re_0, im_0, re_1, im_1, ...]`.
pub fn amplification_eigenvalues(degree: usize, dt: f64, alpha: f64, beta: f64) -> Result<Vec<f64>> {
    check(degree, dt, 0.0)?;
    let rep = amplification_spectrum(degree, dt, alpha, beta)?;
    Ok(rep.eigenvalues.iter().flat_map(|&(re, im)| [re, im]).collect())
}

/// `|U_n|` of the final numerical state followed by `|u_n|` of the projected
/// exact solution; each half has `N - 2` entries.
pub fn modal_spectrum(degree: usize, dt: f64, t_final: f64, alpha: f64, beta: f64) -> Result<Vec<f64>> {
    let (problem, solver, last) = run(degree, dt, t_final, alpha, beta)?;
    let t = solver.time(last.k);
    let exact = solver.project(|x| problem.exact(x, t))?;
    Ok(last.coeffs.iter().chain(exact.iter()).map(|v| v.abs()).collect())
}

fn js(r: Result<Vec<f64>>) -> std::result::Result<Vec<f64>, JsValue> {
    r.map_err(|e| JsValue::from_str(&format!("{}: {e}", e.code())))
}

#[wasm_bindgen]
pub fn js_solve_profile(degree: usize, dt: f64, t_final: f64, alpha: f64, beta: f64, samples: usize) -> std::result::Result<Vec<f64>, JsValue> {
    js(solve_profile(degree, dt, t_final, alpha, beta, samples))
}

#[wasm_bindgen]
pub fn js_amplification_eigenvalues(degree: usize, dt: f64, alpha: f64, beta: f64) -> std::result::Result<Vec<f64>, JsValue> {
    js(amplification_eigenvalues(degree, dt, alpha, beta))
}

#[wasm_bindgen]
pub fn js_modal_spectrum(degree: usize, dt: f64, t_final: f64, alpha: f64, beta: f64) -> std::result::Result<Vec<f64>, JsValue> {
    js(modal_spectrum(degree, dt, t_final, alpha, beta))
}
