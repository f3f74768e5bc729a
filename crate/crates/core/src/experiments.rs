//! Manufactured-solution benchmark, the space-time error metric, convergence
//! fits, parameter sweeps and modal diagnostics.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LpgError, Result};
use crate::legendre::BasisSpec;
use crate::profile::Coefficients;
use crate::quadrature::cgl_points;
use crate::solver::{LpgSolver, ModalState, NodalEvaluator, SeparableTerm, SolverConfig, Source, Trajectory};
use crate::stability::hypothesis_h_check;

/// `u(x, t) = sin^2(a x) sin(b x + c t)` with the matching source for the
/// active coefficient profiles.
#[derive(Debug, Clone)]
pub struct ManufacturedProblem {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub coefficients: Coefficients,
}

impl ManufacturedProblem {
    /// `a = pi`, `b = c = 12`.
    pub fn new(coefficients: Coefficients) -> Self {
        Self { a: PI, b: 12.0, c: 12.0, coefficients }
    }

    pub fn exact(&self, x: f64, t: f64) -> f64 {
        (self.a * x).sin().powi(2) * (self.b * x + self.c * t).sin()
    }

    pub fn initial(&self, x: f64) -> f64 {
        self.exact(x, 0.0)
    }

    /// Source for given coefficient values, transcribed term by term.
    pub fn source_at(&self, x: f64, t: f64, alpha: f64, beta: f64) -> f64 {
        let (a, b, c) = (self.a, self.b, self.c);
        let s2 = (a * x).sin().powi(2);
        let cos2 = (2.0 * a * x).cos();
        let sin2 = (2.0 * a * x).sin();
        let theta = b * x + c * t;
        ((c - b.powi(3) * alpha) * s2 + 6.0 * a * a * b * alpha * cos2) * theta.cos()
            - a * alpha * (4.0 * a * a + 3.0 * b * b) * sin2 * theta.sin()
            + beta * (-(2.0 * a * a * cos2 - b * b * s2) * theta.sin() - 2.0 * a * b * sin2 * theta.cos())
    }

    /// The source written as six `g(t) h(x)` products.
    ///
    /// With `P = c s2 + alpha (6a^2 b cos2ax - b^3 s2) - beta 2ab sin2ax`,
    /// `R = -alpha a (4a^2 + 3b^2) sin2ax + beta (b^2 s2 - 2a^2 cos2ax)` and
    /// `f = P cos(bx + ct) + R sin(bx + ct)`, expanding the angle sum gives
    /// `f = cos(ct) (P cos bx + R sin bx) + sin(ct) (R cos bx - P sin bx)`.
    pub fn separable_source(&self) -> Source {
        let (a, b, c) = (self.a, self.b, self.c);
        let p0 = move |x: f64| c * (a * x).sin().powi(2);
        let p1 = move |x: f64| 6.0 * a * a * b * (2.0 * a * x).cos() - b.powi(3) * (a * x).sin().powi(2);
        let p2 = move |x: f64| -2.0 * a * b * (2.0 * a * x).sin();
        let r1 = move |x: f64| -a * (4.0 * a * a + 3.0 * b * b) * (2.0 * a * x).sin();
        let r2 = move |x: f64| b * b * (a * x).sin().powi(2) - 2.0 * a * a * (2.0 * a * x).cos();
        let zero = |_: f64| 0.0;

        type Weight = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;
        let coeffs = self.coefficients.clone();
        let one: Weight = Arc::new(|_| Ok(1.0));
        let co = coeffs.clone();
        let alpha: Weight = Arc::new(move |t| co.alpha.evaluate(t));
        let beta: Weight = Arc::new(move |t| coeffs.beta.evaluate(t));

        let mut terms = Vec::with_capacity(6);
        let mut push = |weight: Weight, p: Arc<dyn Fn(f64) -> f64 + Send + Sync>, r: Arc<dyn Fn(f64) -> f64 + Send + Sync>| {
            let (pc, rc) = (p.clone(), r.clone());
            let w = weight.clone();
            terms.push(SeparableTerm {
                space: Arc::new(move |x| pc(x) * (b * x).cos() + rc(x) * (b * x).sin()),
                time: Arc::new(move |t| Ok(w(t)? * (c * t).cos())),
            });
            terms.push(SeparableTerm {
                space: Arc::new(move |x| r(x) * (b * x).cos() - p(x) * (b * x).sin()),
                time: Arc::new(move |t| Ok(weight(t)? * (c * t).sin())),
            });
        };
        push(one, Arc::new(p0), Arc::new(zero));
        push(alpha, Arc::new(p1), Arc::new(r1));
        push(beta, Arc::new(p2), Arc::new(r2));
        Source::Separable(terms)
    }

    /// The source as a plain pointwise function (slower; used for cross-checks).
    pub fn pointwise_source(&self) -> Source {
        let me = self.clone();
        Source::Function(Arc::new(move |x, t| match me.coefficients.at(t) {
            Ok((alpha, beta)) => me.source_at(x, t, alpha, beta),
            Err(_) => f64::NAN,
        }))
    }

    pub fn config(&self, degree: usize, dt: f64, t_final: f64) -> SolverConfig {
        let me = self.clone();
        SolverConfig::new(degree, dt, t_final, self.coefficients.clone())
            .with_source(self.separable_source())
            .with_initial(move |x| me.initial(x))
    }
}

/// Space-time error of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub eps: f64,
    pub p: f64,
    pub eps_db: Option<f64>,
    pub degree: usize,
    pub dt: f64,
    pub t_final: f64,
    pub alpha: String,
    pub beta: String,
}

impl ErrorReport {
    fn new(eps: f64, p: f64, cfg: &SolverConfig) -> Self {
        Self {
            eps,
            p,
            eps_db: to_decibels(eps).ok(),
            degree: cfg.degree,
            dt: cfg.dt,
            t_final: cfg.t_final,
            alpha: cfg.coefficients.alpha.to_string(),
            beta: cfg.coefficients.beta.to_string(),
        }
    }
}

/// Accumulates `(dt / N) sum_k (sum_j |u(x_j, t_k) - u_N^k(x_j)|^p)^{1/p}` over the
/// `N + 1` Chebyshev–Gauss–Lobatto points, for several exponents at once.
pub struct ErrorAccumulator {
    evaluator: NodalEvaluator,
    exponents: Vec<f64>,
    sums: Vec<f64>,
    dt: f64,
    degree: usize,
}

impl ErrorAccumulator {
    pub fn new(basis: &BasisSpec, dt: f64, exponents: &[f64]) -> Self {
        let points = cgl_points(basis.degree());
        Self {
            evaluator: NodalEvaluator::new(basis, &points),
            exponents: exponents.to_vec(),
            sums: vec![0.0; exponents.len()],
            dt,
            degree: basis.degree(),
        }
    }

    pub fn observe(&mut self, coeffs: &DVector<f64>, t: f64, exact: impl Fn(f64, f64) -> f64) {
        let approx = self.evaluator.eval(coeffs);
        let diffs: Vec<f64> =
            self.evaluator.points().iter().zip(approx.iter()).map(|(&x, &u)| (exact(x, t) - u).abs()).collect();
        for (p, sum) in self.exponents.iter().zip(self.sums.iter_mut()) {
            *sum += lp_norm(&diffs, *p);
        }
    }

    pub fn finish(&self) -> Vec<f64> {
        let scale = self.dt / self.degree as f64;
        self.sums.iter().map(|s| s * scale).collect()
    }
}

fn lp_norm(values: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        values.iter().sum()
    } else if p == 2.0 {
        values.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        values.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Error of a stored trajectory against an exact solution.
pub fn epsilon_error(traj: &Trajectory, exact: impl Fn(f64, f64) -> f64, cfg: &SolverConfig) -> Result<ErrorReport> {
    let basis = BasisSpec::new(cfg.degree)?;
    let mut acc = ErrorAccumulator::new(&basis, traj.dt, &[cfg.p]);
    for state in &traj.states {
        acc.observe(&state.coeffs, state.k as f64 * traj.dt, &exact);
    }
    Ok(ErrorReport::new(acc.finish()[0], cfg.p, cfg))
}

/// Runs the manufactured problem and returns `eps` for each exponent, without
/// storing the trajectory.
pub fn manufactured_errors(problem: &ManufacturedProblem, cfg: SolverConfig, exponents: &[f64]) -> Result<Vec<f64>> {
    let solver = LpgSolver::new(cfg)?;
    let mut acc = ErrorAccumulator::new(&solver.basis(), solver.config().dt, exponents);
    let dt = solver.config().dt;
    solver.run_with(|s: &ModalState| {
        acc.observe(&s.coeffs, s.k as f64 * dt, |x, t| problem.exact(x, t));
        Ok(())
    })?;
    Ok(acc.finish())
}

/// Runs the manufactured problem and reports `eps` at the configuration's `p`.
pub fn manufactured_error(problem: &ManufacturedProblem, degree: usize, dt: f64, t_final: f64, p: f64) -> Result<ErrorReport> {
    let cfg = problem.config(degree, dt, t_final).with_p(p);
    let eps = manufactured_errors(problem, cfg.clone(), &[p])?[0];
    Ok(ErrorReport::new(eps, p, &cfg))
}

/// `20 log10(eps)`.
pub fn to_decibels(eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(LpgError::Config(format!("decibels need eps > 0, got {eps}")));
    }
    Ok(20.0 * eps.log10())
}

/// Least-squares line through `(ln dt, ln eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderFit {
    pub order: f64,
    /// Intercept of `ln eps = order ln dt + intercept`.
    pub intercept: f64,
    /// Fitted `eps` at the smallest `dt` in the sample.
    pub extrapolated: f64,
}

pub fn fit_order(pairs: &[(f64, f64)]) -> Result<OrderFit> {
    if pairs.len() < 2 {
        return Err(LpgError::DegenerateFit("need at least two points"));
    }
    if pairs.iter().any(|&(h, e)| !(h > 0.0 && e > 0.0)) {
        return Err(LpgError::DegenerateFit("all step sizes and errors must be positive"));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return Err(LpgError::DegenerateFit("all step sizes are equal"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let order = sxy / sxx;
    let intercept = my - order * mx;
    let hmin = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    Ok(OrderFit { order, intercept, extrapolated: (intercept + order * hmin.ln()).exp() })
}

/// `dt in {(i + 1) 1e-4 : i = 1..=20}`.
pub fn dt_grid() -> Vec<f64> {
    (1..=20).map(|i| (i + 1) as f64 * 1e-4).collect()
}

/// Largest multiple of `dt` not exceeding `t_final`. Grids such as `dt = 3e-4`
/// with `T = 2` do not divide evenly; those runs stop at the last full step.
pub fn aligned_final_time(t_final: f64, dt: f64) -> f64 {
    (t_final / dt + 1e-9).floor() * dt
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyKind {
    Temporal,
    Spatial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub beta: f64,
    /// `dt` for temporal studies, `N` for spatial ones.
    pub param: f64,
    pub eps_l1l1: f64,
    pub eps_l1l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaFit {
    pub beta: f64,
    pub l1l1: OrderFit,
    pub l1l2: OrderFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub kind: StudyKind,
    pub alpha: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Per-beta order fits; temporal studies only.
    pub fits: Vec<BetaFit>,
}

impl ConvergenceTable {
    pub fn rows_for(&self, beta: f64) -> impl Iterator<Item = &ConvergenceRow> {
        self.rows.iter().filter(move |r| r.beta == beta)
    }

    pub fn fit_for(&self, beta: f64) -> Option<&BetaFit> {
        self.fits.iter().find(|f| f.beta == beta)
    }
}

/// Fixed parameters shared by every cell of a study or sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudyBase {
    pub degree: usize,
    pub alpha: f64,
    pub dt: f64,
    pub t_final: f64,
}

impl Default for StudyBase {
    /// `N = 32`, `alpha = 1`, `dt = 1e-4`, `T = 2`.
    fn default() -> Self {
        Self { degree: 32, alpha: 1.0, dt: 1e-4, t_final: 2.0 }
    }
}

fn constant_errors(degree: usize, dt: f64, t_final: f64, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    let problem = ManufacturedProblem::new(Coefficients::constant(alpha, beta));
    let cfg = problem.config(degree, dt, aligned_final_time(t_final, dt));
    let e = manufactured_errors(&problem, cfg, &[1.0, 2.0])?;
    Ok((e[0], e[1]))
}

/// One run per `(beta, dt)`; orders fitted per `beta` in both norms.
pub fn temporal_convergence_study(betas: &[f64], dts: &[f64], base: StudyBase) -> Result<ConvergenceTable> {
    let cells: Vec<(f64, f64)> = betas.iter().flat_map(|&b| dts.iter().map(move |&h| (b, h))).collect();
    let rows = cells
        .par_iter()
        .map(|&(beta, dt)| {
            let (e1, e2) = constant_errors(base.degree, dt, base.t_final, base.alpha, beta)?;
            Ok(ConvergenceRow { beta, param: dt, eps_l1l1: e1, eps_l1l2: e2 })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut fits = Vec::new();
    for &beta in betas {
        let sel: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.beta == beta).collect();
        let l1: Vec<(f64, f64)> = sel.iter().map(|r| (r.param, r.eps_l1l1)).collect();
        let l2: Vec<(f64, f64)> = sel.iter().map(|r| (r.param, r.eps_l1l2)).collect();
        fits.push(BetaFit { beta, l1l1: fit_order(&l1)?, l1l2: fit_order(&l2)? });
    }
    Ok(ConvergenceTable { kind: StudyKind::Temporal, alpha: base.alpha, rows, fits })
}

/// One run per `(beta, N)` at fixed `dt`.
pub fn spatial_convergence_study(betas: &[f64], degrees: &[usize], base: StudyBase) -> Result<ConvergenceTable> {
    let cells: Vec<(f64, usize)> = betas.iter().flat_map(|&b| degrees.iter().map(move |&n| (b, n))).collect();
    let rows = cells
        .par_iter()
        .map(|&(beta, degree)| {
            let (e1, e2) = constant_errors(degree, base.dt, base.t_final, base.alpha, beta)?;
            Ok(ConvergenceRow { beta, param: degree as f64, eps_l1l1: e1, eps_l1l2: e2 })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { kind: StudyKind::Spatial, alpha: base.alpha, rows, fits: Vec::new() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    BetaDt,
    AlphaBeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepCell {
    pub alpha: f64,
    pub beta: f64,
    pub dt: f64,
    pub eps: f64,
    pub eps_db: f64,
}

/// Errors over a rectangular parameter grid, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub kind: GridKind,
    pub degree: usize,
    pub t_final: f64,
    /// Row axis: `dt` for beta-dt grids, `alpha` for alpha-beta grids.
    pub rows: Vec<f64>,
    /// Column axis: `beta` in both grid kinds.
    pub cols: Vec<f64>,
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn cell(&self, row: usize, col: usize) -> &SweepCell {
        &self.cells[row * self.cols.len() + col]
    }
}

fn sweep_cell(degree: usize, t_final: f64, alpha: f64, beta: f64, dt: f64) -> Result<SweepCell> {
    let problem = ManufacturedProblem::new(Coefficients::constant(alpha, beta));
    let cfg = problem.config(degree, dt, aligned_final_time(t_final, dt));
    let eps = manufactured_errors(&problem, cfg, &[2.0])?[0];
    let eps_db = to_decibels(eps).unwrap_or(f64::NEG_INFINITY);
    Ok(SweepCell { alpha, beta, dt, eps, eps_db })
}

/// `beta in {(i - 1) 0.04}`, `i = 1..=20`.
pub fn beta_grid_dt_sweep() -> Vec<f64> {
    (0..20).map(|i| i as f64 * 4e-2).collect()
}

/// `beta in {(i - 1) 0.0325}`, `i = 1..=20`.
pub fn beta_grid_alpha_sweep() -> Vec<f64> {
    (0..20).map(|i| i as f64 * 3.25e-2).collect()
}

/// Twenty uniform points on `(0.2, 1.15]`, spacing `0.0475`.
pub fn alpha_grid() -> Vec<f64> {
    (1..=20).map(|i| 0.2 + i as f64 * 0.95 / 20.0).collect()
}

/// `(beta x dt)` grid at fixed `alpha`; rows are `dt`, columns `beta`.
pub fn sweep_beta_dt(base: StudyBase) -> Result<SweepGrid> {
    sweep_beta_dt_on(base, &beta_grid_dt_sweep(), &dt_grid())
}

pub fn sweep_beta_dt_on(base: StudyBase, betas: &[f64], dts: &[f64]) -> Result<SweepGrid> {
    let coords: Vec<(f64, f64)> = dts.iter().flat_map(|&h| betas.iter().map(move |&b| (h, b))).collect();
    let cells = coords
        .par_iter()
        .map(|&(dt, beta)| sweep_cell(base.degree, base.t_final, base.alpha, beta, dt))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid {
        kind: GridKind::BetaDt,
        degree: base.degree,
        t_final: base.t_final,
        rows: dts.to_vec(),
        cols: betas.to_vec(),
        cells,
    })
}

/// `(alpha x beta)` grid at fixed `dt`; rows are `alpha`, columns `beta`.
pub fn sweep_alpha_beta(base: StudyBase, dt: f64) -> Result<SweepGrid> {
    sweep_alpha_beta_on(base, dt, &alpha_grid(), &beta_grid_alpha_sweep())
}

pub fn sweep_alpha_beta_on(base: StudyBase, dt: f64, alphas: &[f64], betas: &[f64]) -> Result<SweepGrid> {
    let coords: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| betas.iter().map(move |&b| (a, b))).collect();
    let cells = coords
        .par_iter()
        .map(|&(alpha, beta)| sweep_cell(base.degree, base.t_final, alpha, beta, dt))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid {
        kind: GridKind::AlphaBeta,
        degree: base.degree,
        t_final: base.t_final,
        rows: alphas.to_vec(),
        cols: betas.to_vec(),
        cells,
    })
}

/// Median dB of cells failing the hypothesis minus median dB of cells satisfying
/// it. `None` when either group is empty.
pub fn hypothesis_frontier_gap(grid: &SweepGrid, eps1: f64, eps2: f64) -> Option<f64> {
    let (mut hold, mut fail): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    for c in &grid.cells {
        if hypothesis_h_check(c.alpha, c.beta, eps1, eps2) {
            hold.push(c.eps_db);
        } else {
            fail.push(c.eps_db);
        }
    }
    Some(median(&mut fail)? - median(&mut hold)?)
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProfileCase {
    Case1,
    Case2,
}

impl ProfileCase {
    pub fn coefficients(self) -> Coefficients {
        match self {
            ProfileCase::Case1 => Coefficients::case1(),
            ProfileCase::Case2 => Coefficients::case2(),
        }
    }

    /// Constant `(alpha, beta)` pairs bounding the error from above and below.
    pub fn bounding_pairs(self) -> ((f64, f64), (f64, f64)) {
        match self {
            ProfileCase::Case1 => ((5.0 / 2f64.sqrt(), 2f64.sqrt()), (5.0, 1.0)),
            ProfileCase::Case2 => ((1.0, 0.5), (4.0, 0.25)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub case: ProfileCase,
    pub degree: usize,
    pub dt: f64,
    pub t_final: f64,
    pub eps: f64,
    pub eps_max: f64,
    pub eps_min: f64,
    pub contained: bool,
}

impl CaseReport {
    pub fn require_containment(&self) -> Result<()> {
        if self.contained {
            Ok(())
        } else {
            Err(LpgError::Containment(format!(
                "{:?}, dt = {}: eps = {:.8e} outside [{:.8e}, {:.8e}]",
                self.case, self.dt, self.eps, self.eps_min, self.eps_max
            )))
        }
    }
}

/// Runs a time-varying profile and its two constant bounding runs (`L^1(L^2)`).
pub fn bounded_case_study(case: ProfileCase, dt: f64, degree: usize, t_final: f64) -> Result<CaseReport> {
    let ((amax, bmax), (amin, bmin)) = case.bounding_pairs();
    let runs: Vec<Coefficients> =
        vec![case.coefficients(), Coefficients::constant(amax, bmax), Coefficients::constant(amin, bmin)];
    let eps = runs
        .into_par_iter()
        .map(|coeffs| {
            let problem = ManufacturedProblem::new(coeffs);
            let cfg = problem.config(degree, dt, t_final);
            Ok(manufactured_errors(&problem, cfg, &[2.0])?[0])
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CaseReport {
        case,
        degree,
        dt,
        t_final,
        eps: eps[0],
        eps_max: eps[1],
        eps_min: eps[2],
        contained: eps[2] <= eps[0] && eps[0] <= eps[1],
    })
}

/// Modal magnitudes at one snapshot of a constant-coefficient run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalDiagnostics {
    pub degree: usize,
    pub snapshot: usize,
    /// `|U^{k+1}_n|`
    pub numerical: Vec<f64>,
    /// Modal coefficients of the projected exact solution at `t_{k+1}`.
    pub exact: Vec<f64>,
    /// `|(C F^{k+1/2})_n|`
    pub projected_source: Vec<f64>,
    /// `|F^{k+1/2}_n|`, the source expanded in the trial basis.
    pub modal_source: Vec<f64>,
    pub numerical_top5: f64,
    pub exact_top5: f64,
    pub projected_source_top5: f64,
    pub modal_source_top5: f64,
    /// Energy share of the projected exact solution in modes `n > 22`.
    pub exact_beyond_22: f64,
}

/// Fraction of `sum v_n^2` carried by the last five modes.
pub fn top_modes_energy_fraction(v: &[f64], count: usize) -> f64 {
    let total: f64 = v.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return 0.0;
    }
    let start = v.len().saturating_sub(count);
    v[start..].iter().map(|x| x * x).sum::<f64>() / total
}

/// Fraction of `sum v_n^2` in modes with index strictly above `cutoff`.
pub fn energy_beyond(v: &[f64], cutoff: usize) -> f64 {
    let total: f64 = v.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return 0.0;
    }
    v.iter().skip(cutoff + 1).map(|x| x * x).sum::<f64>() / total
}

pub fn modal_spectrum_diagnostics(degree: usize, snapshot: usize, dt: f64, alpha: f64, beta: f64) -> Result<ModalDiagnostics> {
    let problem = ManufacturedProblem::new(Coefficients::constant(alpha, beta));
    let t_final = (snapshot + 1) as f64 * dt;
    let solver = LpgSolver::new(problem.config(degree, dt, t_final))?;
    let last = solver.run_with(|_| Ok(()))?;
    let t_next = solver.time(snapshot + 1);
    let exact = solver.project(|x| problem.exact(x, t_next))?;
    let cf = solver.projected_source(snapshot)?;
    let f = solver.modal_source(snapshot)?;
    let abs = |v: &DVector<f64>| v.iter().map(|x| x.abs()).collect::<Vec<f64>>();
    let (numerical, exact, projected_source, modal_source) = (abs(&last.coeffs), abs(&exact), abs(&cf), abs(&f));
    Ok(ModalDiagnostics {
        degree,
        snapshot,
        numerical_top5: top_modes_energy_fraction(&numerical, 5),
        exact_top5: top_modes_energy_fraction(&exact, 5),
        projected_source_top5: top_modes_energy_fraction(&projected_source, 5),
        modal_source_top5: top_modes_energy_fraction(&modal_source, 5),
        exact_beyond_22: energy_beyond(&exact, 22),
        numerical,
        exact,
        projected_source,
        modal_source,
    })
}

/// Modal coefficients `|u_n^0|` of the projected initial condition.
pub fn initial_modal_spectrum(degree: usize) -> Result<Vec<f64>> {
    let problem = ManufacturedProblem::new(Coefficients::constant(1.0, 0.0));
    let solver = LpgSolver::new(problem.config(degree, 1.0, 0.0))?;
    Ok(solver.project_initial()?.coeffs.iter().map(|x| x.abs()).collect())
}
