//! Fully discrete scheme: `A U^{k+1} = B U^k + dt b^{k+1/2}`.
//!
//! The state is the modal vector `U = (u_0, ..., u_{N-3})` of
//! `u_N(x) = (1 - x) sum_n u_n phi_n(x)`. Coefficients are sampled at the left
//! end point `t_k`; the source enters as the mean `b^{k+1/2} = (b(t_k) + b(t_{k+1})) / 2`
//! of the Galerkin loads `b_m(t) = (f(., t), phi_m)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, LU};

use crate::assembly::{build_step_matrices, factorize, OperatorSet, StepMatrices};
use crate::error::{LpgError, Result};
use crate::legendre::{phi_from_table, trial_from_table, BasisSpec, LegendreTable};
use crate::profile::Coefficients;
use crate::quadrature::{gauss_nodes, QuadratureRule};

const STEP_COUNT_TOL: f64 = 1e-9;
const REFACTOR_TOL: f64 = 1e-15;

pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type TimeFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// One `time(t) * space(x)` product of a separable source.
#[derive(Clone)]
pub struct SeparableTerm {
    pub space: SpaceFn,
    pub time: TimeFn,
}

/// Right-hand side `f(x, t)`.
///
/// Separable sources `sum_i g_i(t) h_i(x)` have their spatial loads
/// `(h_i, phi_m)` computed once, so each step costs `O(N)` instead of a
/// quadrature sweep.
#[derive(Clone)]
pub enum Source {
    Zero,
    Function(SpaceTimeFn),
    Separable(Vec<SeparableTerm>),
}

impl Source {
    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        Ok(match self {
            Source::Zero => 0.0,
            Source::Function(f) => f(x, t),
            Source::Separable(terms) => {
                let mut acc = 0.0;
                for term in terms {
                    acc += (term.time)(t)? * (term.space)(x);
                }
                acc
            }
        })
    }
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Zero => f.write_str("Source::Zero"),
            Source::Function(_) => f.write_str("Source::Function(..)"),
            Source::Separable(t) => write!(f, "Source::Separable({} terms)", t.len()),
        }
    }
}

/// Everything that defines one run.
#[derive(Clone)]
pub struct SolverConfig {
    pub degree: usize,
    pub dt: f64,
    pub t_final: f64,
    pub coefficients: Coefficients,
    pub source: Source,
    pub initial: SpaceFn,
    /// Spatial exponent of the error norm.
    pub p: f64,
    pub quadrature_order: usize,
}

impl fmt::Debug for SolverConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolverConfig")
            .field("degree", &self.degree)
            .field("dt", &self.dt)
            .field("t_final", &self.t_final)
            .field("coefficients", &self.coefficients)
            .field("source", &self.source)
            .field("p", &self.p)
            .field("quadrature_order", &self.quadrature_order)
            .finish()
    }
}

/// `max(2N, 64)`.
pub fn default_quadrature_order(degree: usize) -> usize {
    (2 * degree).max(64)
}

impl SolverConfig {
    /// Zero source, zero initial data, `p = 2`, default quadrature order.
    pub fn new(degree: usize, dt: f64, t_final: f64, coefficients: Coefficients) -> Self {
        Self {
            degree,
            dt,
            t_final,
            coefficients,
            source: Source::Zero,
            initial: Arc::new(|_| 0.0),
            p: 2.0,
            quadrature_order: default_quadrature_order(degree),
        }
    }

    pub fn with_source(mut self, source: Source) -> Self {
        self.source = source;
        self
    }

    pub fn with_initial(mut self, initial: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.initial = Arc::new(initial);
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_quadrature_order(mut self, q: usize) -> Self {
        self.quadrature_order = q;
        self
    }

    /// Validates the configuration and returns the number of steps `n_T`.
    pub fn steps(&self) -> Result<usize> {
        BasisSpec::new(self.degree)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(LpgError::Config(format!("dt = {} must be positive and finite", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(LpgError::Config(format!("T = {} must be non-negative", self.t_final)));
        }
        let n = (self.t_final / self.dt).round();
        if (n * self.dt - self.t_final).abs() > STEP_COUNT_TOL {
            return Err(LpgError::Config(format!(
                "T = {} is not an integral multiple of dt = {}",
                self.t_final, self.dt
            )));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(LpgError::Config(format!("error exponent p = {} must be >= 1", self.p)));
        }
        if self.quadrature_order == 0 {
            return Err(LpgError::Config("quadrature order must be positive".into()));
        }
        Ok(n as usize)
    }
}

/// Modal coefficients at time level `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalState {
    pub coeffs: DVector<f64>,
    pub k: usize,
}

impl ModalState {
    pub fn zeros(dim: usize) -> Self {
        Self { coeffs: DVector::zeros(dim), k: 0 }
    }

    /// `u_N(x_j) = (1 - x_j) sum_n u_n phi_n(x_j)`.
    pub fn nodal_values(&self, basis: &BasisSpec, points: &[f64]) -> Vec<f64> {
        points
            .iter()
            .map(|&x| basis.trial_all(x).iter().zip(self.coeffs.iter()).map(|(w, u)| w * u).sum())
            .collect()
    }
}

/// States `k = 0..=n_T` of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<ModalState>,
}

impl Trajectory {
    pub fn last(&self) -> &ModalState {
        self.states.last().expect("trajectory always holds the initial state")
    }
}

/// Precomputed trial-basis values at a fixed set of points.
#[derive(Debug, Clone)]
pub struct NodalEvaluator {
    points: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl NodalEvaluator {
    pub fn new(basis: &BasisSpec, points: &[f64]) -> Self {
        let dim = basis.dim();
        let mut matrix = DMatrix::zeros(points.len(), dim);
        for (j, &x) in points.iter().enumerate() {
            for (n, w) in basis.trial_all(x).into_iter().enumerate() {
                matrix[(j, n)] = w;
            }
        }
        Self { points: points.to_vec(), matrix }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn eval(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        &self.matrix * coeffs
    }
}

/// Solver for one configuration. Holds the operator set, the quadrature rule
/// and basis tables; cheap to share between threads.
pub struct LpgSolver {
    cfg: SolverConfig,
    steps: usize,
    ops: Arc<OperatorSet>,
    rule: QuadratureRule,
    /// `w_i phi_m(x_i)`, dim x q.
    weighted_phi: DMatrix<f64>,
    /// `phi_m(x_i)`, q x dim.
    phi_nodes: DMatrix<f64>,
    /// `w_n'(x_i)`, q x dim.
    dtrial_nodes: DMatrix<f64>,
    mass_lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    separable_loads: Vec<DVector<f64>>,
}

impl LpgSolver {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        let basis = BasisSpec::new(cfg.degree)?;
        let ops = Arc::new(OperatorSet::from_weak_form(basis)?);
        Self::with_operators(cfg, ops)
    }

    /// Reuses an already assembled operator set of matching degree.
    pub fn with_operators(cfg: SolverConfig, ops: Arc<OperatorSet>) -> Result<Self> {
        let steps = cfg.steps()?;
        if ops.basis.degree() != cfg.degree {
            return Err(LpgError::Config(format!(
                "operator set has degree {} but the configuration asks for {}",
                ops.basis.degree(),
                cfg.degree
            )));
        }
        let dim = ops.dim();
        let rule = gauss_nodes(cfg.quadrature_order)?;
        let q = rule.order();
        let mut weighted_phi = DMatrix::zeros(dim, q);
        let mut phi_nodes = DMatrix::zeros(q, dim);
        let mut dtrial_nodes = DMatrix::zeros(q, dim);
        for (i, (&x, &w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
            let t = LegendreTable::new(cfg.degree, x);
            for n in 0..dim {
                let phi = phi_from_table(&t, n);
                weighted_phi[(n, i)] = w * phi;
                phi_nodes[(i, n)] = phi;
                dtrial_nodes[(i, n)] = trial_from_table(&t, n, x)[1];
            }
        }
        let mass_lu = factorize(&ops.m).ok_or(LpgError::Singular("mass matrix"))?;
        let mut solver = Self {
            cfg,
            steps,
            ops,
            rule,
            weighted_phi,
            phi_nodes,
            dtrial_nodes,
            mass_lu,
            separable_loads: Vec::new(),
        };
        if let Source::Separable(terms) = &solver.cfg.source {
            let loads = terms
                .iter()
                .map(|term| solver.galerkin_load(|x| (term.space)(x)))
                .collect::<Result<Vec<_>>>()?;
            solver.separable_loads = loads;
        }
        Ok(solver)
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn operators(&self) -> &Arc<OperatorSet> {
        &self.ops
    }

    pub fn basis(&self) -> BasisSpec {
        self.ops.basis
    }

    pub fn quadrature(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Number of steps `n_T`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.cfg.dt
    }

    /// `(g, phi_m)` for every test function.
    pub fn galerkin_load(&self, g: impl Fn(f64) -> f64) -> Result<DVector<f64>> {
        let mut values = DVector::zeros(self.rule.order());
        for (i, &x) in self.rule.nodes().iter().enumerate() {
            let v = g(x);
            if !v.is_finite() {
                return Err(LpgError::NonFinite { x, value: v });
            }
            values[i] = v;
        }
        Ok(&self.weighted_phi * values)
    }

    /// Modal coefficients of the Petrov–Galerkin projection: `M U = ((g, phi_m))_m`.
    pub fn project(&self, g: impl Fn(f64) -> f64) -> Result<DVector<f64>> {
        let b = self.galerkin_load(g)?;
        self.mass_solve(b)
    }

    fn mass_solve(&self, mut b: DVector<f64>) -> Result<DVector<f64>> {
        if !self.mass_lu.solve_mut(&mut b) {
            return Err(LpgError::Singular("mass matrix"));
        }
        Ok(b)
    }

    pub fn project_initial(&self) -> Result<ModalState> {
        let u0 = self.cfg.initial.clone();
        Ok(ModalState { coeffs: self.project(|x| u0(x))?, k: 0 })
    }

    /// `b_m(t) = (f(., t), phi_m)`.
    pub fn load_at(&self, t: f64) -> Result<DVector<f64>> {
        match &self.cfg.source {
            Source::Zero => Ok(DVector::zeros(self.ops.dim())),
            Source::Function(f) => self.galerkin_load(|x| f(x, t)),
            Source::Separable(terms) => {
                let mut b = DVector::zeros(self.ops.dim());
                for (term, load) in terms.iter().zip(&self.separable_loads) {
                    b.axpy((term.time)(t)?, load, 1.0);
                }
                Ok(b)
            }
        }
    }

    /// `b^{k+1/2} = (b(t_k) + b(t_{k+1})) / 2`.
    pub fn source_load_vector(&self, k: usize) -> Result<DVector<f64>> {
        let lo = self.load_at(self.time(k))?;
        let hi = self.load_at(self.time(k + 1))?;
        Ok((lo + hi) * 0.5)
    }

    /// Modal source `F^{k+1/2}` with `M F = b^{k+1/2}`.
    pub fn modal_source(&self, k: usize) -> Result<DVector<f64>> {
        self.mass_solve(self.source_load_vector(k)?)
    }

    /// Projected source `C F^{k+1/2} = dt M F^{k+1/2}`.
    pub fn projected_source(&self, k: usize) -> Result<DVector<f64>> {
        let f = self.modal_source(k)?;
        Ok(&self.ops.m * f * self.cfg.dt)
    }

    /// `A`, `B`, `C` with the coefficients sampled at `t_k`.
    pub fn step_matrices(&self, k: usize) -> Result<StepMatrices> {
        let (alpha, beta) = self.cfg.coefficients.at(self.time(k))?;
        build_step_matrices(&self.ops, self.cfg.dt, alpha, beta)
    }

    /// Advances one state by a single step.
    pub fn step(&self, state: &ModalState) -> Result<ModalState> {
        if state.k >= self.steps {
            return Err(LpgError::Config(format!(
                "state index {} is already at the final step {}",
                state.k, self.steps
            )));
        }
        let mats = self.step_matrices(state.k)?;
        let load = self.source_load_vector(state.k)?;
        self.advance(&mats, state, &load)
    }

    fn advance(&self, mats: &StepMatrices, state: &ModalState, load: &DVector<f64>) -> Result<ModalState> {
        // A U' = B U + dt b  <=>  A (U' - U) = -2 op U + dt b
        let mut rhs = &mats.operator * &state.coeffs;
        rhs *= -2.0;
        rhs.axpy(self.cfg.dt, load, 1.0);
        mats.solve_in_place(&mut rhs);
        rhs += &state.coeffs;
        let k = state.k + 1;
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(LpgError::NonFiniteSolution { k });
        }
        Ok(ModalState { coeffs: rhs, k })
    }

    /// Runs all steps, handing each state (including the initial projection)
    /// to `observer`. `A` is refactorized only when a coefficient changes.
    pub fn run_with(&self, mut observer: impl FnMut(&ModalState) -> Result<()>) -> Result<ModalState> {
        let mut state = self.project_initial()?;
        observer(&state)?;
        let mut cached: Option<StepMatrices> = None;
        let mut load_lo = self.load_at(0.0)?;
        for k in 0..self.steps {
            let (alpha, beta) = self.cfg.coefficients.at(self.time(k))?;
            let stale = cached.as_ref().is_none_or(|m| {
                (m.alpha - alpha).abs() > REFACTOR_TOL || (m.beta - beta).abs() > REFACTOR_TOL
            });
            if stale {
                cached = Some(build_step_matrices(&self.ops, self.cfg.dt, alpha, beta)?);
            }
            let load_hi = self.load_at(self.time(k + 1))?;
            let mut load = load_lo.clone();
            load += &load_hi;
            load *= 0.5;
            state = self.advance(cached.as_ref().unwrap(), &state, &load)?;
            observer(&state)?;
            load_lo = load_hi;
        }
        Ok(state)
    }

    pub fn run(&self) -> Result<Trajectory> {
        let mut states = Vec::with_capacity(self.steps + 1);
        self.run_with(|s| {
            states.push(s.clone());
            Ok(())
        })?;
        Ok(Trajectory { dt: self.cfg.dt, states })
    }

    pub fn nodal_values(&self, state: &ModalState, points: &[f64]) -> Vec<f64> {
        state.nodal_values(&self.ops.basis, points)
    }

    /// `sum_i w_i (1 - x_i)^{a} p(x_i)^2` style quadratures need these tables.
    pub(crate) fn phi_nodes(&self) -> &DMatrix<f64> {
        &self.phi_nodes
    }

    pub(crate) fn dtrial_nodes(&self) -> &DMatrix<f64> {
        &self.dtrial_nodes
    }
}
