//! Scheme matrices `K`, `M`, `Q`, `L` and the per-step system `A U' = B U + C F`.
//!
//! Entries are indexed `(m, n)` with `m` the test index (`phi_m`) and `n` the
//! trial index (`w_n = (1 - x) phi_n`), both in `0..=N-3`:
//!
//! * `l_mn = (L_{n+1}, L_{m+1})`
//! * `q_mn = ((1 - x) L_{m+1}, L'_{n+1})`
//! * `k_mn = -(w_n'', phi_m)`, the weak form of the second derivative term
//! * `a_mn = (w_n, phi_m)`, the mass matrix `M`
//!
//! Two routes are provided: the closed-form coefficient tables and exact Gauss
//! quadrature of the defining integrals. The quadrature route is what the
//! solver uses; [`verify_closed_forms`] compares the two.

use std::fmt;

use nalgebra::{DMatrix, DVector, LU};
use serde::Serialize;

use crate::error::{LpgError, Result};
use crate::legendre::{c, phi_from_table, trial_from_table, BasisSpec, LegendreTable};
use crate::quadrature::gauss_nodes;

const VERIFY_TOL: f64 = 1e-10;
const PIVOT_RATIO: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MatrixKind {
    K,
    M,
    Q,
    L,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 4] = [MatrixKind::K, MatrixKind::M, MatrixKind::Q, MatrixKind::L];
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MatrixKind::K => "K",
            MatrixKind::M => "M",
            MatrixKind::Q => "Q",
            MatrixKind::L => "L",
        };
        f.write_str(s)
    }
}

/// The four `(N-2) x (N-2)` scheme matrices for one basis degree.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSet {
    pub basis: BasisSpec,
    pub k: DMatrix<f64>,
    pub m: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub l: DMatrix<f64>,
}

impl OperatorSet {
    /// Matrices from exact quadrature of the weak form; the solver's operator set.
    pub fn from_weak_form(basis: BasisSpec) -> Result<Self> {
        let n = basis.degree();
        Ok(Self {
            basis,
            k: oracle_matrix(MatrixKind::K, n)?,
            m: oracle_matrix(MatrixKind::M, n)?,
            q: oracle_matrix(MatrixKind::Q, n)?,
            l: oracle_matrix(MatrixKind::L, n)?,
        })
    }

    /// Matrices from the closed-form coefficient tables.
    pub fn from_closed_forms(basis: BasisSpec) -> Self {
        let n = basis.degree();
        Self { basis, k: assemble_k(n), m: assemble_m(n), q: assemble_q(n), l: assemble_l(n) }
    }

    pub fn get(&self, kind: MatrixKind) -> &DMatrix<f64> {
        match kind {
            MatrixKind::K => &self.k,
            MatrixKind::M => &self.m,
            MatrixKind::Q => &self.q,
            MatrixKind::L => &self.l,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

fn dim_of(n: usize) -> usize {
    assert!(n >= 3, "basis degree N = {n} must be at least 3");
    n - 2
}

/// `l_mn = 2 c_{m+1} delta_mn`.
pub fn assemble_l(n: usize) -> DMatrix<f64> {
    let d = dim_of(n);
    DMatrix::from_fn(d, d, |m, j| if m == j { 2.0 * c(m + 1) } else { 0.0 })
}

/// `q_mm = c_{m+1} - 1`, `q_mn = 2 (-1)^{m+n+1}` above the diagonal, zero below.
pub fn assemble_q(n: usize) -> DMatrix<f64> {
    let d = dim_of(n);
    DMatrix::from_fn(d, d, |m, j| {
        if j == m {
            c(m + 1) - 1.0
        } else if j > m {
            if (m + j + 1) % 2 == 0 {
                2.0
            } else {
                -2.0
            }
        } else {
            0.0
        }
    })
}

/// Tridiagonal table for `k_mn` as published. Its off-diagonal entries are
/// checked against the weak form by [`verify_closed_forms`].
pub fn assemble_k(n: usize) -> DMatrix<f64> {
    let d = dim_of(n);
    DMatrix::from_fn(d, d, |m, j| {
        if j == m {
            2.0 * c(m + 1)
        } else if j == m + 1 {
            2.0 * c(m) - 2.0 * (m + 1) as f64 * c(m) * c(m + 1)
        } else if j + 1 == m {
            -2.0 * (1.0 + (m + 2) as f64 * c(m + 1)) * c(m + 2)
        } else {
            0.0
        }
    })
}

/// Mass matrix table for `n >= m`, completed by symmetry below the diagonal.
pub fn assemble_m(n: usize) -> DMatrix<f64> {
    let d = dim_of(n);
    let upper = |m: usize, j: usize| -> f64 {
        let mf = m as f64;
        match j - m {
            0 => 2.0 * c(m + 1).powi(2) * (c(m) + c(m + 2)),
            1 => -2.0 * c(m + 1) * c(m + 2).powi(2) * (c(m) + (mf + 3.0) * c(m + 3)),
            2 => -2.0 * c(m + 1) * c(m + 2) * c(m + 3),
            3 => 2.0 * (mf + 3.0) * c(m + 1) * c(m + 2) * c(m + 3) * c(m + 4),
            _ => 0.0,
        }
    };
    DMatrix::from_fn(d, d, |m, j| if j >= m { upper(m, j) } else { upper(j, m) })
}

/// Exact Gauss quadrature (order `2N + 8`) of the defining inner product.
pub fn oracle_matrix(kind: MatrixKind, n: usize) -> Result<DMatrix<f64>> {
    let d = dim_of(n);
    let rule = gauss_nodes(2 * n + 8)?;
    let mut out = DMatrix::zeros(d, d);
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        let t = LegendreTable::new(n, x);
        let phi: Vec<f64> = (0..d).map(|i| phi_from_table(&t, i)).collect();
        let trial: Vec<[f64; 4]> = (0..d).map(|i| trial_from_table(&t, i, x)).collect();
        for m in 0..d {
            for j in 0..d {
                let integrand = match kind {
                    MatrixKind::L => t.value[j + 1] * t.value[m + 1],
                    MatrixKind::Q => (1.0 - x) * t.value[m + 1] * t.d1[j + 1],
                    MatrixKind::K => -trial[j][2] * phi[m],
                    MatrixKind::M => trial[j][0] * phi[m],
                };
                out[(m, j)] += w * integrand;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub matrix: MatrixKind,
    pub m: usize,
    pub n: usize,
    pub closed_form: f64,
    pub oracle: f64,
    pub abs_diff: f64,
}

/// Entries where a closed-form table disagrees with quadrature of the weak form.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub degree: usize,
    pub tolerance: f64,
    pub entries: Vec<Discrepancy>,
    /// Largest absolute deviation per matrix, in `K, M, Q, L` order.
    pub max_deviation: Vec<(MatrixKind, f64)>,
}

impl DiscrepancyReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn for_matrix(&self, kind: MatrixKind) -> impl Iterator<Item = &Discrepancy> {
        self.entries.iter().filter(move |d| d.matrix == kind)
    }

    pub fn max_deviation_of(&self, kind: MatrixKind) -> f64 {
        self.max_deviation.iter().find(|(k, _)| *k == kind).map_or(0.0, |(_, v)| *v)
    }
}

/// Compares every closed-form matrix with its quadrature oracle.
pub fn verify_closed_forms(n: usize) -> Result<DiscrepancyReport> {
    let basis = BasisSpec::new(n)?;
    let closed = OperatorSet::from_closed_forms(basis);
    let oracle = OperatorSet::from_weak_form(basis)?;
    let mut report = DiscrepancyReport { degree: n, tolerance: VERIFY_TOL, ..Default::default() };
    for kind in MatrixKind::ALL {
        let (a, b) = (closed.get(kind), oracle.get(kind));
        let mut worst = 0.0f64;
        for m in 0..a.nrows() {
            for j in 0..a.ncols() {
                let diff = (a[(m, j)] - b[(m, j)]).abs();
                worst = worst.max(diff);
                if diff > VERIFY_TOL {
                    report.entries.push(Discrepancy {
                        matrix: kind,
                        m,
                        n: j,
                        closed_form: a[(m, j)],
                        oracle: b[(m, j)],
                        abs_diff: diff,
                    });
                }
            }
        }
        report.max_deviation.push((kind, worst));
    }
    Ok(report)
}

/// `A`, `B`, `C` for one time level, with `A` already factorized.
#[derive(Debug, Clone)]
pub struct StepMatrices {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    /// `dt a L - (dt/2) a Q + (dt/2) b K`, so that `A = M + op` and `B = M - op`.
    pub operator: DMatrix<f64>,
    pub dt: f64,
    pub alpha: f64,
    pub beta: f64,
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl StepMatrices {
    /// Solves `A x = rhs` in place.
    pub fn solve_in_place(&self, rhs: &mut DVector<f64>) {
        // A was checked non-singular at construction.
        let _ = self.lu.solve_mut(rhs);
    }
}

/// `A = M + dt a L - (dt/2) a Q + (dt/2) b K`, `B = M - ...`, `C = dt M`.
pub fn build_step_matrices(ops: &OperatorSet, dt: f64, alpha: f64, beta: f64) -> Result<StepMatrices> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(LpgError::Config(format!("time step dt = {dt} must be positive")));
    }
    let h = 0.5 * dt;
    let operator = &ops.l * (dt * alpha) - &ops.q * (h * alpha) + &ops.k * (h * beta);
    let a = &ops.m + &operator;
    let b = &ops.m - &operator;
    let c = &ops.m * dt;
    let lu = factorize(&a).ok_or(LpgError::SingularStep { n: ops.basis.degree(), dt, alpha, beta })?;
    Ok(StepMatrices { a, b, c, operator, dt, alpha, beta, lu })
}

/// Partial-pivoting LU; `None` when a pivot falls below `1e-13 max|A|`.
pub fn factorize(a: &DMatrix<f64>) -> Option<LU<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    let scale = a.amax();
    if !(scale > 0.0 && scale.is_finite()) {
        return None;
    }
    let lu = a.clone().lu();
    let min_pivot = lu.u().diagonal().amin();
    (min_pivot >= PIVOT_RATIO * scale).then_some(lu)
}

/// `row,col,value` lines, one per entry, with a header.
pub fn matrix_to_csv(a: &DMatrix<f64>) -> String {
    let mut out = String::from("row,col,value\n");
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            out.push_str(&format!("{i},{j},{:.17e}\n", a[(i, j)]));
        }
    }
    out
}
