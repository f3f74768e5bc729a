//! Legendre polynomials and the Petrov test basis.
//!
//! Test functions are `phi_n = c_{n+1} (L_n - L_{n+2})` with `c_n = 1/(2n+1)`,
//! `n = 0..=N-3`. Trial functions are `w_n = (1 - x) phi_n`, which satisfy
//! `w(-1) = w(1) = w'(1) = 0`.

use crate::error::{LpgError, Result};

const DOMAIN_SLACK: f64 = 1e-14;

fn check_domain(x: f64) -> Result<()> {
    if x.is_nan() || x.abs() > 1.0 + DOMAIN_SLACK {
        return Err(LpgError::Domain { x });
    }
    Ok(())
}

/// `c_n = 1 / (2n + 1)`.
#[inline]
pub fn c(n: usize) -> f64 {
    1.0 / (2 * n + 1) as f64
}

/// `L_n(x)` by the upward Bonnet recurrence.
pub fn legendre_eval(n: usize, x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(bonnet(n, x).0)
}

/// Returns `(L_n(x), L_{n-1}(x))`; the second entry is 0 for `n = 0`.
fn bonnet(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `L'_n(x)` from the odd-parity summation identity
/// `L'_n = sum_{k < n, k + n odd} (2k + 1) L_k`.
pub fn legendre_deriv_eval(n: usize, x: f64) -> Result<f64> {
    check_domain(x)?;
    if n == 0 {
        return Ok(0.0);
    }
    let table = LegendreTable::new(n, x);
    Ok((0..n)
        .filter(|k| (k + n) % 2 == 1)
        .map(|k| (2 * k + 1) as f64 * table.value[k])
        .sum())
}

/// `L''_n(x)`, the summation identity applied to `L'_k`.
pub fn legendre_second_deriv_eval(n: usize, x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(LegendreTable::new(n, x).d2[n])
}

/// Values and first two derivatives of `L_0..=L_nmax` at one point.
///
/// Derivatives use `L'_k = L'_{k-2} + (2k - 1) L_{k-1}`, the incremental form
/// of the summation identity, and likewise for `L''_k`.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    pub value: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl LegendreTable {
    pub fn new(nmax: usize, x: f64) -> Self {
        let mut value = vec![0.0; nmax + 1];
        let mut d1 = vec![0.0; nmax + 1];
        let mut d2 = vec![0.0; nmax + 1];
        value[0] = 1.0;
        if nmax >= 1 {
            value[1] = x;
            d1[1] = 1.0;
        }
        for k in 1..nmax {
            let kf = k as f64;
            value[k + 1] = ((2.0 * kf + 1.0) * x * value[k] - kf * value[k - 1]) / (kf + 1.0);
        }
        for k in 2..=nmax {
            let s = (2 * k - 1) as f64;
            d1[k] = d1[k - 2] + s * value[k - 1];
            d2[k] = d2[k - 2] + s * d1[k - 1];
        }
        Self { value, d1, d2 }
    }
}

/// Polynomial degree cap `N` of the trial space; there are `N - 2` modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BasisSpec {
    degree: usize,
}

impl BasisSpec {
    pub fn new(degree: usize) -> Result<Self> {
        if degree < 3 {
            return Err(LpgError::Config(format!("basis degree N = {degree} must be at least 3")));
        }
        Ok(Self { degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.degree - 2
    }

    fn check_mode(&self, n: usize) -> Result<()> {
        if n >= self.dim() {
            return Err(LpgError::Index { index: n, max: self.dim() - 1 });
        }
        Ok(())
    }

    /// `phi_n(x)`.
    pub fn phi_eval(&self, n: usize, x: f64) -> Result<f64> {
        self.check_mode(n)?;
        check_domain(x)?;
        let t = LegendreTable::new(n + 2, x);
        Ok(phi_from_table(&t, n))
    }

    /// `phi_n'(x) = -L_{n+1}(x)`.
    pub fn phi_deriv_eval(&self, n: usize, x: f64) -> Result<f64> {
        self.check_mode(n)?;
        Ok(-legendre_eval(n + 1, x)?)
    }

    /// Trial function `w_n = (1 - x) phi_n` and its first three derivatives.
    pub fn trial_derivs(&self, n: usize, x: f64) -> Result<[f64; 4]> {
        self.check_mode(n)?;
        check_domain(x)?;
        let t = LegendreTable::new(n + 2, x);
        Ok(trial_from_table(&t, n, x))
    }

    /// Values `phi_n(x)` for every mode at one point.
    pub fn phi_all(&self, x: f64) -> Vec<f64> {
        let t = LegendreTable::new(self.degree, x);
        (0..self.dim()).map(|n| phi_from_table(&t, n)).collect()
    }

    /// Values `w_n(x) = (1 - x) phi_n(x)` for every mode at one point.
    pub fn trial_all(&self, x: f64) -> Vec<f64> {
        self.phi_all(x).into_iter().map(|p| (1.0 - x) * p).collect()
    }
}

pub(crate) fn phi_from_table(t: &LegendreTable, n: usize) -> f64 {
    c(n + 1) * (t.value[n] - t.value[n + 2])
}

/// `[w, w', w'', w''']` with `phi' = -L_{n+1}`, `phi'' = -L'_{n+1}`,
/// `phi''' = -L''_{n+1}`.
pub(crate) fn trial_from_table(t: &LegendreTable, n: usize, x: f64) -> [f64; 4] {
    let phi = phi_from_table(t, n);
    let p1 = -t.value[n + 1];
    let p2 = -t.d1[n + 1];
    let p3 = -t.d2[n + 1];
    let s = 1.0 - x;
    [s * phi, s * p1 - phi, s * p2 - 2.0 * p1, s * p3 - 3.0 * p2]
}
