//! Eigenvalues of real nonsymmetric matrices: Householder reduction to upper
//! Hessenberg form followed by Francis double-shift QR iteration.

#![allow(clippy::needless_range_loop)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{LpgError, Result};

/// Reduces `a` to upper Hessenberg form by Householder similarity transforms.
pub fn hessenberg(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square matrix required");
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| h[(i, k)] * h[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if h[(k + 1, k)] > 0.0 { -norm } else { norm };
        let mut v = DVector::zeros(n);
        for i in k + 1..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm2 = v.norm_squared();
        if vnorm2 == 0.0 {
            continue;
        }
        // H <- (I - 2vv^T/v^Tv) H (I - 2vv^T/v^Tv)
        for j in 0..n {
            let s: f64 = (k + 1..n).map(|i| v[i] * h[(i, j)]).sum::<f64>() * 2.0 / vnorm2;
            for i in k + 1..n {
                h[(i, j)] -= s * v[i];
            }
        }
        for i in 0..n {
            let s: f64 = (k + 1..n).map(|j| h[(i, j)] * v[j]).sum::<f64>() * 2.0 / vnorm2;
            for j in k + 1..n {
                h[(i, j)] -= s * v[j];
            }
        }
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
    h
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// All eigenvalues of `a`. Fails after `30 n` QR sweeps without full deflation.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let hess = hessenberg(a);
    // 1-based working copy keeps the index arithmetic of the classic algorithm readable.
    let mut h = vec![vec![0.0f64; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            h[i + 1][j + 1] = hess[(i, j)];
        }
    }
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += h[i][j].abs();
        }
    }
    let max_iter = 30 * n;
    let mut total = 0usize;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut nn = n;
    let mut t = 0.0;
    let mut its = 0usize;
    while nn >= 1 {
        // Look for a single small subdiagonal element.
        let mut l = nn;
        while l >= 2 {
            let mut s = h[l - 1][l - 1].abs() + h[l][l].abs();
            if s == 0.0 {
                s = anorm;
            }
            if h[l][l - 1].abs() + s == s {
                h[l][l - 1] = 0.0;
                break;
            }
            l -= 1;
        }
        let mut x = h[nn][nn];
        if l == nn {
            wr[nn] = x + t;
            wi[nn] = 0.0;
            nn -= 1;
            its = 0;
            continue;
        }
        let mut y = h[nn - 1][nn - 1];
        let mut w = h[nn][nn - 1] * h[nn - 1][nn];
        if l == nn - 1 {
            let p = 0.5 * (y - x);
            let q = p * p + w;
            let mut z = q.abs().sqrt();
            x += t;
            if q >= 0.0 {
                z = p + sign(z, p);
                wr[nn - 1] = x + z;
                wr[nn] = if z != 0.0 { x - w / z } else { x + z };
                wi[nn - 1] = 0.0;
                wi[nn] = 0.0;
            } else {
                wr[nn - 1] = x + p;
                wr[nn] = x + p;
                wi[nn - 1] = -z;
                wi[nn] = z;
            }
            nn -= 2;
            its = 0;
            continue;
        }
        if total >= max_iter {
            return Err(LpgError::EigenConvergence { iterations: total });
        }
        if its == 10 || its == 20 {
            // Exceptional shift.
            t += x;
            for i in 1..=nn {
                h[i][i] -= x;
            }
            let s = h[nn][nn - 1].abs() + h[nn - 1][nn - 2].abs();
            x = 0.75 * s;
            y = x;
            w = -0.4375 * s * s;
        }
        its += 1;
        total += 1;
        // Find two consecutive small subdiagonal elements.
        let (mut p, mut q, mut r, mut z);
        let mut m = nn - 2;
        loop {
            z = h[m][m];
            r = x - z;
            let s0 = y - z;
            p = (r * s0 - w) / h[m + 1][m] + h[m][m + 1];
            q = h[m + 1][m + 1] - z - r - s0;
            r = h[m + 2][m + 1];
            let s = p.abs() + q.abs() + r.abs();
            p /= s;
            q /= s;
            r /= s;
            if m == l {
                break;
            }
            let u = h[m][m - 1].abs() * (q.abs() + r.abs());
            let v = p.abs() * (h[m - 1][m - 1].abs() + z.abs() + h[m + 1][m + 1].abs());
            if u + v == v {
                break;
            }
            m -= 1;
        }
        for i in m + 2..=nn {
            h[i][i - 2] = 0.0;
            if i != m + 2 {
                h[i][i - 3] = 0.0;
            }
        }
        // Double QR step on rows l..nn and columns m..nn.
        let mut k = m;
        while k < nn {
            if k != m {
                p = h[k][k - 1];
                q = h[k + 1][k - 1];
                r = if k != nn - 1 { h[k + 2][k - 1] } else { 0.0 };
                x = p.abs() + q.abs() + r.abs();
                if x != 0.0 {
                    p /= x;
                    q /= x;
                    r /= x;
                }
            }
            let s = sign((p * p + q * q + r * r).sqrt(), p);
            if s != 0.0 {
                if k == m {
                    if l != m {
                        h[k][k - 1] = -h[k][k - 1];
                    }
                } else {
                    h[k][k - 1] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;
                for j in k..=nn {
                    let mut pp = h[k][j] + q * h[k + 1][j];
                    if k != nn - 1 {
                        pp += r * h[k + 2][j];
                        h[k + 2][j] -= pp * z;
                    }
                    h[k + 1][j] -= pp * y;
                    h[k][j] -= pp * x;
                }
                let mmin = nn.min(k + 3);
                for i in l..=mmin {
                    let mut pp = x * h[i][k] + y * h[i][k + 1];
                    if k != nn - 1 {
                        pp += z * h[i][k + 2];
                        h[i][k + 2] -= pp * r;
                    }
                    h[i][k + 1] -= pp * q;
                    h[i][k] -= pp;
                }
            }
            k += 1;
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

/// Backward error of an eigenvalue estimate: `sigma_min(A - lambda I)`, the
/// smallest `||A v - lambda v||` over unit vectors `v`.
pub fn eigen_residual(a: &DMatrix<f64>, lambda: Complex64) -> f64 {
    let n = a.nrows();
    let shifted = a.map(|v| Complex64::new(v, 0.0)) - DMatrix::from_diagonal_element(n, n, lambda);
    shifted.singular_values().min()
}
