//! Eigenvalues of Hermitian matrices via Householder tridiagonalization and
//! implicit QL iteration on the resulting real symmetric tridiagonal.

#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Eigenvalues of a Hermitian matrix in ascending order. Both triangles must
/// be stored.
pub fn hermitian_eigenvalues(a: &DenseMatrix<C64>) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let xnorm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        for i in k + 1..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in &mut v[k + 1..n] {
            *vi /= vnorm;
        }
        // H' = (I - 2vvᴴ) H (I - 2vvᴴ) on the trailing block, as a rank-2 update:
        // p = 2 H v, w = p - (vᴴp) v, H' = H - v wᴴ - w vᴴ.
        p[k + 1..n].fill(ZERO);
        for c in k + 1..n {
            let vc = v[c] * 2.0;
            let col = h.col(c);
            for i in k + 1..n {
                p[i] += col[i] * vc;
            }
        }
        let vp = (k + 1..n).fold(ZERO, |s, i| s + v[i].conj() * p[i]);
        for i in k + 1..n {
            p[i] -= v[i] * vp;
        }
        for c in k + 1..n {
            let vc = v[c].conj();
            let pc = p[c].conj();
            let col = h.col_mut(c);
            for i in k + 1..n {
                col[i] -= v[i] * pc + p[i] * vc;
            }
        }
        h[(k + 1, k)] = alpha;
        h[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            h[(i, k)] = ZERO;
            h[(k, i)] = ZERO;
        }
    }
    for i in 0..n {
        diag[i] = h[(i, i)].re;
        if i + 1 < n {
            // a diagonal unitary scaling makes the off-diagonal real and nonnegative
            off[i] = h[(i + 1, i)].norm();
        }
    }
    symmetric_tridiagonal_eigenvalues(&mut diag, &mut off)?;
    Ok(diag)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e[0..n-1]` (`e[n-1]` ignored). Results overwrite `d`,
/// ascending.
pub fn symmetric_tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    assert!(e.len() >= n);
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
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
            if iter > 60 {
                return Err(Error::NoConvergence { iterations: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tridiagonal_laplacian_eigenvalues() {
        // tridiag(-1, 2, -1) of size n has eigenvalues 2 - 2cos(kπ/(n+1))
        let n = 12;
        let mut d = vec![2.0; n];
        let mut e = vec![-1.0; n];
        symmetric_tridiagonal_eigenvalues(&mut d, &mut e).unwrap();
        for (k, &lam) in d.iter().enumerate() {
            let exact = 2.0 - 2.0 * (core::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert_abs_diff_eq!(lam, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn hermitian_2x2() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let a = DenseMatrix::from_rows(&[
            &[C64::new(2.0, 0.0), C64::new(0.0, 1.0)],
            &[C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        ]);
        let ev = hermitian_eigenvalues(&a).unwrap();
        assert_abs_diff_eq!(ev[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn hermitian_matches_trace_and_norm() {
        let n = 9;
        let b = DenseMatrix::from_fn(n, n, |i, j| C64::new((i as f64 - j as f64).sin(), ((i * j) as f64).cos()));
        let a = b.adjoint().matmul(&b);
        let ev = hermitian_eigenvalues(&a).unwrap();
        let tr: f64 = (0..n).map(|i| a[(i, i)].re).sum();
        assert_abs_diff_eq!(ev.iter().sum::<f64>(), tr, epsilon = 1e-10);
        let fro2: f64 = ev.iter().map(|l| l * l).sum();
        assert_abs_diff_eq!(fro2.sqrt(), a.frobenius_norm(), epsilon = 1e-9);
        assert!(ev[0] > -1e-10);
    }
}
