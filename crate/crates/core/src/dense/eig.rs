//! Eigenvalues of general complex matrices: Householder reduction to upper
//! Hessenberg form followed by single-shift implicit QR with Wilkinson shifts.

#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Overwrites `a` with an upper Hessenberg matrix unitarily similar to it.
pub fn reduce_to_hessenberg(a: &mut DenseMatrix<C64>) {
    assert!(a.is_square());
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    for k in 0..n - 2 {
        let xnorm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        // v = x - alpha e1, normalized
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in &mut v[k + 1..n] {
            *vi /= vnorm;
        }
        // left: A[k+1.., j] -= 2 v (vᴴ A[k+1.., j])
        for j in k..n {
            let col = a.col_mut(j);
            let mut s = ZERO;
            for i in k + 1..n {
                s += v[i].conj() * col[i];
            }
            s *= 2.0;
            for i in k + 1..n {
                col[i] -= v[i] * s;
            }
        }
        // right: A[:, k+1..] -= 2 (A[:, k+1..] v) vᴴ
        w.iter_mut().for_each(|x| *x = ZERO);
        for c in k + 1..n {
            let vc = v[c];
            for (wi, &aic) in w.iter_mut().zip(a.col(c)) {
                *wi += aic * vc;
            }
        }
        for c in k + 1..n {
            let vc = v[c].conj() * 2.0;
            for (aic, &wi) in a.col_mut(c).iter_mut().zip(&w) {
                *aic -= wi * vc;
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Complex Givens rotation `[c s; -s̄ c]` mapping `(x, y)` to `(ρ, 0)`.
#[inline]
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, x / ax * y.conj() / r)
}

/// Eigenvalues of an upper Hessenberg matrix (destroyed in the process).
///
/// Only the active window is updated, since no Schur vectors are formed.
/// Gives up with [`Error::NoConvergence`] after `100·n` QR sweeps.
pub fn hessenberg_eigenvalues(h: &mut DenseMatrix<C64>) -> Result<Vec<C64>> {
    let n = h.rows();
    let mut eig = vec![ZERO; n];
    if n == 0 {
        return Ok(eig);
    }
    let cap = 100 * n.max(1);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;
    let eps = f64::EPSILON;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // find the start of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = (lo.saturating_sub(1)..=hi).map(|i| h[(i, i)].norm()).fold(0.0, f64::max);
            }
            if sub <= eps * diag || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            its = 0;
            continue;
        }
        total += 1;
        its += 1;
        if total > cap {
            return Err(Error::NoConvergence { iterations: total });
        }
        let shift = if its % 10 == 0 {
            // exceptional shift
            let prev = if hi >= lo + 2 { h[(hi - 1, hi - 2)].norm() } else { 0.0 };
            let s = h[(hi, hi - 1)].norm() + prev;
            h[(hi, hi)] + C64::new(0.75 * s, 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        let mut x = h[(lo, lo)] - shift;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            // rows k, k+1
            let cstart = if k > lo { k - 1 } else { lo };
            for j in cstart..=hi {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = b * c - s.conj() * a;
            }
            // columns k, k+1
            let rend = (k + 2).min(hi);
            for i in lo..=rend {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = b * c - a * s;
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    Ok(eig)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let e1 = mean + disc;
    let e2 = mean - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// All eigenvalues of a square complex matrix.
pub fn eigenvalues(a: &DenseMatrix<C64>) -> Result<Vec<C64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    let mut h = a.clone();
    reduce_to_hessenberg(&mut h);
    hessenberg_eigenvalues(&mut h)
}
