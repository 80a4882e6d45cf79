//! Left-looking sparse LU with threshold partial pivoting (Gilbert–Peierls).
//!
//! Produces `P A Q = L U` with `Q` a minimum degree order of the pattern of
//! `A + Aᵀ`. Row pivots prefer the diagonal entry of the permuted matrix
//! when it is within a factor of ten of the column maximum, which keeps the
//! symmetric fill-reducing order effective on complex symmetric systems.

#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;

use super::{minimum_degree, CsrMatrix, SparseComplexMatrix};
use crate::error::{Error, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const NONE: usize = usize::MAX;
const PIVOT_TOL: f64 = 0.1;

/// Column-compressed triangular factor.
#[derive(Debug, Clone, Default)]
struct Factor {
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<C64>,
}

/// Sparse LU factorization of a square complex matrix.
#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    /// `L` has a unit diagonal stored first in each column
    l: Factor,
    /// `U` stores the diagonal last in each column
    u: Factor,
    /// `pinv[i]` is the pivot step of original row `i`
    pinv: Vec<usize>,
    /// `q[k]` is the original column eliminated at step `k`
    q: Vec<usize>,
}

impl SparseLu {
    /// Factors `a` with a minimum degree column order.
    pub fn new(a: &SparseComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        let n = a.nrows();
        let adj: Vec<Vec<usize>> = (0..n).map(|i| a.row(i).0.to_vec()).collect();
        let q = minimum_degree(&adj);
        Self::with_order(a, q)
    }

    /// Factors `a` with a caller-supplied column order.
    pub fn with_order(a: &SparseComplexMatrix, q: Vec<usize>) -> Result<Self> {
        let n = a.nrows();
        if !a.is_square() || q.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: q.len() });
        }
        // rows of Aᵀ are the columns of A
        let at = a.transpose();
        let anorm = a.max_abs();
        let mut l = Factor {
            col_ptr: Vec::with_capacity(n + 1),
            row_idx: Vec::with_capacity(4 * a.nnz() + n),
            values: Vec::with_capacity(4 * a.nnz() + n),
        };
        let mut u = l.clone();
        let mut pinv = vec![NONE; n];
        let mut x = vec![ZERO; n];
        let mut xi = vec![0usize; 2 * n];
        let mut marked = vec![false; n];

        for (k, &col) in q.iter().enumerate() {
            l.col_ptr.push(l.row_idx.len());
            u.col_ptr.push(u.row_idx.len());
            let (ai, av) = at.row(col);
            let top = reach(&l, ai, &pinv, &mut xi, &mut marked);
            for &i in &xi[top..n] {
                x[i] = ZERO;
            }
            for (&i, &v) in ai.iter().zip(av) {
                x[i] = v;
            }
            // sparse triangular solve with the columns of L found so far
            for idx in top..n {
                let j = xi[idx];
                let jn = pinv[j];
                if jn == NONE {
                    continue;
                }
                let xj = x[j];
                if xj == ZERO {
                    continue;
                }
                for p in l.col_ptr[jn] + 1..l.col_ptr_end(jn) {
                    x[l.row_idx[p]] -= l.values[p] * xj;
                }
            }
            // choose the pivot among rows not yet pivotal
            let (mut ipiv, mut best) = (NONE, -1.0);
            for &i in &xi[top..n] {
                marked[i] = false;
                if pinv[i] == NONE {
                    let t = x[i].norm();
                    if t > best {
                        best = t;
                        ipiv = i;
                    }
                } else {
                    u.row_idx.push(pinv[i]);
                    u.values.push(x[i]);
                }
            }
            if ipiv == NONE || best <= 0.0 || best <= f64::EPSILON * anorm {
                return Err(Error::Singular { step: k });
            }
            if pinv[col] == NONE && x[col].norm() >= PIVOT_TOL * best {
                ipiv = col;
            }
            let pivot = x[ipiv];
            u.row_idx.push(k);
            u.values.push(pivot);
            pinv[ipiv] = k;
            l.row_idx.push(ipiv);
            l.values.push(C64::new(1.0, 0.0));
            let inv = C64::new(1.0, 0.0) / pivot;
            for &i in &xi[top..n] {
                if pinv[i] == NONE {
                    l.row_idx.push(i);
                    l.values.push(x[i] * inv);
                }
                x[i] = ZERO;
            }
        }
        l.col_ptr.push(l.row_idx.len());
        u.col_ptr.push(u.row_idx.len());
        for r in &mut l.row_idx {
            *r = pinv[*r];
        }
        Ok(Self { n, l, u, pinv, q })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of `L` and `U` (the unit diagonal of `L` included).
    pub fn factor_nnz(&self) -> (usize, usize) {
        (self.l.row_idx.len(), self.u.row_idx.len())
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    /// Solves `A x = b`, overwriting `b` with `x`.
    pub fn solve_in_place(&self, b: &mut [C64]) -> Result<()> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.len() });
        }
        let mut y = vec![ZERO; n];
        for (i, &v) in b.iter().enumerate() {
            y[self.pinv[i]] = v;
        }
        for k in 0..n {
            let yk = y[k];
            if yk == ZERO {
                continue;
            }
            for p in self.l.col_ptr[k] + 1..self.l.col_ptr[k + 1] {
                y[self.l.row_idx[p]] -= self.l.values[p] * yk;
            }
        }
        for k in (0..n).rev() {
            let end = self.u.col_ptr[k + 1] - 1;
            y[k] /= self.u.values[end];
            let yk = y[k];
            if yk == ZERO {
                continue;
            }
            for p in self.u.col_ptr[k]..end {
                y[self.u.row_idx[p]] -= self.u.values[p] * yk;
            }
        }
        for (k, &c) in self.q.iter().enumerate() {
            b[c] = y[k];
        }
        Ok(())
    }

    /// Solves `Aᵀ x = b` (plain transpose, no conjugation).
    pub fn solve_transpose(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.len() });
        }
        let mut w: Vec<C64> = self.q.iter().map(|&c| b[c]).collect();
        for k in 0..n {
            let end = self.u.col_ptr[k + 1] - 1;
            let mut s = w[k];
            for p in self.u.col_ptr[k]..end {
                s -= self.u.values[p] * w[self.u.row_idx[p]];
            }
            w[k] = s / self.u.values[end];
        }
        for k in (0..n).rev() {
            let mut s = w[k];
            for p in self.l.col_ptr[k] + 1..self.l.col_ptr[k + 1] {
                s -= self.l.values[p] * w[self.l.row_idx[p]];
            }
            w[k] = s;
        }
        Ok(self.pinv.iter().map(|&k| w[k]).collect())
    }
}

impl Factor {
    /// End of column `j`, valid also for the column under construction.
    #[inline]
    fn col_ptr_end(&self, j: usize) -> usize {
        self.col_ptr.get(j + 1).copied().unwrap_or(self.row_idx.len())
    }
}

/// Nonzero pattern of `L \\ b` in topological order, stored in `xi[top..n]`.
///
/// Depth-first search as in CSparse: the DFS stack grows from the front of
/// `xi[..n]` and finished nodes are written from its back, which never
/// collide since each node is visited once. `xi[n..]` holds child cursors.
fn reach(l: &Factor, bi: &[usize], pinv: &[usize], xi: &mut [usize], marked: &mut [bool]) -> usize {
    let n = pinv.len();
    let mut top = n;
    let (stack, cursor) = xi.split_at_mut(n);
    for &start in bi {
        if marked[start] {
            continue;
        }
        let mut head = 0usize;
        stack[0] = start;
        loop {
            let j = stack[head];
            let jn = pinv[j];
            if !marked[j] {
                marked[j] = true;
                cursor[head] = if jn == NONE { 0 } else { l.col_ptr[jn] + 1 };
            }
            let end = if jn == NONE { 0 } else { l.col_ptr_end(jn) };
            let mut child = NONE;
            let mut p = cursor[head];
            while p < end {
                let i = l.row_idx[p];
                p += 1;
                if !marked[i] {
                    child = i;
                    break;
                }
            }
            cursor[head] = p;
            if child != NONE {
                head += 1;
                stack[head] = child;
                continue;
            }
            top -= 1;
            stack[top] = j;
            if head == 0 {
                break;
            }
            head -= 1;
        }
    }
    top
}

/// Applies the inverse of `I ⊗ S` given a factorization of the block `S`.
pub fn block_diag_solve(fact: &SparseLu, x: &[C64]) -> Result<Vec<C64>> {
    let n = fact.dim();
    if n == 0 || x.len() % n != 0 {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let mut out = x.to_vec();
    for seg in out.chunks_mut(n) {
        fact.solve_in_place(seg)?;
    }
    Ok(out)
}

impl CsrMatrix<C64> {
    /// Convenience: factor and solve in one call.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        SparseLu::new(self)?.solve(b)
    }
}
