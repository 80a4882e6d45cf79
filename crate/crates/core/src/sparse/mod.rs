//! Compressed sparse row matrices with optional block metadata, Kronecker
//! products and a sparse LU factorization.

mod lu;
mod ordering;

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::C64;

pub use lu::{block_diag_solve, SparseLu};
pub use ordering::minimum_degree;

/// Entries with modulus below this are treated as structural zeros.
pub const ZERO_THRESHOLD: f64 = 1e-300;

/// Default limit on `nrows·ncols` for densification.
pub const DENSE_CAP: usize = 4096 * 4096;

/// Logical `count × count` block layout of square blocks of side `size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockInfo {
    pub count: usize,
    pub size: usize,
}

/// Sparse matrix in CSR form. Column indices are strictly increasing within
/// each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
    block: Option<BlockInfo>,
}

pub type SparseComplexMatrix = CsrMatrix<C64>;
pub type SparseRealMatrix = CsrMatrix<f64>;

impl<T: Scalar> CsrMatrix<T> {
    /// Wraps raw CSR arrays after validating them.
    pub fn from_raw(nrows: usize, ncols: usize, row_ptr: Vec<usize>, col_idx: Vec<usize>, values: Vec<T>) -> Result<Self> {
        if row_ptr.len() != nrows + 1 {
            return Err(Error::DimensionMismatch {
                expected: nrows + 1,
                got: row_ptr.len(),
            });
        }
        if col_idx.len() != values.len() || row_ptr[nrows] != col_idx.len() {
            return Err(Error::DimensionMismatch {
                expected: row_ptr[nrows],
                got: col_idx.len(),
            });
        }
        for i in 0..nrows {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidParameter("row pointers must be nondecreasing".into()));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) || cols.iter().any(|&c| c >= ncols) {
                return Err(Error::InvalidParameter(
                    "column indices must be strictly increasing and in range".into(),
                ));
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
            block: None,
        })
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        let mut counts = vec![0usize; nrows + 1];
        for &(i, j, _) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::IndexOutOfRange {
                    index: if i >= nrows { i } else { j },
                    len: if i >= nrows { nrows } else { ncols },
                });
            }
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![T::zero(); triplets.len()];
        for &(i, j, v) in triplets {
            cols[next[i]] = j;
            vals[next[i]] = v;
            next[i] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut scratch: Vec<(usize, T)> = Vec::new();
        for i in 0..nrows {
            scratch.clear();
            scratch.extend((counts[i]..counts[i + 1]).map(|p| (cols[p], vals[p])));
            scratch.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < scratch.len() {
                let (c, mut v) = scratch[k];
                k += 1;
                while k < scratch.len() && scratch[k].0 == c {
                    v += scratch[k].1;
                    k += 1;
                }
                if v.modulus() >= ZERO_THRESHOLD {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
            block: None,
        })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
            block: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![T::one(); n])
    }

    /// Square diagonal matrix; zero diagonal entries are not stored.
    pub fn diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        row_ptr.push(0);
        for (i, &d) in diag.iter().enumerate() {
            if d.modulus() >= ZERO_THRESHOLD {
                col_idx.push(i);
                values.push(d);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows: n,
            ncols: n,
            row_ptr,
            col_idx,
            values,
            block: None,
        }
    }

    pub fn from_dense(d: &DenseMatrix<T>) -> Self {
        let mut trip = Vec::new();
        for j in 0..d.cols() {
            for i in 0..d.rows() {
                let v = d[(i, j)];
                if v.modulus() >= ZERO_THRESHOLD {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(d.rows(), d.cols(), &trip).expect("indices in range")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn block_info(&self) -> Option<BlockInfo> {
        self.block
    }

    /// Attaches block metadata; fails unless `count·size` matches both sides.
    pub fn with_block_info(mut self, info: BlockInfo) -> Result<Self> {
        let n = info
            .count
            .checked_mul(info.size)
            .ok_or(Error::InvalidParameter("block size overflow".into()))?;
        if n != self.nrows || n != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.nrows,
                got: n,
            });
        }
        self.block = Some(info);
        Ok(self)
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal_values(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// Iterator over stored `(row, col, value)` entries in row order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.col_idx[p], self.values[p])))
    }

    /// Removes entries whose modulus is below `threshold`.
    pub fn compress(&mut self, threshold: f64) {
        let mut w = 0;
        let mut start = 0;
        for i in 0..self.nrows {
            let end = self.row_ptr[i + 1];
            for p in start..end {
                if self.values[p].modulus() >= threshold {
                    self.col_idx[w] = self.col_idx[p];
                    self.values[w] = self.values[p];
                    w += 1;
                }
            }
            start = end;
            self.row_ptr[i + 1] = w;
        }
        self.col_idx.truncate(w);
        self.values.truncate(w);
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                got: x.len(),
            });
        }
        let mut y = vec![T::zero(); self.nrows];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` into a preallocated buffer. Panics on size mismatch.
    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *yi = acc;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![T::zero(); self.nnz()];
        for i in 0..self.nrows {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let c = self.col_idx[p];
                col_idx[next[c]] = i;
                values[next[c]] = self.values[p];
                next[c] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr: counts,
            col_idx,
            values,
            block: self.block,
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        for v in &mut t.values {
            *v = v.conjugate();
        }
        t
    }

    pub fn map<U: Scalar>(&self, mut f: impl FnMut(T) -> U) -> CsrMatrix<U> {
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            block: self.block,
        }
    }

    pub fn to_complex(&self) -> CsrMatrix<C64> {
        self.map(|v| v.to_complex())
    }

    /// `alpha·self + beta·other`, keeping the union pattern and dropping
    /// entries that cancel to exact zero.
    pub fn add_scaled(&self, alpha: T, other: &Self, beta: T) -> Result<Self> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.nrows * self.ncols,
                got: other.nrows * other.ncols,
            });
        }
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(self.nnz().max(other.nnz()));
        row_ptr.push(0);
        for i in 0..self.nrows {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let (c, v) = if q >= cb.len() || (p < ca.len() && ca[p] < cb[q]) {
                    p += 1;
                    (ca[p - 1], alpha * va[p - 1])
                } else if p >= ca.len() || cb[q] < ca[p] {
                    q += 1;
                    (cb[q - 1], beta * vb[q - 1])
                } else {
                    p += 1;
                    q += 1;
                    (ca[p - 1], alpha * va[p - 1] + beta * vb[q - 1])
                };
                if v.modulus() >= ZERO_THRESHOLD {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        let block = if self.block == other.block { self.block } else { None };
        Ok(Self {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
            block,
        })
    }

    /// Sparse product `self · other` (Gustavson).
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                got: other.nrows,
            });
        }
        let mut acc = vec![T::zero(); other.ncols];
        let mut marker = vec![usize::MAX; other.ncols];
        let mut pattern: Vec<usize> = Vec::new();
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..self.nrows {
            pattern.clear();
            let (ca, va) = self.row(i);
            for (&k, &a) in ca.iter().zip(va) {
                let (cb, vb) = other.row(k);
                for (&j, &b) in cb.iter().zip(vb) {
                    if marker[j] != i {
                        marker[j] = i;
                        acc[j] = T::zero();
                        pattern.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            pattern.sort_unstable();
            for &j in &pattern {
                if acc[j].modulus() >= ZERO_THRESHOLD {
                    col_idx.push(j);
                    values.push(acc[j]);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            nrows: self.nrows,
            ncols: other.ncols,
            row_ptr,
            col_idx,
            values,
            block: None,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.modulus_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).1.iter().map(|v| v.modulus()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let t = self.transpose();
        match self.add_scaled(T::one(), &t, -T::one()) {
            Ok(d) => d.max_abs(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Dense copy, refused when `nrows·ncols` exceeds [`DENSE_CAP`].
    pub fn to_dense(&self) -> Result<DenseMatrix<T>> {
        self.to_dense_with_cap(DENSE_CAP)
    }

    pub fn to_dense_with_cap(&self, cap: usize) -> Result<DenseMatrix<T>> {
        let size = self.nrows.saturating_mul(self.ncols);
        if size > cap {
            return Err(Error::DenseCapExceeded {
                rows: self.nrows,
                cols: self.ncols,
                cap,
            });
        }
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            d[(i, j)] = v;
        }
        Ok(d)
    }

    /// Diagonal block `(b, b)` of a block-structured matrix.
    pub fn diagonal_block(&self, b: usize) -> Result<Self> {
        let info = self.block.ok_or(Error::InvalidParameter("matrix has no block structure".into()))?;
        if b >= info.count {
            return Err(Error::IndexOutOfRange { index: b, len: info.count });
        }
        let lo = b * info.size;
        let hi = lo + info.size;
        let mut row_ptr = Vec::with_capacity(info.size + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in lo..hi {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                if (lo..hi).contains(&c) {
                    col_idx.push(c - lo);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            nrows: info.size,
            ncols: info.size,
            row_ptr,
            col_idx,
            values,
            block: None,
        })
    }
}

/// Kronecker product `a ⊗ b`; the left factor indexes the blocks.
///
/// When both factors are square the result carries
/// `BlockInfo { count: a.nrows, size: b.nrows }`.
pub fn kron<T: Scalar>(a: &CsrMatrix<T>, b: &CsrMatrix<T>) -> Result<CsrMatrix<T>> {
    let nrows = a
        .nrows
        .checked_mul(b.nrows)
        .ok_or(Error::InvalidParameter("Kronecker size overflow".into()))?;
    let ncols = a
        .ncols
        .checked_mul(b.ncols)
        .ok_or(Error::InvalidParameter("Kronecker size overflow".into()))?;
    let nnz = a
        .nnz()
        .checked_mul(b.nnz())
        .ok_or(Error::InvalidParameter("Kronecker size overflow".into()))?;
    let mut row_ptr = Vec::with_capacity(nrows + 1);
    let mut col_idx = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    row_ptr.push(0);
    for ia in 0..a.nrows {
        let (ca, va) = a.row(ia);
        for ib in 0..b.nrows {
            let (cb, vb) = b.row(ib);
            for (&ja, &x) in ca.iter().zip(va) {
                for (&jb, &y) in cb.iter().zip(vb) {
                    let v = x * y;
                    if v.modulus() >= ZERO_THRESHOLD {
                        col_idx.push(ja * b.ncols + jb);
                        values.push(v);
                    }
                }
            }
            row_ptr.push(col_idx.len());
        }
    }
    let block = (a.is_square() && b.is_square()).then_some(BlockInfo {
        count: a.nrows,
        size: b.nrows,
    });
    Ok(CsrMatrix {
        nrows,
        ncols,
        row_ptr,
        col_idx,
        values,
        block,
    })
}
