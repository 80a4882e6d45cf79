//! Dense spectral analysis at desk scale: spectra of preconditioned
//! matrices, 2-norm condition numbers and the Frobenius bound for the mean
//! value preconditioner.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::assembly::GalerkinSystem;
use crate::basis::QuadratureRule;
use crate::dense::{eigenvalues, hermitian_eigenvalues, DenseLu, DenseMatrix};
use crate::error::{Error, Result};
use crate::precond::Preconditioner;
use crate::scalar::norm2;
use crate::sparse::{SparseComplexMatrix, SparseLu};
use crate::C64;

/// Largest dimension handled by the dense routines.
pub const DENSE_EIG_CAP: usize = 2500;

const ONE: C64 = C64::new(1.0, 0.0);

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::DenseCapExceeded { rows: n, cols: n, cap });
    }
    Ok(())
}

/// All eigenvalues of a dense matrix of dimension at most [`DENSE_EIG_CAP`].
pub fn dense_eigs(a: &DenseMatrix<C64>) -> Result<Vec<C64>> {
    check_cap(a.rows(), DENSE_EIG_CAP)?;
    eigenvalues(a)
}

/// Relative residual `‖Av − λv‖/‖A‖_F` of the eigenvector for `lambda`
/// recovered by shifted inverse iteration.
pub fn eigenpair_residual(a: &DenseMatrix<C64>, lambda: C64) -> Result<f64> {
    let n = a.rows();
    let anorm = a.frobenius_norm();
    // nudge the shift off the eigenvalue so the shifted matrix factors
    let delta = C64::new(1e-10, 1e-10) * anorm.max(1.0);
    let shifted = DenseMatrix::from_fn(n, n, |i, j| if i == j { a[(i, j)] - lambda - delta } else { a[(i, j)] });
    let lu = DenseLu::new(&shifted)?;
    let mut v: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + (i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
        .collect();
    for _ in 0..3 {
        v = lu.solve(&v);
        let nv = norm2(&v);
        v.iter_mut().for_each(|x| *x /= nv);
    }
    let av = a.matvec(&v);
    let r: Vec<C64> = av.iter().zip(&v).map(|(x, y)| x - lambda * y).collect();
    Ok(norm2(&r) / anorm)
}

/// `A P⁻¹` formed densely, column `j` being `A (P⁻¹ e_j)`.
pub fn right_preconditioned_matrix(a: &SparseComplexMatrix, p: &Preconditioner) -> Result<DenseMatrix<C64>> {
    let n = a.nrows();
    check_cap(n, DENSE_EIG_CAP)?;
    let mut out = DenseMatrix::zeros(n, n);
    let mut e = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = ONE;
        let col = a.matvec(&p.apply(&e)?)?;
        out.col_mut(j).copy_from_slice(&col);
        e[j] = C64::new(0.0, 0.0);
    }
    Ok(out)
}

/// `P⁻¹ A` formed densely.
pub fn left_preconditioned_matrix(a: &SparseComplexMatrix, p: &Preconditioner) -> Result<DenseMatrix<C64>> {
    let n = a.nrows();
    check_cap(n, DENSE_EIG_CAP)?;
    let dense = a.to_dense()?;
    let mut out = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let col = p.apply(dense.col(j))?;
        out.col_mut(j).copy_from_slice(&col);
    }
    Ok(out)
}

/// Eigenvalues of a preconditioned matrix and their position relative to
/// the disk `|z − ½| ≤ ½` and the disk `|z − (1 − iβ/2)| < |β|/2`.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<C64>,
    /// `max_λ |λ − ½| − ½`, nonpositive when all lie in the closed disk
    pub max_disk_violation: f64,
    /// `max_λ ||λ − ½| − ½|`, zero when all lie on the circle
    pub min_circle_deviation: f64,
    /// `max_λ |β|/2 − |λ − (1 − iβ/2)|`, nonpositive when no eigenvalue
    /// enters the open shift disk
    pub beta_disk_violation: f64,
}

impl SpectrumReport {
    pub fn new(eigenvalues: Vec<C64>, beta: f64) -> Self {
        let half = C64::new(0.5, 0.0);
        let centre = C64::new(1.0, -beta / 2.0);
        let mut disk = f64::NEG_INFINITY;
        let mut circle = 0.0f64;
        let mut shift = f64::NEG_INFINITY;
        for &z in &eigenvalues {
            let d = (z - half).norm() - 0.5;
            disk = disk.max(d);
            circle = circle.max(d.abs());
            shift = shift.max(beta.abs() / 2.0 - (z - centre).norm());
        }
        Self {
            eigenvalues,
            max_disk_violation: disk,
            min_circle_deviation: circle,
            beta_disk_violation: shift,
        }
    }
}

/// Spectrum of `A P⁻¹` with the inclusion metrics for shift `beta`.
pub fn preconditioned_spectrum(a: &SparseComplexMatrix, p: &Preconditioner, beta: f64) -> Result<SpectrumReport> {
    let ap = right_preconditioned_matrix(a, p)?;
    Ok(SpectrumReport::new(dense_eigs(&ap)?, beta))
}

/// `μ(z) = (z − 1)/(z − (1 + iβ))`.
pub fn mobius(z: C64, beta: f64) -> Result<C64> {
    let z2 = C64::new(1.0, beta);
    if z == z2 {
        return Err(Error::Pole);
    }
    Ok((z - ONE) / (z - z2))
}

/// `κ₂(A) = σ_max/σ_min` from the extreme eigenvalues of `AᴴA`;
/// `+∞` when `A` is numerically singular.
pub fn condition_number_2(a: &SparseComplexMatrix) -> Result<f64> {
    check_cap(a.nrows(), DENSE_EIG_CAP)?;
    let aha = a.adjoint().matmul(a)?;
    let ev = hermitian_eigenvalues(&aha.to_dense()?)?;
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if lo <= hi * f64::EPSILON {
        return Ok(f64::INFINITY);
    }
    Ok((hi / lo).sqrt())
}

/// Dense 2-norm condition number, for small matrices in tests and oracles.
pub fn condition_number_2_dense(a: &DenseMatrix<C64>) -> Result<f64> {
    check_cap(a.rows(), DENSE_EIG_CAP)?;
    let ev = hermitian_eigenvalues(&a.adjoint().matmul(a))?;
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if lo <= hi * f64::EPSILON {
        return Ok(f64::INFINITY);
    }
    Ok((hi / lo).sqrt())
}

/// Both sides of the Frobenius bound for the mean value preconditioner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrobeniusCheck {
    /// `‖Ā⁻¹A − I‖_F`
    pub lhs: f64,
    /// `C_m ‖S(ξ̄)⁻¹‖_F ‖‖ΔS(ξ)‖_F‖_{L²}`
    pub rhs: f64,
    /// `√(m+1) (Σ_ij ‖φ_i φ_j‖²)^{1/2}`
    pub cm: f64,
    pub holds: bool,
}

/// Evaluates the Frobenius bound on a desk-scale system.
pub fn frobenius_bound_check(sys: &GalerkinSystem) -> Result<FrobeniusCheck> {
    let n = sys.block_size();
    check_cap(n, DENSE_EIG_CAP)?;
    let s0 = sys.mean_block()?;
    let abar = crate::precond::mean_value_matrix(sys)?;
    let delta = sys.a.add_scaled(ONE, &abar, -ONE)?;

    // lhs: Ā⁻¹ΔA column by column, only nonzero columns contribute
    let lu = SparseLu::new(&s0)?;
    let dt = delta.transpose();
    let mut lhs2 = 0.0;
    let mut col = vec![C64::new(0.0, 0.0); sys.dim()];
    for j in 0..dt.nrows() {
        let (rows, vals) = dt.row(j);
        if rows.is_empty() {
            continue;
        }
        for (&i, &v) in rows.iter().zip(vals) {
            col[i] = v;
        }
        let solved = crate::sparse::block_diag_solve(&lu, &col)?;
        lhs2 += solved.iter().map(|z| z.norm_sqr()).sum::<f64>();
        for &i in rows {
            col[i] = C64::new(0.0, 0.0);
        }
    }

    let s0_inv = DenseLu::new(&s0.to_dense()?)?.inverse();
    let s = sys.basis.dim();
    // entries of ΔS are polynomials of degree two per variable, squared four
    let rule = QuadratureRule::tensor_gauss_legendre(s, 3);
    let mut ds2 = 0.0;
    for q in 0..rule.len() {
        let xi = rule.point(q);
        let d = sys.s_parts(xi).matrix()?.add_scaled(ONE, &s0, -ONE)?;
        let f = d.frobenius_norm();
        ds2 += rule.weights[q] * f * f;
    }
    let m1 = sys.blocks() as f64;
    let cm = m1.sqrt() * sys.basis.product_norm_sum().sqrt();
    let lhs = lhs2.sqrt();
    let rhs = cm * s0_inv.frobenius_norm() * ds2.sqrt();
    Ok(FrobeniusCheck {
        lhs,
        rhs,
        cm,
        holds: lhs <= rhs * (1.0 + 1e-10),
    })
}
