//! Full GMRES with optional left or right preconditioning, the stationary
//! mean value iteration, and a sparse direct solve.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::precond::{Preconditioner, PreconditionerKind};
use crate::scalar::{dot_c, norm2, norm_inf};
use crate::sparse::{SparseComplexMatrix, SparseLu};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    None,
    Left,
    Right,
}

impl Side {
    pub fn name(&self) -> &'static str {
        match self {
            Side::None => "none",
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Vec<C64>,
    /// Relative residual norms, entry 0 belonging to the initial guess.
    pub residual_history: Vec<f64>,
    /// Relative maximum-norm errors against a reference solution, when one
    /// was given.
    pub error_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub diverged: bool,
    pub side: Side,
    pub preconditioner: PreconditionerKind,
    /// Explicitly recomputed relative residual of the returned solution.
    pub final_residual: f64,
    /// Filled in by callers that have a clock.
    pub wall_time: Option<core::time::Duration>,
}

/// Full (unrestarted) GMRES from a zero initial guess.
///
/// Right preconditioning solves `A P⁻¹ y = b`, `x = P⁻¹ y`, and monitors
/// `‖b − Ax‖/‖b‖`; left preconditioning solves `P⁻¹A x = P⁻¹b` and monitors
/// `‖P⁻¹(b − Ax)‖/‖P⁻¹b‖`.
pub fn gmres(a: &SparseComplexMatrix, b: &[C64], p: &Preconditioner, side: Side, tol: f64, maxit: usize) -> Result<SolveReport> {
    let n = a.nrows();
    if !a.is_square() || b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    if side != Side::None && p.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.dim() });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(alloc::format!("tolerance must be positive, got {tol}")));
    }
    let kind = if side == Side::None { PreconditionerKind::None } else { p.kind() };
    let precondition = |v: &[C64]| -> Result<Vec<C64>> {
        if side == Side::None {
            Ok(v.to_vec())
        } else {
            p.apply(v)
        }
    };
    // residual in the monitored norm
    let monitored = |x: &[C64]| -> Result<f64> {
        let ax = a.matvec(x)?;
        let r: Vec<C64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
        Ok(if side == Side::Left { norm2(&p.apply(&r)?) } else { norm2(&r) })
    };

    let r0 = if side == Side::Left { p.apply(b)? } else { b.to_vec() };
    let beta = norm2(&r0);
    let mut report = SolveReport {
        solution: vec![ZERO; n],
        residual_history: vec![1.0],
        error_history: Vec::new(),
        iterations: 0,
        converged: false,
        diverged: false,
        side,
        preconditioner: kind,
        final_residual: 0.0,
        wall_time: None,
    };
    if beta == 0.0 {
        report.residual_history[0] = 0.0;
        report.converged = true;
        return Ok(report);
    }

    let mut basis: Vec<Vec<C64>> = vec![r0.iter().map(|v| v / beta).collect()];
    // Hessenberg columns after rotation, i.e. the columns of R
    let mut r_cols: Vec<Vec<C64>> = Vec::new();
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<C64> = Vec::new();
    let mut g: Vec<C64> = vec![C64::new(beta, 0.0)];
    let reorth = core::f64::consts::FRAC_1_SQRT_2;

    let mut j = 0;
    while j < maxit {
        let w = match side {
            Side::Right => a.matvec(&precondition(&basis[j])?)?,
            Side::Left => p.apply(&a.matvec(&basis[j])?)?,
            Side::None => a.matvec(&basis[j])?,
        };
        let mut w = w;
        let mut h = vec![ZERO; j + 2];
        let before = norm2(&w);
        for (i, v) in basis.iter().enumerate() {
            let c = dot_c(v, &w);
            h[i] = c;
            for (wk, vk) in w.iter_mut().zip(v) {
                *wk -= c * vk;
            }
        }
        let mut after = norm2(&w);
        if after < reorth * before {
            for (i, v) in basis.iter().enumerate() {
                let c = dot_c(v, &w);
                h[i] += c;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= c * vk;
                }
            }
            after = norm2(&w);
        }
        h[j + 1] = C64::new(after, 0.0);
        for i in 0..j {
            let (x, y) = (h[i], h[i + 1]);
            h[i] = x * cs[i] + sn[i] * y;
            h[i + 1] = y * cs[i] - sn[i].conj() * x;
        }
        let (c, s) = givens(h[j], h[j + 1]);
        h[j] = h[j] * c + s * h[j + 1];
        h[j + 1] = ZERO;
        cs.push(c);
        sn.push(s);
        let gj = g[j];
        g[j] = gj * c;
        g.push(-s.conj() * gj);
        h.truncate(j + 1);
        r_cols.push(h);
        j += 1;
        let estimate = g[j].norm() / beta;
        report.residual_history.push(estimate);
        // the Krylov space is invariant, the iterate is exact up to rounding
        let breakdown = after <= f64::EPSILON * before;
        if estimate <= tol || breakdown {
            let x = assemble_solution(&basis, &r_cols, &g, side, &precondition)?;
            let actual = monitored(&x)? / beta;
            if actual <= tol || breakdown {
                report.solution = x;
                report.iterations = j;
                report.converged = actual <= tol;
                report.final_residual = actual;
                return Ok(report);
            }
        }
        basis.push(w.iter().map(|v| v / after).collect());
    }
    let x = assemble_solution(&basis, &r_cols, &g, side, &precondition)?;
    report.final_residual = monitored(&x)? / beta;
    report.converged = report.final_residual <= tol;
    report.solution = x;
    report.iterations = j;
    Ok(report)
}

/// Complex Givens rotation `[c s; −s̄ c]` zeroing the second entry.
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

fn assemble_solution(
    basis: &[Vec<C64>],
    r_cols: &[Vec<C64>],
    g: &[C64],
    side: Side,
    precondition: &dyn Fn(&[C64]) -> Result<Vec<C64>>,
) -> Result<Vec<C64>> {
    let k = r_cols.len();
    let mut y = g[..k].to_vec();
    for i in (0..k).rev() {
        y[i] /= r_cols[i][i];
        let yi = y[i];
        for (t, yt) in y.iter_mut().enumerate().take(i) {
            *yt -= r_cols[i][t] * yi;
        }
    }
    let n = basis[0].len();
    let mut z = vec![ZERO; n];
    for (v, &yi) in basis.iter().zip(&y) {
        for (zk, vk) in z.iter_mut().zip(v) {
            *zk += vk * yi;
        }
    }
    if side == Side::Right {
        precondition(&z)
    } else {
        Ok(z)
    }
}

/// Options of the stationary iteration.
#[derive(Debug, Clone, Default)]
pub struct StationaryOptions<'a> {
    pub maxit: usize,
    /// Stop when the relative residual drops below this.
    pub tol: f64,
    /// Starting vector; zero when absent, so the first iterate is `Ā⁻¹b`.
    pub x0: Option<&'a [C64]>,
    /// Reference solution for the error history.
    pub reference: Option<&'a [C64]>,
}

/// Growth of the residual over its running minimum that counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// Stationary iteration `x⁺ = x + P⁻¹(b − A x)`, i.e. `P x⁺ = b − (A − P) x`.
pub fn stationary(a: &SparseComplexMatrix, p: &Preconditioner, b: &[C64], opts: &StationaryOptions) -> Result<SolveReport> {
    let n = a.nrows();
    if !a.is_square() || b.len() != n || p.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let bnorm = norm2(b);
    let rel = |v: f64| if bnorm > 0.0 { v / bnorm } else { v };
    let mut x = match opts.x0 {
        Some(x0) if x0.len() == n => x0.to_vec(),
        Some(x0) => {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x0.len(),
            })
        }
        None => vec![ZERO; n],
    };
    let ref_norm = opts.reference.map(norm_inf);
    let err_of = |x: &[C64]| -> Option<f64> {
        let r = opts.reference?;
        let d: Vec<C64> = x.iter().zip(r).map(|(u, v)| u - v).collect();
        let rn = ref_norm.unwrap_or(1.0);
        Some(if rn > 0.0 { norm_inf(&d) / rn } else { norm_inf(&d) })
    };
    let residual = |x: &[C64]| -> Result<Vec<C64>> {
        let ax = a.matvec(x)?;
        Ok(b.iter().zip(&ax).map(|(u, v)| u - v).collect())
    };
    let mut r = residual(&x)?;
    let mut res = rel(norm2(&r));
    let mut report = SolveReport {
        solution: Vec::new(),
        residual_history: vec![res],
        error_history: err_of(&x).into_iter().collect(),
        iterations: 0,
        converged: res <= opts.tol,
        diverged: false,
        side: Side::Right,
        preconditioner: p.kind(),
        final_residual: res,
        wall_time: None,
    };
    let mut best = res;
    while !report.converged && report.iterations < opts.maxit {
        let d = p.apply(&r)?;
        for (xk, dk) in x.iter_mut().zip(&d) {
            *xk += dk;
        }
        report.iterations += 1;
        r = residual(&x)?;
        res = rel(norm2(&r));
        report.residual_history.push(res);
        if let Some(e) = err_of(&x) {
            report.error_history.push(e);
        }
        best = best.min(res);
        if !res.is_finite() || res > DIVERGENCE_FACTOR * best {
            report.diverged = true;
            break;
        }
        report.converged = res <= opts.tol;
    }
    report.final_residual = res;
    report.solution = x;
    Ok(report)
}

/// Sparse LU solve of `A x = b`.
pub fn direct_solve(a: &SparseComplexMatrix, b: &[C64]) -> Result<Vec<C64>> {
    SparseLu::new(a)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{DenseLu, DenseMatrix};
    use crate::sparse::CsrMatrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn small_system() -> (SparseComplexMatrix, Vec<C64>) {
        let d = DenseMatrix::from_rows(&[
            &[c(4.0, 1.0), c(1.0, 0.0), c(0.0, 0.5), c(0.0, 0.0)],
            &[c(1.0, -1.0), c(3.0, 0.0), c(1.0, 0.0), c(0.2, 0.0)],
            &[c(0.0, 0.0), c(2.0, 0.0), c(5.0, -2.0), c(1.0, 1.0)],
            &[c(0.5, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)],
        ]);
        (CsrMatrix::from_dense(&d), vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 2.0), c(0.5, 0.5)])
    }

    fn max_diff(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    #[test]
    fn identity_converges_at_once() {
        let a = CsrMatrix::identity(5);
        let b: Vec<C64> = (0..5).map(|i| c(i as f64, 1.0)).collect();
        let rep = gmres(&a, &b, &Preconditioner::identity(5), Side::None, 1e-12, 10).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        assert!(max_diff(&rep.solution, &b) < 1e-15);
        assert!(rep.final_residual < 1e-15);
    }

    #[test]
    fn small_dense_system() {
        let (a, b) = small_system();
        let exact = DenseLu::new(&a.to_dense().unwrap()).unwrap().solve(&b);
        for side in [Side::None, Side::Left, Side::Right] {
            let jacobi = CsrMatrix::diagonal(&a.diagonal_values());
            let p = Preconditioner::from_matrix(&jacobi, PreconditionerKind::MeanValue).unwrap();
            let rep = gmres(&a, &b, &p, side, 1e-13, 10).unwrap();
            assert!(rep.converged);
            assert!(max_diff(&rep.solution, &exact) <= 1e-10);
            assert!(rep.residual_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        }
        let rep = gmres(&a, &b, &Preconditioner::identity(4), Side::None, 1e-13, 10).unwrap();
        assert!(rep.iterations <= 4);
        assert!(gmres(&a, &b, &Preconditioner::identity(4), Side::None, 0.0, 10).is_err());
    }

    #[test]
    fn identity_right_preconditioner_changes_nothing() {
        let (a, b) = small_system();
        let none = gmres(&a, &b, &Preconditioner::identity(4), Side::None, 1e-14, 10).unwrap();
        let right = gmres(&a, &b, &Preconditioner::identity(4), Side::Right, 1e-14, 10).unwrap();
        assert_eq!(none.residual_history, right.residual_history);
    }

    #[test]
    fn stationary_with_exact_splitting() {
        let (a, b) = small_system();
        let p = Preconditioner::from_matrix(&a, PreconditionerKind::MeanValue).unwrap();
        let opts = StationaryOptions {
            maxit: 10,
            tol: 1e-14,
            ..Default::default()
        };
        let rep = stationary(&a, &p, &b, &opts).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn stationary_detects_divergence() {
        // splitting with the diagonal of a matrix that is not diagonally dominant
        let d = DenseMatrix::from_rows(&[&[c(1.0, 0.0), c(3.0, 0.0)], &[c(3.0, 0.0), c(1.0, 0.0)]]);
        let a = CsrMatrix::from_dense(&d);
        let p = Preconditioner::from_matrix(&CsrMatrix::identity(2), PreconditionerKind::MeanValue).unwrap();
        let b = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let exact = direct_solve(&a, &b).unwrap();
        let opts = StationaryOptions {
            maxit: 200,
            tol: 1e-12,
            reference: Some(&exact),
            ..Default::default()
        };
        let rep = stationary(&a, &p, &b, &opts).unwrap();
        assert!(rep.diverged && !rep.converged);
        assert_eq!(rep.error_history.len(), rep.residual_history.len());
    }

    #[test]
    fn direct_solve_identity() {
        let b = vec![c(1.0, 2.0), c(3.0, 4.0)];
        assert_eq!(direct_solve(&CsrMatrix::identity(2), &b).unwrap(), b);
    }
}
