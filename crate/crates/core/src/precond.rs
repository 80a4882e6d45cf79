//! Complex shifted Laplace, mean value and mean value CSL preconditioners.

use alloc::vec::Vec;

use crate::assembly::{combine_parts, GalerkinSystem};
use crate::error::{Error, Result};
use crate::sparse::{block_diag_solve, kron, CsrMatrix, SparseComplexMatrix, SparseLu};
use crate::C64;

/// Shift used throughout unless overridden.
pub const DEFAULT_BETA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PreconditionerKind {
    None,
    /// `M = A − iβK`
    Csl {
        beta: f64,
    },
    /// `Ā = I ⊗ S(ξ̄)`
    MeanValue,
    /// `M₀ = I ⊗ (S(ξ̄) − iβ K(ξ̄))`
    MeanCsl {
        beta: f64,
    },
}

impl PreconditionerKind {
    pub fn name(&self) -> &'static str {
        match self {
            PreconditionerKind::None => "none",
            PreconditionerKind::Csl { .. } => "csl",
            PreconditionerKind::MeanValue => "mean",
            PreconditionerKind::MeanCsl { .. } => "meancsl",
        }
    }
}

#[derive(Debug, Clone)]
enum Backing {
    Identity,
    Full(SparseLu),
    Block(SparseLu),
}

/// A factored preconditioner ready for application.
#[derive(Debug, Clone)]
pub struct Preconditioner {
    kind: PreconditionerKind,
    backing: Backing,
    dim: usize,
}

/// Explicit CSL matrix `M = L − iB − (1 + iβ)K`.
pub fn csl_matrix(sys: &GalerkinSystem, beta: f64) -> Result<SparseComplexMatrix> {
    let shifted_b = sys.b.add_scaled(1.0, &sys.k, beta)?;
    combine_parts(&sys.l, &shifted_b, &sys.k)
}

/// The block `S(ξ̄)` shifted by `−iβ K(ξ̄)`.
pub fn mean_csl_block(sys: &GalerkinSystem, beta: f64) -> Result<SparseComplexMatrix> {
    let parts = sys.s_parts(&alloc::vec![0.0; sys.basis.dim()]);
    let shifted_b = parts.b.add_scaled(1.0, &parts.k, beta)?;
    combine_parts(&parts.l, &shifted_b, &parts.k)
}

/// Explicit `Ā = I ⊗ S(ξ̄)`.
pub fn mean_value_matrix(sys: &GalerkinSystem) -> Result<SparseComplexMatrix> {
    kron(&CsrMatrix::identity(sys.blocks()), &sys.mean_block()?)
}

/// Explicit `M₀ = I ⊗ (S(ξ̄) − iβK(ξ̄))`.
pub fn mean_csl_matrix(sys: &GalerkinSystem, beta: f64) -> Result<SparseComplexMatrix> {
    kron(&CsrMatrix::identity(sys.blocks()), &mean_csl_block(sys, beta)?)
}

/// Factors `M = A − iβK` as a whole.
pub fn build_csl(sys: &GalerkinSystem, beta: f64) -> Result<Preconditioner> {
    let m = csl_matrix(sys, beta)?;
    Ok(Preconditioner {
        kind: PreconditionerKind::Csl { beta },
        backing: Backing::Full(SparseLu::new(&m)?),
        dim: sys.dim(),
    })
}

/// Factors the single block `S(ξ̄)`.
pub fn build_mean_value(sys: &GalerkinSystem) -> Result<Preconditioner> {
    Ok(Preconditioner {
        kind: PreconditionerKind::MeanValue,
        backing: Backing::Block(SparseLu::new(&sys.mean_block()?)?),
        dim: sys.dim(),
    })
}

/// Factors the single block `S(ξ̄) − iβK(ξ̄)`.
pub fn build_mean_csl(sys: &GalerkinSystem, beta: f64) -> Result<Preconditioner> {
    Ok(Preconditioner {
        kind: PreconditionerKind::MeanCsl { beta },
        backing: Backing::Block(SparseLu::new(&mean_csl_block(sys, beta)?)?),
        dim: sys.dim(),
    })
}

/// Builds any kind.
pub fn build(sys: &GalerkinSystem, kind: PreconditionerKind) -> Result<Preconditioner> {
    match kind {
        PreconditionerKind::None => Ok(Preconditioner::identity(sys.dim())),
        PreconditionerKind::Csl { beta } => build_csl(sys, beta),
        PreconditionerKind::MeanValue => build_mean_value(sys),
        PreconditionerKind::MeanCsl { beta } => build_mean_csl(sys, beta),
    }
}

impl Preconditioner {
    /// No preconditioning.
    pub fn identity(dim: usize) -> Self {
        Self {
            kind: PreconditionerKind::None,
            backing: Backing::Identity,
            dim,
        }
    }

    /// Wraps the factorization of an arbitrary full matrix, reported as `kind`.
    pub fn from_matrix(m: &SparseComplexMatrix, kind: PreconditionerKind) -> Result<Self> {
        Ok(Self {
            kind,
            backing: Backing::Full(SparseLu::new(m)?),
            dim: m.nrows(),
        })
    }

    /// Wraps the factorization of a block `S`, applied as `I ⊗ S`.
    pub fn from_block(block: &SparseComplexMatrix, blocks: usize, kind: PreconditionerKind) -> Result<Self> {
        Ok(Self {
            kind,
            backing: Backing::Block(SparseLu::new(block)?),
            dim: block.nrows() * blocks,
        })
    }

    pub fn kind(&self) -> PreconditionerKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `P⁻¹ x`.
    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        match &self.backing {
            Backing::Identity => Ok(x.to_vec()),
            Backing::Full(lu) => lu.solve(x),
            Backing::Block(lu) => block_diag_solve(lu, x),
        }
    }

    /// `P⁻ᵀ x` (plain transpose).
    pub fn apply_transpose(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        match &self.backing {
            Backing::Identity => Ok(x.to_vec()),
            Backing::Full(lu) => lu.solve_transpose(x),
            Backing::Block(lu) => {
                let n = lu.dim();
                let mut out = Vec::with_capacity(x.len());
                for seg in x.chunks(n) {
                    out.extend(lu.solve_transpose(seg)?);
                }
                Ok(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_galerkin, BoundaryCondition, Grid};
    use crate::basis::BasisSet;
    use crate::dense::DenseLu;
    use crate::field::RandomField;

    fn system(theta: f64, q: usize, r: usize) -> GalerkinSystem {
        let g = Grid::new(1, q).unwrap();
        let f = if theta == 0.0 {
            RandomField::deterministic_1d(10.0).unwrap()
        } else {
            RandomField::constant_1d(10.0, theta).unwrap()
        };
        assemble_galerkin(&g, &f, BoundaryCondition::Absorbing, &BasisSet::new(1, r).unwrap()).unwrap()
    }

    fn probe(n: usize) -> Vec<C64> {
        (0..n).map(|i| C64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos())).collect()
    }

    fn max_diff(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    #[test]
    fn csl_structure() {
        let sys = system(0.2, 7, 2);
        assert_eq!(csl_matrix(&sys, 0.0).unwrap(), sys.a);
        let m = csl_matrix(&sys, 0.5).unwrap();
        let d = m.add_scaled(C64::new(1.0, 0.0), &sys.a, C64::new(-1.0, 0.0)).unwrap();
        // M − A = −iβK exactly
        for (i, j, v) in d.iter() {
            let k = sys.k.get(i, j);
            assert_eq!(v.re, 0.0);
            assert!((v.im + 0.5 * k).abs() <= 1e-15 * k.abs());
        }
        assert_eq!(d.nnz(), sys.k.nnz());
    }

    #[test]
    fn mean_value_round_trip() {
        let sys = system(0.2, 9, 3);
        let p = build_mean_value(&sys).unwrap();
        let abar = mean_value_matrix(&sys).unwrap();
        let x = probe(sys.dim());
        let y = p.apply(&abar.matvec(&x).unwrap()).unwrap();
        assert!(max_diff(&x, &y) <= 1e-12);
        let z = p.apply_transpose(&abar.transpose().matvec(&x).unwrap()).unwrap();
        assert!(max_diff(&x, &z) <= 1e-12);
    }

    #[test]
    fn block_application_matches_kronecker() {
        let sys = system(0.1, 7, 3);
        for (p, m) in [
            (build_mean_value(&sys).unwrap(), mean_value_matrix(&sys).unwrap()),
            (build_mean_csl(&sys, 0.5).unwrap(), mean_csl_matrix(&sys, 0.5).unwrap()),
        ] {
            let x = probe(sys.dim());
            let full = SparseLu::new(&m).unwrap().solve(&x).unwrap();
            assert!(max_diff(&full, &p.apply(&x).unwrap()) <= 1e-12);
        }
    }

    #[test]
    fn degenerate_cases() {
        let sys = system(0.1, 7, 2);
        assert_eq!(mean_csl_matrix(&sys, 0.0).unwrap(), mean_value_matrix(&sys).unwrap());
        let zero = system(0.0, 7, 2);
        assert_eq!(mean_csl_matrix(&zero, 0.5).unwrap(), csl_matrix(&zero, 0.5).unwrap());
        assert_eq!(mean_value_matrix(&zero).unwrap(), zero.a);
        let x = probe(sys.dim());
        assert_eq!(Preconditioner::identity(sys.dim()).apply(&x).unwrap(), x);
        assert!(build_mean_value(&sys).unwrap().apply(&x[1..]).is_err());
    }

    #[test]
    fn csl_against_dense_inverse() {
        let sys = system(0.3, 5, 2);
        let p = build_csl(&sys, 0.5).unwrap();
        let dense = DenseLu::new(&csl_matrix(&sys, 0.5).unwrap().to_dense().unwrap()).unwrap();
        let x = probe(sys.dim());
        let scale = dense.solve(&x).iter().fold(0.0f64, |m, v| m.max(v.norm()));
        assert!(max_diff(&dense.solve(&x), &p.apply(&x).unwrap()) <= 1e-11 * scale.max(1.0));
    }
}
