//! Stochastic Galerkin discretization of the Helmholtz equation
//! `-Δu - k(x,ξ)² u = f` with a random, affine-in-ξ wavenumber.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the whole numerical
//! pipeline:
//!
//! * [`basis`]: orthonormal multivariate Legendre chaos for uniform variables
//!   on `[-1,1]^s` and tensor Gauss–Legendre projection.
//! * [`field`]: random wavenumber fields sampled on finite-difference grids.
//! * [`sparse`]: CSR matrices, Kronecker products and a sparse LU with a
//!   minimum-degree ordering.
//! * [`assembly`]: the finite-difference matrices `S(ξ)` and the Galerkin
//!   system `A = L - iB - K` in 1D/2D with Dirichlet or absorbing boundaries.
//! * [`precond`]: complex shifted Laplace, mean value and mean value CSL
//!   preconditioners.
//! * [`krylov`]: full GMRES, the mean-value stationary iteration and a direct
//!   solve.
//! * [`spectra`]: dense eigenvalues, condition numbers and the spectral and
//!   Frobenius-norm checks for the preconditioned operators.
//!
//! Everything that needs a clock, a file system or threads lives in the
//! companion `sghelm` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod assembly;
pub mod basis;
pub mod dense;
pub mod error;
pub mod field;
pub mod krylov;
pub mod precond;
pub mod scalar;
pub mod sparse;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
