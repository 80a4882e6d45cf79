//! Finite difference discretization of the stochastic Helmholtz problem and
//! assembly of the stochastic Galerkin system `A = L − iB − K`.
//!
//! Unknowns are ordered with the chaos index outermost and the spatial index
//! inside (in 2D the `x` index runs fastest), so `A` carries `(m+1)×(m+1)`
//! blocks of the spatial size `n`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::field::{RandomField, SampledField};
use crate::sparse::{kron, BlockInfo, CsrMatrix, SparseComplexMatrix, SparseRealMatrix, ZERO_THRESHOLD};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Dirichlet,
    Absorbing,
}

/// Uniform grid on `[0, 1]^d` with `q` interior points per axis and
/// `h = 1/(q+1)`; node `j` sits at `j h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    dim: usize,
    q: usize,
}

impl Grid {
    pub fn new(dim: usize, q: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidParameter(alloc::format!("dimension must be 1 or 2, got {dim}")));
        }
        if q == 0 {
            return Err(Error::InvalidParameter("need at least one interior point".into()));
        }
        Ok(Self { dim, q })
    }

    /// Grid chosen by [`mesh_rule`] for the largest wavenumber `maxk`.
    pub fn for_wavenumber(dim: usize, maxk: f64) -> Result<Self> {
        Self::new(dim, mesh_rule(maxk)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.q + 1) as f64
    }

    /// Coordinate of node index `j` along an axis.
    pub fn coord(&self, j: usize) -> f64 {
        j as f64 / (self.q + 1) as f64
    }

    /// Unknowns per axis: `q` for Dirichlet, `q + 2` for absorbing.
    pub fn points_per_axis(&self, bc: BoundaryCondition) -> usize {
        match bc {
            BoundaryCondition::Dirichlet => self.q,
            BoundaryCondition::Absorbing => self.q + 2,
        }
    }

    /// Spatial unknowns `n`.
    pub fn unknowns(&self, bc: BoundaryCondition) -> usize {
        self.points_per_axis(bc).pow(self.dim as u32)
    }

    /// Axis node indices `(i, j)` of spatial unknown `a` (`j = 0` in 1D).
    pub fn node_indices(&self, bc: BoundaryCondition, a: usize) -> (usize, usize) {
        let per = self.points_per_axis(bc);
        let off = match bc {
            BoundaryCondition::Dirichlet => 1,
            BoundaryCondition::Absorbing => 0,
        };
        if self.dim == 1 {
            (a + off, 0)
        } else {
            (a % per + off, a / per + off)
        }
    }

    /// Index of spatial unknown `a` among all `(q+2)^d` grid nodes.
    pub fn node_of_unknown(&self, bc: BoundaryCondition, a: usize) -> usize {
        let (i, j) = self.node_indices(bc, a);
        i + (self.q + 2) * j
    }
}

/// Refinement level `max(⌈log2(15·maxk/(2π))⌉, 1)`.
pub fn mesh_level(maxk: f64) -> Result<u32> {
    if !(maxk > 0.0 && maxk.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!(
            "maximal wavenumber must be positive, got {maxk}"
        )));
    }
    let lev = (15.0 * maxk / (2.0 * core::f64::consts::PI)).log2().ceil();
    Ok(lev.max(1.0) as u32)
}

/// Interior points per axis `q = 2^lev − 1`, about 15 points per wavelength.
pub fn mesh_rule(maxk: f64) -> Result<usize> {
    Ok((1usize << mesh_level(maxk)?) - 1)
}

/// The real, wavenumber-free part of a discretization: the Laplacian `L`
/// and per-unknown weights with `B = diag(w1 k)` and `K = diag(w2 k²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialOperator {
    pub laplacian: SparseRealMatrix,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    /// grid node of each unknown
    pub nodes: Vec<usize>,
}

/// 1D second difference matrix `T` scaled by `1/h²`.
fn second_difference(grid: &Grid, bc: BoundaryCondition) -> SparseRealMatrix {
    let n = grid.points_per_axis(bc);
    let h = grid.h();
    let s = 1.0 / (h * h);
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        let corner = bc == BoundaryCondition::Absorbing && (i == 0 || i + 1 == n);
        t.push((i, i, if corner { s } else { 2.0 * s }));
        if i > 0 {
            t.push((i, i - 1, -s));
        }
        if i + 1 < n {
            t.push((i, i + 1, -s));
        }
    }
    if n == 1 {
        // single absorbing node has no neighbours, T = 0
        t.clear();
    }
    CsrMatrix::from_triplets(n, n, &t).expect("indices in range")
}

impl SpatialOperator {
    pub fn new(grid: &Grid, bc: BoundaryCondition) -> Result<Self> {
        let per = grid.points_per_axis(bc);
        let t = second_difference(grid, bc);
        let h = grid.h();
        let laplacian = match (grid.dim(), bc) {
            (1, _) => t,
            (_, BoundaryCondition::Dirichlet) => {
                let eye = CsrMatrix::identity(per);
                kron(&eye, &t)?.add_scaled(1.0, &kron(&t, &eye)?, 1.0)?
            }
            (_, BoundaryCondition::Absorbing) => {
                let mut dvec = vec![1.0; per];
                dvec[0] = 0.5;
                dvec[per - 1] = 0.5;
                let d = CsrMatrix::diagonal(&dvec);
                kron(&d, &t)?.add_scaled(1.0, &kron(&t, &d)?, 1.0)?
            }
        };
        let n = grid.unknowns(bc);
        let mut w1 = vec![0.0; n];
        let mut w2 = vec![1.0; n];
        let nodes: Vec<usize> = (0..n).map(|a| grid.node_of_unknown(bc, a)).collect();
        if bc == BoundaryCondition::Absorbing {
            let last = grid.q() + 1;
            for a in 0..n {
                let (i, j) = grid.node_indices(bc, a);
                let edge_i = i == 0 || i == last;
                let edge_j = grid.dim() == 2 && (j == 0 || j == last);
                if edge_i || edge_j {
                    w1[a] = 1.0 / h;
                }
                if edge_i {
                    w2[a] *= 0.5;
                }
                if edge_j {
                    w2[a] *= 0.5;
                }
            }
        }
        Ok(Self { laplacian, w1, w2, nodes })
    }

    pub fn len(&self) -> usize {
        self.w1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w1.is_empty()
    }
}

/// Forms `L − iB − K` entrywise from real parts of equal shape.
///
/// Every complex matrix in the crate goes through this one formula, which
/// keeps `A` at zero variance bitwise equal to `I ⊗ S(ξ̄)`.
pub fn combine_parts(l: &SparseRealMatrix, b: &SparseRealMatrix, k: &SparseRealMatrix) -> Result<SparseComplexMatrix> {
    let (nr, nc) = (l.nrows(), l.ncols());
    for m in [b, k] {
        if m.nrows() != nr || m.ncols() != nc {
            return Err(Error::DimensionMismatch {
                expected: nr * nc,
                got: m.nrows() * m.ncols(),
            });
        }
    }
    let mut row_ptr = Vec::with_capacity(nr + 1);
    let cap = l.nnz() + k.nnz();
    let mut col_idx = Vec::with_capacity(cap);
    let mut values = Vec::with_capacity(cap);
    row_ptr.push(0);
    for i in 0..nr {
        let rows = [l.row(i), b.row(i), k.row(i)];
        let mut pos = [0usize; 3];
        loop {
            let mut c = usize::MAX;
            for (r, &p) in rows.iter().zip(&pos) {
                if p < r.0.len() {
                    c = c.min(r.0[p]);
                }
            }
            if c == usize::MAX {
                break;
            }
            let mut parts = [0.0; 3];
            for ((r, p), v) in rows.iter().zip(pos.iter_mut()).zip(parts.iter_mut()) {
                if *p < r.0.len() && r.0[*p] == c {
                    *v = r.1[*p];
                    *p += 1;
                }
            }
            let z = C64::new(parts[0] - parts[2], -parts[1]);
            if z.norm() >= ZERO_THRESHOLD {
                col_idx.push(c);
                values.push(z);
            }
        }
        row_ptr.push(col_idx.len());
    }
    let mut out = CsrMatrix::from_raw(nr, nc, row_ptr, col_idx, values)?;
    if let Some(info) = l.block_info() {
        out = out.with_block_info(info)?;
    }
    Ok(out)
}

/// The three real parts `L`, `B`, `K` of a deterministic matrix `S(ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicParts {
    pub l: SparseRealMatrix,
    pub b: SparseRealMatrix,
    pub k: SparseRealMatrix,
}

impl DeterministicParts {
    pub fn matrix(&self) -> Result<SparseComplexMatrix> {
        combine_parts(&self.l, &self.b, &self.k)
    }
}

/// Parts of `S(ξ)` for a sampled field.
pub fn assemble_s_parts(op: &SpatialOperator, field: &SampledField, xi: &[f64]) -> DeterministicParts {
    let n = op.len();
    let mut bd = vec![0.0; n];
    let mut kd = vec![0.0; n];
    for a in 0..n {
        let k = field.eval(op.nodes[a], xi);
        bd[a] = op.w1[a] * k;
        kd[a] = op.w2[a] * (k * k);
    }
    DeterministicParts {
        l: op.laplacian.clone(),
        b: CsrMatrix::diagonal(&bd),
        k: CsrMatrix::diagonal(&kd),
    }
}

/// Deterministic FD matrix `S(ξ) = L − i D1(ξ) − D2(ξ)` (`D1 = 0` for Dirichlet).
pub fn assemble_s(grid: &Grid, field: &RandomField, bc: BoundaryCondition, xi: &[f64]) -> Result<SparseComplexMatrix> {
    if xi.len() != field.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: field.num_vars(),
            got: xi.len(),
        });
    }
    let op = SpatialOperator::new(grid, bc)?;
    let sampled = field.sample(grid)?;
    assemble_s_parts(&op, &sampled, xi).matrix()
}

/// Point source location as an axis node index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointSource {
    pub index: usize,
}

impl PointSource {
    /// Node at or just below the domain centre, `t = ⌈q/2⌉`.
    pub fn center(grid: &Grid) -> Self {
        Self {
            index: grid.q().div_ceil(2),
        }
    }
}

/// Right-hand side for `δ` at the source node: `1/h^d` there, zero
/// elsewhere, scaled by the boundary weights of the absorbing scheme.
pub fn assemble_rhs(grid: &Grid, bc: BoundaryCondition, source: PointSource) -> Result<Vec<f64>> {
    if source.index > grid.q() + 1 {
        return Err(Error::IndexOutOfRange {
            index: source.index,
            len: grid.q() + 2,
        });
    }
    let op = SpatialOperator::new(grid, bc)?;
    let h = grid.h();
    let value = if grid.dim() == 1 { 1.0 / h } else { 1.0 / (h * h) };
    let target = if grid.dim() == 1 {
        source.index
    } else {
        source.index + (grid.q() + 2) * source.index
    };
    Ok(op
        .nodes
        .iter()
        .zip(&op.w2)
        .map(|(&node, &w)| if node == target { w * value } else { 0.0 })
        .collect())
}

/// Stochastic Galerkin system `A V = b` with its real parts.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    /// `A = L − iB − K`, blocks `(m+1)×(m+1)` of size `n`
    pub a: SparseComplexMatrix,
    pub rhs: Vec<C64>,
    pub grid: Grid,
    pub basis: BasisSet,
    pub bc: BoundaryCondition,
    /// `I ⊗ L`
    pub l: SparseRealMatrix,
    /// `[B_ij]`, empty for Dirichlet
    pub b: SparseRealMatrix,
    /// `[C_ij]`
    pub k: SparseRealMatrix,
    pub spatial: SpatialOperator,
    pub field: SampledField,
}

impl GalerkinSystem {
    /// Spatial block size `n`.
    pub fn block_size(&self) -> usize {
        self.spatial.len()
    }

    /// Number of chaos blocks `m + 1`.
    pub fn blocks(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Parts of `S(ξ)` for the underlying field.
    pub fn s_parts(&self, xi: &[f64]) -> DeterministicParts {
        assemble_s_parts(&self.spatial, &self.field, xi)
    }

    /// `S(ξ̄)` at the mean `ξ̄ = 0`.
    pub fn mean_block(&self) -> Result<SparseComplexMatrix> {
        self.s_parts(&vec![0.0; self.basis.dim()]).matrix()
    }

    /// Chaos coefficient block `V_i` of a solution vector.
    pub fn coefficient<'a, T>(&self, v: &'a [T], i: usize) -> &'a [T] {
        let n = self.block_size();
        &v[i * n..(i + 1) * n]
    }
}

/// Assembles the stochastic Galerkin system with the closed-form chaos
/// moments of the affine field; entries vanishing by orthogonality are not
/// stored.
pub fn assemble_galerkin(grid: &Grid, field: &RandomField, bc: BoundaryCondition, basis: &BasisSet) -> Result<GalerkinSystem> {
    if basis.dim() != field.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: field.num_vars(),
            got: basis.dim(),
        });
    }
    let op = SpatialOperator::new(grid, bc)?;
    let sampled = field.sample(grid)?;
    let n = op.len();
    let m1 = basis.len();
    let big = n.checked_mul(m1).ok_or(Error::SizeOverflow {
        s: basis.dim(),
        r: basis.max_degree(),
    })?;
    let moments = basis.product_moments();

    let mut kptr = Vec::with_capacity(big + 1);
    let mut kcol = Vec::new();
    let mut kval = Vec::new();
    let mut bptr = Vec::with_capacity(big + 1);
    let mut bcol = Vec::new();
    let mut bval = Vec::new();
    kptr.push(0);
    bptr.push(0);
    let mut lin = Vec::new();
    let mut quad = Vec::new();
    for i in 0..m1 {
        let cols = moments.row(i);
        lin.resize(cols.len(), 0.0);
        quad.resize(cols.len(), 0.0);
        for a in 0..n {
            let node = op.nodes[a];
            moments.affine_coupling_row(i, sampled.mean(node), sampled.fluctuations(node), &mut lin, &mut quad);
            for (t, &j) in cols.iter().enumerate() {
                let kv = op.w2[a] * quad[t];
                if kv.abs() >= ZERO_THRESHOLD {
                    kcol.push(j * n + a);
                    kval.push(kv);
                }
                let bv = op.w1[a] * lin[t];
                if bv.abs() >= ZERO_THRESHOLD {
                    bcol.push(j * n + a);
                    bval.push(bv);
                }
            }
            kptr.push(kcol.len());
            bptr.push(bcol.len());
        }
    }
    let info = BlockInfo { count: m1, size: n };
    let k = CsrMatrix::from_raw(big, big, kptr, kcol, kval)?.with_block_info(info)?;
    let b = CsrMatrix::from_raw(big, big, bptr, bcol, bval)?.with_block_info(info)?;
    let l = kron(&CsrMatrix::identity(m1), &op.laplacian)?;
    let a = combine_parts(&l, &b, &k)?;
    let f = assemble_rhs(grid, bc, PointSource::center(grid))?;
    let mut rhs = vec![C64::new(0.0, 0.0); big];
    for (r, v) in rhs.iter_mut().zip(&f) {
        *r = C64::new(*v, 0.0);
    }
    Ok(GalerkinSystem {
        a,
        rhs,
        grid: *grid,
        basis: basis.clone(),
        bc,
        l,
        b,
        k,
        spatial: op,
        field: sampled,
    })
}

/// Galerkin projection first, finite differences second (1D only).
///
/// The coupled system `−v_j'' − Σ_i c_ij v_i = F_j` with boundary couplings
/// `b_ij` is discretized directly, with `c_ij(x) = ⟨k² φ_i, φ_j⟩` and
/// `b_ij(x) = ⟨k φ_i, φ_j⟩` computed by quadrature at each grid point.
/// Returns the matrix and right-hand side.
pub fn assemble_galerkin_then_fd_1d(
    grid: &Grid,
    field: &RandomField,
    bc: BoundaryCondition,
    basis: &BasisSet,
) -> Result<(SparseComplexMatrix, Vec<C64>)> {
    if grid.dim() != 1 || field.dim() != 1 {
        return Err(Error::InvalidParameter("the projected system is only discretized in 1D".into()));
    }
    let q = grid.q();
    let h = grid.h();
    let m1 = basis.len();
    let s = field.num_vars();
    let (first, last) = match bc {
        BoundaryCondition::Dirichlet => (1, q),
        BoundaryCondition::Absorbing => (0, q + 1),
    };
    let per = last - first + 1;
    let big = per * m1;
    let mut trip: Vec<(usize, usize, C64)> = Vec::new();
    let mut rhs = vec![C64::new(0.0, 0.0); big];
    let t = PointSource::center(grid).index;
    let mut kl = vec![0.0; s];
    for node in first..=last {
        let x = [grid.coord(node)];
        let k0 = field.coefficients(&x, &mut kl);
        let keval = |xi: &[f64]| k0 + kl.iter().zip(xi).map(|(c, z)| c * z).sum::<f64>();
        let c = basis.project_scalar(|xi| keval(xi).powi(2), Some(2));
        let bmat = basis.project_scalar(keval, Some(1));
        let row_in_block = node - first;
        let boundary = bc == BoundaryCondition::Absorbing && (node == 0 || node == q + 1);
        for j in 0..m1 {
            let row = j * per + row_in_block;
            let inv_h2 = 1.0 / (h * h);
            if boundary {
                // (v_j(x0) − v_j(x1))/h² − (i/h) Σ b_ij v_i − ½ Σ c_ij v_i = F_j/2
                let nb = if node == 0 { row + 1 } else { row - 1 };
                trip.push((row, row, C64::new(inv_h2, 0.0)));
                trip.push((row, nb, C64::new(-inv_h2, 0.0)));
                for i in 0..m1 {
                    let col = i * per + row_in_block;
                    trip.push((row, col, C64::new(-0.5 * c[(i, j)], -bmat[(i, j)] / h)));
                }
            } else {
                trip.push((row, row, C64::new(2.0 * inv_h2, 0.0)));
                if node > first {
                    trip.push((row, row - 1, C64::new(-inv_h2, 0.0)));
                }
                if node < last {
                    trip.push((row, row + 1, C64::new(-inv_h2, 0.0)));
                }
                for i in 0..m1 {
                    let col = i * per + row_in_block;
                    trip.push((row, col, C64::new(-c[(i, j)], 0.0)));
                }
            }
        }
        if node == t {
            let w = if boundary { 0.5 } else { 1.0 };
            rhs[row_in_block] = C64::new(w / h, 0.0);
        }
    }
    let a = CsrMatrix::from_triplets(big, big, &trip)?.with_block_info(BlockInfo { count: m1, size: per })?;
    Ok((a, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{hermitian_eigenvalues, DenseMatrix};

    fn dense_real(m: &SparseRealMatrix) -> DenseMatrix<f64> {
        m.to_dense().unwrap()
    }

    #[test]
    fn mesh_rule_values() {
        assert_eq!(mesh_rule(33.0).unwrap(), 127);
        assert_eq!(mesh_level(33.0).unwrap(), 7);
        assert_eq!(mesh_rule(55.0).unwrap(), 255);
        // 15/(2π) > 2, so the floor of one level only applies below maxk ≈ 0.84
        assert_eq!(mesh_rule(1.0).unwrap(), 3);
        assert_eq!(mesh_level(0.3).unwrap(), 1);
        assert_eq!(mesh_rule(0.3).unwrap(), 1);
        assert_eq!(mesh_rule(110.0).unwrap(), 511);
        assert_eq!(mesh_rule(16.5).unwrap(), 63);
        assert_eq!(mesh_rule(165.0).unwrap(), 511);
        assert!(mesh_rule(0.0).is_err());
        let g = Grid::for_wavenumber(2, 33.0).unwrap();
        assert_eq!(g.unknowns(BoundaryCondition::Absorbing), 16641);
    }

    #[test]
    fn dirichlet_laplacian_without_wavenumber() {
        let g = Grid::new(1, 3).unwrap();
        let op = SpatialOperator::new(&g, BoundaryCondition::Dirichlet).unwrap();
        let t = dense_real(&op.laplacian);
        let s = 16.0;
        let expect = DenseMatrix::from_rows(&[&[2.0 * s, -s, 0.0], &[-s, 2.0 * s, -s], &[0.0, -s, 2.0 * s]]);
        assert_eq!(t, expect);
        assert_eq!(op.w1, vec![0.0; 3]);
        assert_eq!(op.w2, vec![1.0; 3]);
    }

    #[test]
    fn absorbing_laplacian_corners_and_kernel() {
        let g = Grid::new(1, 3).unwrap();
        let op = SpatialOperator::new(&g, BoundaryCondition::Absorbing).unwrap();
        let t = dense_real(&op.laplacian);
        assert_eq!(t[(0, 0)], 16.0);
        assert_eq!(t[(4, 4)], 16.0);
        assert_eq!(t[(2, 2)], 32.0);
        // all-ones vector spans the kernel
        let ones = vec![1.0; 5];
        assert!(t.matvec(&ones).iter().all(|v| *v == 0.0));
        let ev = hermitian_eigenvalues(&t.to_complex()).unwrap();
        assert!(ev[0].abs() < 1e-12 && ev[1] > 1e-6);
        assert_eq!(op.w1, vec![4.0, 0.0, 0.0, 0.0, 4.0]);
        assert_eq!(op.w2, vec![0.5, 1.0, 1.0, 1.0, 0.5]);
    }

    #[test]
    fn two_dimensional_weights() {
        let g = Grid::new(2, 2).unwrap();
        let op = SpatialOperator::new(&g, BoundaryCondition::Absorbing).unwrap();
        assert_eq!(op.len(), 16);
        // corner, edge, interior
        assert_eq!((op.w1[0], op.w2[0]), (3.0, 0.25));
        assert_eq!((op.w1[1], op.w2[1]), (3.0, 0.5));
        assert_eq!((op.w1[5], op.w2[5]), (0.0, 1.0));
        let l = dense_real(&op.laplacian);
        assert!(l.is_symmetric(0.0));
        let d = SpatialOperator::new(&g, BoundaryCondition::Dirichlet).unwrap();
        assert_eq!(d.laplacian.nrows(), 4);
        assert_eq!(d.nodes, vec![5, 6, 9, 10]);
    }

    #[test]
    fn rhs_point_sources() {
        let g = Grid::new(1, 7).unwrap();
        let t = PointSource::center(&g);
        assert_eq!(t.index, 4);
        assert_eq!(g.coord(4), 0.5);
        let b = assemble_rhs(&g, BoundaryCondition::Absorbing, t).unwrap();
        assert_eq!(b[4], 8.0);
        assert_eq!(b.iter().filter(|v| **v != 0.0).count(), 1);
        let b = assemble_rhs(&g, BoundaryCondition::Dirichlet, t).unwrap();
        assert_eq!(b[3], 8.0);
        let g4 = Grid::new(1, 4).unwrap();
        let t4 = PointSource::center(&g4);
        assert_eq!(t4.index, 2);
        assert!((g4.coord(2) - (0.5 - g4.h() / 2.0)).abs() < 1e-15);
        let g2 = Grid::new(2, 3).unwrap();
        let b = assemble_rhs(&g2, BoundaryCondition::Absorbing, PointSource::center(&g2)).unwrap();
        assert_eq!(b[2 + 5 * 2], 16.0);
        // boundary sources pick up the weights, a quarter at corners
        let b = assemble_rhs(&g2, BoundaryCondition::Absorbing, PointSource { index: 0 }).unwrap();
        assert_eq!(b[0], 4.0);
    }

    #[test]
    fn zero_variance_is_block_diagonal() {
        let g = Grid::new(1, 7).unwrap();
        let f = RandomField::deterministic_1d(12.0).unwrap();
        let basis = BasisSet::new(1, 3).unwrap();
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Absorbing] {
            let sys = assemble_galerkin(&g, &f, bc, &basis).unwrap();
            let s0 = sys.mean_block().unwrap();
            let expect = kron(&CsrMatrix::identity(4), &s0).unwrap();
            assert_eq!(sys.a, expect);
        }
    }

    #[test]
    fn parts_recombine() {
        let g = Grid::new(1, 5).unwrap();
        let f = RandomField::constant_1d(9.0, 0.3).unwrap();
        let basis = BasisSet::new(1, 4).unwrap();
        let sys = assemble_galerkin(&g, &f, BoundaryCondition::Absorbing, &basis).unwrap();
        let a = sys.a.to_dense().unwrap();
        let (l, b, k) = (dense_real(&sys.l), dense_real(&sys.b), dense_real(&sys.k));
        for j in 0..a.cols() {
            for i in 0..a.rows() {
                assert_eq!(a[(i, j)], C64::new(l[(i, j)] - k[(i, j)], -b[(i, j)]));
            }
        }
        assert_eq!(sys.a.transpose(), sys.a);
        assert!(sys.rhs[sys.block_size()..].iter().all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn constant_wavenumber_factorizes() {
        // with k independent of x the couplings are Kronecker products
        let g = Grid::new(1, 6).unwrap();
        let f = RandomField::constant_1d(7.0, 0.4).unwrap();
        let basis = BasisSet::new(1, 3).unwrap();
        let sys = assemble_galerkin(&g, &f, BoundaryCondition::Absorbing, &basis).unwrap();
        let kx = |x: &[f64]| 7.0 * (1.0 + 0.4 * x[0]);
        let bm = basis.project_scalar(kx, Some(1));
        let cm = basis.project_scalar(|x| kx(x).powi(2), Some(2));
        let n = sys.block_size();
        let h = g.h();
        let mut d1 = vec![0.0; n];
        d1[0] = 1.0 / h;
        d1[n - 1] = 1.0 / h;
        let mut d2 = vec![1.0; n];
        d2[0] = 0.5;
        d2[n - 1] = 0.5;
        let bexp = kron(&CsrMatrix::from_dense(&bm), &CsrMatrix::diagonal(&d1))
            .unwrap()
            .to_dense()
            .unwrap();
        let kexp = kron(&CsrMatrix::from_dense(&cm), &CsrMatrix::diagonal(&d2))
            .unwrap()
            .to_dense()
            .unwrap();
        assert!(bexp.sub(&dense_real(&sys.b)).max_abs() < 1e-12 * bexp.max_abs());
        assert!(kexp.sub(&dense_real(&sys.k)).max_abs() < 1e-12 * kexp.max_abs());
    }

    #[test]
    fn chaos_bandwidth() {
        let g = Grid::new(1, 4).unwrap();
        let f = RandomField::constant_1d(5.0, 0.5).unwrap();
        let basis = BasisSet::new(1, 6).unwrap();
        let sys = assemble_galerkin(&g, &f, BoundaryCondition::Absorbing, &basis).unwrap();
        let n = sys.block_size();
        for (r, c, _) in sys.b.iter() {
            assert!((r / n).abs_diff(c / n) <= 1);
        }
        for (r, c, _) in sys.k.iter() {
            assert!((r / n).abs_diff(c / n) <= 2);
        }
    }

    #[test]
    fn definiteness_of_parts() {
        let g = Grid::new(1, 5).unwrap();
        let f = RandomField::constant_1d(6.0, 0.3).unwrap();
        let basis = BasisSet::new(1, 3).unwrap();
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Absorbing] {
            let sys = assemble_galerkin(&g, &f, bc, &basis).unwrap();
            let eig = |m: &SparseRealMatrix| hermitian_eigenvalues(&m.to_dense().unwrap().to_complex()).unwrap();
            assert!(eig(&sys.k)[0] > 0.0);
            let le = eig(&sys.l);
            let be = eig(&sys.b);
            assert!(le[0] > -1e-10 && be[0] > -1e-10);
            if bc == BoundaryCondition::Dirichlet {
                assert!(le[0] > 1.0);
                assert_eq!(sys.b.nnz(), 0);
            }
        }
    }

    #[test]
    fn projection_first_agrees() {
        let g = Grid::new(1, 7).unwrap();
        let f = RandomField::constant_1d(20.0, 0.1).unwrap();
        let basis = BasisSet::new(1, 2).unwrap();
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Absorbing] {
            let sys = assemble_galerkin(&g, &f, bc, &basis).unwrap();
            let (a2, b2) = assemble_galerkin_then_fd_1d(&g, &f, bc, &basis).unwrap();
            let d = sys.a.add_scaled(C64::new(1.0, 0.0), &a2, C64::new(-1.0, 0.0)).unwrap();
            assert!(d.max_abs() <= 1e-14 * sys.a.max_abs());
            assert_eq!(b2, sys.rhs);
        }
    }
}
