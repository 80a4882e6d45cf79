//! Orthonormal Legendre chaos for independent uniform variables on `[-1,1]^s`.
//!
//! The inner product is `⟨f,g⟩ = ∫ f g ρ dξ` with the uniform density
//! `ρ ≡ 2^{-s}`. Univariate factors are `P̂_n = √(2n+1) P_n`, so that
//! `⟨P̂_n, P̂_n⟩ = 1` under the density `1/2`. Multivariate basis functions are
//! tensor products indexed by multi-indices of total degree at most `r`, in
//! graded order: total degree first, then lexicographically descending
//! (`(1,0,0)` precedes `(0,1,0)`).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Per-variable polynomial degrees of one basis function.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(degrees: Vec<u32>) -> Self {
        Self(degrees)
    }

    pub fn degrees(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// A tensor quadrature rule for the probability density on `[-1,1]^s`.
///
/// `points` is stored point-major: point `q` occupies
/// `points[q*dim..(q+1)*dim]`. Weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub dim: usize,
    pub nodes_per_dim: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Tensor Gauss–Legendre rule with `n` nodes per dimension.
    pub fn tensor_gauss_legendre(dim: usize, n: usize) -> Self {
        let (x1, w1) = gauss_legendre(n);
        let total = n.pow(dim as u32);
        let mut points = Vec::with_capacity(total * dim);
        let mut weights = Vec::with_capacity(total);
        let mut digits = vec![0usize; dim];
        for _ in 0..total {
            let mut w = 1.0;
            for &d in &digits {
                points.push(x1[d]);
                w *= 0.5 * w1[d];
            }
            weights.push(w);
            // odometer, last variable fastest
            for slot in digits.iter_mut().rev() {
                *slot += 1;
                if *slot < n {
                    break;
                }
                *slot = 0;
            }
        }
        Self {
            dim,
            nodes_per_dim: n,
            points,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, q: usize) -> &[f64] {
        &self.points[q * self.dim..(q + 1) * self.dim]
    }

    /// `∫ g ρ dξ` by the rule.
    pub fn integrate(&self, mut g: impl FnMut(&[f64]) -> f64) -> f64 {
        (0..self.len()).map(|q| self.weights[q] * g(self.point(q))).sum()
    }
}

/// Gauss–Legendre nodes and weights on `[-1,1]` (weights sum to 2).
///
/// Nodes are ascending and exactly antisymmetric: `x[i] == -x[n-1-i]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Newton from the Chebyshev-type initial guess, largest root first.
        let mut z = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[n - 1 - i] = z;
        x[i] = -z;
        w[n - 1 - i] = weight;
        w[i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Classical Legendre `P_n(z)` and `P_n'(z)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * z * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Orthonormal univariate values `P̂_0(x), …, P̂_{out.len()-1}(x)`.
pub fn legendre_orthonormal(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut p_prev = 1.0;
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    let mut p = x;
    out[1] = 3.0.sqrt() * x;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
        out[k + 1] = (2.0 * kf + 3.0).sqrt() * p;
    }
}

/// `⟨ξ P̂_a, P̂_b⟩` for the density `1/2` on `[-1,1]`.
pub fn univariate_linear_moment(a: u32, b: u32) -> f64 {
    let lo = a.min(b);
    if a.abs_diff(b) != 1 {
        return 0.0;
    }
    let n = lo as f64;
    (n + 1.0) / ((2.0 * n + 1.0) * (2.0 * n + 3.0)).sqrt()
}

/// `⟨ξ² P̂_a, P̂_b⟩` for the density `1/2` on `[-1,1]`.
pub fn univariate_quadratic_moment(a: u32, b: u32) -> f64 {
    // ξ P̂_a lies in span{P̂_{a-1}, P̂_{a+1}}, so ⟨ξP̂_a, ξP̂_b⟩ is a finite sum.
    let mut acc = 0.0;
    for c in [a.checked_sub(1), Some(a + 1)].into_iter().flatten() {
        acc += univariate_linear_moment(a, c) * univariate_linear_moment(c, b);
    }
    acc
}

fn binomial_checked(n: usize, k: usize) -> Option<usize> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    usize::try_from(acc).ok()
}

/// Number of multivariate polynomials in `s` variables of total degree ≤ `r`.
pub fn basis_cardinality(s: usize, r: usize) -> Result<usize> {
    let n = s.checked_add(r).ok_or(Error::SizeOverflow { s, r })?;
    binomial_checked(n, r).ok_or(Error::SizeOverflow { s, r })
}

/// Multi-indices of exact total degree `d` in `s` variables, lexicographically
/// descending.
fn indices_of_degree(s: usize, d: u32, out: &mut Vec<MultiIndex>) {
    fn rec(prefix: &mut Vec<u32>, remaining: u32, slots: usize, out: &mut Vec<MultiIndex>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=remaining).rev() {
            prefix.push(first);
            rec(prefix, remaining - first, slots - 1, out);
            prefix.pop();
        }
    }
    let mut prefix = Vec::with_capacity(s);
    rec(&mut prefix, d, s, out);
}

/// Truncated orthonormal chaos basis of total degree ≤ `r` in `s` variables.
#[derive(Debug, Clone)]
pub struct BasisSet {
    s: usize,
    r: usize,
    indices: Vec<MultiIndex>,
    lookup: BTreeMap<MultiIndex, usize>,
    quad: QuadratureRule,
}

impl BasisSet {
    /// Builds the basis with its default quadrature, which integrates
    /// `g·φ_i·φ_j` exactly for `g` quadratic in ξ.
    pub fn new(s: usize, r: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParameter("basis needs s >= 1".into()));
        }
        let count = basis_cardinality(s, r)?;
        let mut indices = Vec::with_capacity(count);
        for d in 0..=r as u32 {
            indices_of_degree(s, d, &mut indices);
        }
        debug_assert_eq!(indices.len(), count);
        let lookup = indices.iter().enumerate().map(|(i, mi)| (mi.clone(), i)).collect();
        let quad = QuadratureRule::tensor_gauss_legendre(s, Self::nodes_for_degree(r, 2));
        Ok(Self {
            s,
            r,
            indices,
            lookup,
            quad,
        })
    }

    /// Gauss–Legendre nodes per dimension that make `g·φ_i·φ_j` exact when
    /// `g` has degree `g_degree` in each variable.
    pub fn nodes_for_degree(r: usize, g_degree: usize) -> usize {
        (2 * r + g_degree + 1).div_ceil(2).max(1)
    }

    pub fn dim(&self) -> usize {
        self.s
    }

    pub fn max_degree(&self) -> usize {
        self.r
    }

    /// Number of basis functions `m + 1`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index_of(&self, mi: &MultiIndex) -> Option<usize> {
        self.lookup.get(mi).copied()
    }

    /// Total degree of basis function `i`.
    pub fn degree_of(&self, i: usize) -> u32 {
        self.indices[i].total_degree()
    }

    pub fn quadrature(&self) -> &QuadratureRule {
        &self.quad
    }

    /// `φ_i(ξ)`.
    pub fn eval(&self, i: usize, xi: &[f64]) -> Result<f64> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.len() });
        }
        if xi.len() != self.s {
            return Err(Error::DimensionMismatch {
                expected: self.s,
                got: xi.len(),
            });
        }
        let mut buf = vec![0.0; self.r + 1];
        let mut value = 1.0;
        for (&deg, &x) in self.indices[i].degrees().iter().zip(xi) {
            legendre_orthonormal(x, &mut buf[..=deg as usize]);
            value *= buf[deg as usize];
        }
        Ok(value)
    }

    /// All `φ_0(ξ), …, φ_m(ξ)` into `out`.
    pub fn eval_all(&self, xi: &[f64], out: &mut [f64]) {
        assert_eq!(xi.len(), self.s);
        assert_eq!(out.len(), self.len());
        let stride = self.r + 1;
        let mut table = vec![0.0; stride * self.s];
        for (d, &x) in xi.iter().enumerate() {
            legendre_orthonormal(x, &mut table[d * stride..(d + 1) * stride]);
        }
        for (o, mi) in out.iter_mut().zip(&self.indices) {
            *o = mi
                .degrees()
                .iter()
                .enumerate()
                .map(|(d, &deg)| table[d * stride + deg as usize])
                .product();
        }
    }

    /// Galerkin projection `[⟨g φ_j, φ_i⟩]_{ij}` of a scalar function.
    ///
    /// `g_degree` is the per-variable polynomial degree of `g` when known; the
    /// quadrature is then exact. `None` uses `2(r+4)` nodes per dimension.
    pub fn project_scalar(&self, g: impl FnMut(&[f64]) -> f64, g_degree: Option<usize>) -> DenseMatrix<f64> {
        let nodes = match g_degree {
            Some(d) => Self::nodes_for_degree(self.r, d),
            None => 2 * (self.r + 4),
        };
        if nodes == self.quad.nodes_per_dim {
            self.project_with_rule(g, &self.quad)
        } else {
            let rule = QuadratureRule::tensor_gauss_legendre(self.s, nodes);
            self.project_with_rule(g, &rule)
        }
    }

    /// Galerkin projection with an explicit quadrature rule.
    pub fn project_with_rule(&self, mut g: impl FnMut(&[f64]) -> f64, rule: &QuadratureRule) -> DenseMatrix<f64> {
        assert_eq!(rule.dim, self.s);
        let m1 = self.len();
        let mut out = DenseMatrix::<f64>::zeros(m1, m1);
        let mut phi = vec![0.0; m1];
        for q in 0..rule.len() {
            let xi = rule.point(q);
            let gw = rule.weights[q] * g(xi);
            if gw == 0.0 {
                continue;
            }
            self.eval_all(xi, &mut phi);
            for j in 0..m1 {
                let fj = gw * phi[j];
                for i in j..m1 {
                    out[(i, j)] += fj * phi[i];
                }
            }
        }
        for j in 0..m1 {
            for i in j + 1..m1 {
                out[(j, i)] = out[(i, j)];
            }
        }
        out
    }

    /// `Σ_{i,j} ‖φ_i φ_j‖²_{L²}`, computed with a rule exact for degree `4r`.
    pub fn product_norm_sum(&self) -> f64 {
        let rule = QuadratureRule::tensor_gauss_legendre(self.s, 2 * self.r + 1);
        let mut phi = vec![0.0; self.len()];
        let mut total = 0.0;
        for q in 0..rule.len() {
            self.eval_all(rule.point(q), &mut phi);
            let sq: f64 = phi.iter().map(|v| v * v).sum();
            total += rule.weights[q] * sq * sq;
        }
        total
    }

    /// Exact triple-product tables for affine wavenumbers, see [`ProductMoments`].
    pub fn product_moments(&self) -> ProductMoments {
        ProductMoments::new(self)
    }
}

/// Sparse tables of `⟨ξ_ℓ φ_j, φ_i⟩` and `⟨ξ_ℓ ξ_ℓ' φ_j, φ_i⟩`.
///
/// Entries are formed from the closed-form univariate moments, so entries
/// that vanish by orthogonality are exactly zero and absent from the pattern.
/// All tables share one CSR pattern over `(m+1)×(m+1)`.
#[derive(Debug, Clone)]
pub struct ProductMoments {
    s: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    identity: Vec<f64>,
    linear: Vec<Vec<f64>>,
    /// Upper-triangular pairs `(ℓ, ℓ')`, `ℓ ≤ ℓ'`, row-major.
    quadratic: Vec<Vec<f64>>,
}

impl ProductMoments {
    fn new(basis: &BasisSet) -> Self {
        let s = basis.dim();
        let m1 = basis.len();
        let pairs = s * (s + 1) / 2;
        let mut row_ptr = Vec::with_capacity(m1 + 1);
        let mut col_idx = Vec::new();
        let mut identity = Vec::new();
        let mut linear = vec![Vec::new(); s];
        let mut quadratic = vec![Vec::new(); pairs];
        row_ptr.push(0);
        let mut cand: Vec<usize> = Vec::new();
        for alpha in basis.indices() {
            cand.clear();
            let a = alpha.degrees();
            let push = |deltas: &[(usize, i32)], cand: &mut Vec<usize>| {
                let mut beta: Vec<u32> = a.to_vec();
                for &(var, dlt) in deltas {
                    let v = beta[var] as i32 + dlt;
                    if v < 0 {
                        return;
                    }
                    beta[var] = v as u32;
                }
                if let Some(j) = basis.index_of(&MultiIndex(beta)) {
                    cand.push(j);
                }
            };
            push(&[], &mut cand);
            for l in 0..s {
                for d in [-2, -1, 1, 2] {
                    push(&[(l, d)], &mut cand);
                }
                for l2 in l + 1..s {
                    for d1 in [-1, 1] {
                        for d2 in [-1, 1] {
                            push(&[(l, d1), (l2, d2)], &mut cand);
                        }
                    }
                }
            }
            cand.sort_unstable();
            cand.dedup();
            for &j in &cand {
                let b = basis.indices()[j].degrees();
                let same_except = |skip: &[usize]| (0..s).all(|d| skip.contains(&d) || a[d] == b[d]);
                col_idx.push(j);
                identity.push(if a == b { 1.0 } else { 0.0 });
                for (l, table) in linear.iter_mut().enumerate() {
                    let v = if same_except(&[l]) {
                        univariate_linear_moment(a[l], b[l])
                    } else {
                        0.0
                    };
                    table.push(v);
                }
                let mut p = 0;
                for l in 0..s {
                    for l2 in l..s {
                        let v = if l == l2 {
                            if same_except(&[l]) {
                                univariate_quadratic_moment(a[l], b[l])
                            } else {
                                0.0
                            }
                        } else if same_except(&[l, l2]) {
                            univariate_linear_moment(a[l], b[l]) * univariate_linear_moment(a[l2], b[l2])
                        } else {
                            0.0
                        };
                        quadratic[p].push(v);
                        p += 1;
                    }
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            s,
            row_ptr,
            col_idx,
            identity,
            linear,
            quadratic,
        }
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn nrows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    /// `⟨k φ_j, φ_i⟩` and `⟨k² φ_j, φ_i⟩` over the shared pattern for
    /// `k(ξ) = k0 + Σ_ℓ kl[ℓ] ξ_ℓ`.
    pub fn affine_coupling(&self, k0: f64, kl: &[f64], lin: &mut [f64], quad: &mut [f64]) {
        assert_eq!(lin.len(), self.nnz());
        assert_eq!(quad.len(), self.nnz());
        for i in 0..self.nrows() {
            let range = self.row_ptr[i]..self.row_ptr[i + 1];
            self.affine_coupling_row(i, k0, kl, &mut lin[range.clone()], &mut quad[range]);
        }
    }

    /// Row `i` of [`ProductMoments::affine_coupling`], columns `row(i)`.
    pub fn affine_coupling_row(&self, i: usize, k0: f64, kl: &[f64], lin: &mut [f64], quad: &mut [f64]) {
        assert_eq!(kl.len(), self.s);
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        assert_eq!(lin.len(), range.len());
        assert_eq!(quad.len(), range.len());
        let k0sq = k0 * k0;
        for (t, p) in range.clone().enumerate() {
            lin[t] = k0 * self.identity[p];
            quad[t] = k0sq * self.identity[p];
        }
        for (l, &c) in kl.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let table = &self.linear[l][range.clone()];
            for t in 0..table.len() {
                lin[t] += c * table[t];
                quad[t] += 2.0 * k0 * c * table[t];
            }
        }
        let mut pair = 0;
        for l in 0..self.s {
            for l2 in l..self.s {
                let weight = if l == l2 { kl[l] * kl[l] } else { 2.0 * kl[l] * kl[l2] };
                if weight != 0.0 {
                    let table = &self.quadratic[pair][range.clone()];
                    for t in 0..table.len() {
                        quad[t] += weight * table[t];
                    }
                }
                pair += 1;
            }
        }
    }

    /// Column indices of row `i`.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }
}
