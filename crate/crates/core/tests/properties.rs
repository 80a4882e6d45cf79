use proptest::prelude::*;

use sghelm_core::assembly::{assemble_galerkin, BoundaryCondition, Grid};
use sghelm_core::basis::BasisSet;
use sghelm_core::dense::{DenseLu, DenseMatrix};
use sghelm_core::field::RandomField;
use sghelm_core::krylov::{gmres, Side};
use sghelm_core::precond::{build, Preconditioner, PreconditionerKind};
use sghelm_core::sparse::{block_diag_solve, kron, CsrMatrix, SparseComplexMatrix, SparseLu};
use sghelm_core::spectra::mobius;
use sghelm_core::C64;

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

fn max_abs(a: &[C64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.norm()))
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex(), n)
}

/// Random sparse `n×n` matrix with a dominant diagonal, so it is nonsingular.
fn sparse_matrix(n: usize) -> impl Strategy<Value = SparseComplexMatrix> {
    prop::collection::vec((0..n, 0..n, complex()), 0..3 * n).prop_flat_map(move |off| {
        vector(n).prop_map(move |diag| {
            let mut t: Vec<_> = off.clone();
            for (i, d) in diag.iter().enumerate() {
                t.push((i, i, *d + C64::new(4.0 * n as f64, 0.0)));
            }
            CsrMatrix::from_triplets(n, n, &t).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_identity_acts_blockwise((s, blocks, x) in (1usize..7).prop_flat_map(|n| (sparse_matrix(n), 1usize..5))
        .prop_flat_map(|(s, m)| { let n = s.nrows(); (Just(s), Just(m), vector(n * m)) }))
    {
        let n = s.nrows();
        let big = kron(&CsrMatrix::identity(blocks), &s).unwrap();
        let y = big.matvec(&x).unwrap();
        for (seg, out) in x.chunks(n).zip(y.chunks(n)) {
            prop_assert_eq!(s.matvec(seg).unwrap(), out.to_vec());
        }
    }

    #[test]
    fn lu_is_left_and_right_inverse((a, x) in (1usize..25).prop_flat_map(|n| (sparse_matrix(n), vector(n)))) {
        let lu = SparseLu::new(&a).unwrap();
        let scale = max_abs(&x).max(1e-300);
        let y = lu.solve(&a.matvec(&x).unwrap()).unwrap();
        prop_assert!(max_diff(&y, &x) <= 1e-10 * scale);
        let z = a.matvec(&lu.solve(&x).unwrap()).unwrap();
        prop_assert!(max_diff(&z, &x) <= 1e-10 * scale);
        let w = lu.solve_transpose(&a.transpose().matvec(&x).unwrap()).unwrap();
        prop_assert!(max_diff(&w, &x) <= 1e-10 * scale);
    }

    #[test]
    fn block_solve_matches_full_factorization((s, blocks, x) in (1usize..8).prop_flat_map(|n| (sparse_matrix(n), 1usize..4))
        .prop_flat_map(|(s, m)| { let n = s.nrows(); (Just(s), Just(m), vector(n * m)) }))
    {
        let full = SparseLu::new(&kron(&CsrMatrix::identity(blocks), &s).unwrap()).unwrap();
        let block = SparseLu::new(&s).unwrap();
        let a = full.solve(&x).unwrap();
        let b = block_diag_solve(&block, &x).unwrap();
        prop_assert!(max_diff(&a, &b) <= 1e-12 * max_abs(&a).max(1.0));
    }

    #[test]
    fn frobenius_of_kron_identity((s, blocks) in (1usize..8).prop_flat_map(|n| (sparse_matrix(n), 1usize..6))) {
        let big = kron(&CsrMatrix::identity(blocks), &s).unwrap();
        let expect = (blocks as f64).sqrt() * s.frobenius_norm();
        prop_assert!((big.frobenius_norm() - expect).abs() <= 1e-13 * expect);
        // and for an explicitly inverted block
        let inv = DenseLu::new(&s.to_dense().unwrap()).unwrap().inverse();
        let inv_sparse = CsrMatrix::from_dense(&inv);
        let big_inv = kron(&CsrMatrix::identity(blocks), &inv_sparse).unwrap();
        let expect = (blocks as f64).sqrt() * inv.frobenius_norm();
        prop_assert!((big_inv.frobenius_norm() - expect).abs() <= 1e-13 * expect);
    }

    #[test]
    fn matvec_matches_dense(a in (1usize..10).prop_flat_map(sparse_matrix), seed in vector(10)) {
        let n = a.nrows();
        let x = &seed[..n];
        let dense: DenseMatrix<C64> = a.to_dense().unwrap();
        let y = a.matvec(x).unwrap();
        let z = dense.matvec(x);
        prop_assert!(max_diff(&y, &z) <= 1e-15 * max_abs(&z).max(1.0) * n as f64);
    }

    #[test]
    fn gmres_history_is_monotone((a, b) in (2usize..20).prop_flat_map(|n| (sparse_matrix(n), vector(n)))) {
        prop_assume!(max_abs(&b) > 1e-3);
        let n = a.nrows();
        let rep = gmres(&a, &b, &Preconditioner::identity(n), Side::None, 1e-12, n).unwrap();
        for w in rep.residual_history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        prop_assert!(!rep.converged || rep.final_residual <= 1e-12);
        let right = gmres(&a, &b, &Preconditioner::identity(n), Side::Right, 1e-12, n).unwrap();
        prop_assert_eq!(&right.residual_history, &rep.residual_history);
    }

    #[test]
    fn basis_is_orthonormal(s in 1usize..4, r in 0usize..7) {
        let basis = BasisSet::new(s, r).unwrap();
        let quad = basis.quadrature();
        let len = basis.len();
        let mut vals = vec![0.0; len];
        let mut gram = vec![0.0; len * len];
        for q in 0..quad.len() {
            basis.eval_all(quad.point(q), &mut vals);
            let w = quad.weights[q];
            for i in 0..len {
                for j in 0..len {
                    gram[i * len + j] += w * vals[i] * vals[j];
                }
            }
        }
        for i in 0..len {
            for j in 0..len {
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[i * len + j] - expect).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn basis_cardinality_is_binomial(s in 1usize..5, r in 0usize..9) {
        let basis = BasisSet::new(s, r).unwrap();
        let mut binom = 1u64;
        for k in 1..=s as u64 {
            binom = binom * (r as u64 + k) / k;
        }
        prop_assert_eq!(basis.len() as u64, binom);
        for i in 1..basis.len() {
            prop_assert!(basis.degree_of(i - 1) <= basis.degree_of(i));
        }
    }

    #[test]
    fn wedge_field_stays_positive(theta in 0.0..0.99f64, cells in 1usize..40) {
        let f = RandomField::wedge_2d(30.0, 15.0, 20.0, theta).unwrap();
        let sampled = f.sample(&Grid::new(2, cells).unwrap()).unwrap();
        prop_assert!(sampled.positivity_margin() > 0.0);
        for node in 0..sampled.len() {
            prop_assert_eq!(sampled.eval(node, &[0.0; 3]), sampled.mean(node));
        }
    }

    #[test]
    fn mobius_maps_real_axis_to_circle(t in -50.0..50.0f64, beta in 0.05..2.0f64) {
        // the real line (generalized eigenvalues of a Dirichlet problem) lands on |z − ½| = ½
        let z = mobius(C64::new(t, 0.0), beta).unwrap();
        prop_assert!(((z - C64::new(0.5, 0.0)).norm() - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn galerkin_matrix_is_complex_symmetric(q in 1usize..12, r in 0usize..5, theta in 0.01..0.9f64, absorbing in any::<bool>()) {
        let bc = if absorbing { BoundaryCondition::Absorbing } else { BoundaryCondition::Dirichlet };
        let sys = assemble_galerkin(
            &Grid::new(1, q).unwrap(),
            &RandomField::constant_1d(7.0, theta).unwrap(),
            bc,
            &BasisSet::new(1, r).unwrap(),
        ).unwrap();
        prop_assert_eq!(sys.a.transpose(), sys.a.clone());
        prop_assert_eq!(sys.a.nrows(), (r + 1) * sys.block_size());
    }
}

#[test]
fn mean_value_exact_at_zero_variance() {
    let sys = assemble_galerkin(
        &Grid::new(1, 15).unwrap(),
        &RandomField::deterministic_1d(12.0).unwrap(),
        BoundaryCondition::Absorbing,
        &BasisSet::new(1, 3).unwrap(),
    )
    .unwrap();
    let p = build(&sys, PreconditionerKind::MeanValue).unwrap();
    let rep = gmres(&sys.a, &sys.rhs, &p, Side::Right, 1e-12, 50).unwrap();
    assert!(rep.converged);
    assert_eq!(rep.iterations, 1);
}
