use sghelm_core::assembly::{assemble_galerkin, mesh_rule, BoundaryCondition, GalerkinSystem, Grid};
use sghelm_core::basis::BasisSet;
use sghelm_core::dense::{DenseLu, DenseMatrix};
use sghelm_core::field::RandomField;
use sghelm_core::krylov::{direct_solve, gmres, stationary, Side, StationaryOptions};
use sghelm_core::precond::{build_csl, build_mean_value, csl_matrix, mean_csl_matrix, mean_value_matrix};
use sghelm_core::spectra::{dense_eigs, left_preconditioned_matrix, mobius, preconditioned_spectrum, right_preconditioned_matrix};
use sghelm_core::C64;

fn system_1d(kbar: f64, theta: f64, q: usize, m: usize, bc: BoundaryCondition) -> GalerkinSystem {
    let field = if theta == 0.0 {
        RandomField::deterministic_1d(kbar).unwrap()
    } else {
        RandomField::constant_1d(kbar, theta).unwrap()
    };
    assemble_galerkin(&Grid::new(1, q).unwrap(), &field, bc, &BasisSet::new(1, m).unwrap()).unwrap()
}

/// Exact rationals for the quadrature oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Frac(i128, i128);

impl Frac {
    fn new(n: i128, d: i128) -> Self {
        fn gcd(a: i128, b: i128) -> i128 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        let g = gcd(n, d).max(1) * d.signum();
        Frac(n / g, d / g)
    }
    fn add(self, o: Self) -> Self {
        Frac::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }
    fn mul(self, o: Self) -> Self {
        Frac::new(self.0 * o.0, self.1 * o.1)
    }
    fn to_f64(self) -> f64 {
        self.0 as f64 / self.1 as f64
    }
}

/// Monomial coefficients of the classical Legendre polynomial `P_n`.
fn legendre_monomials(n: usize) -> Vec<Frac> {
    let mut prev = vec![Frac(1, 1)];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![Frac(0, 1), Frac(1, 1)];
    for k in 1..n {
        let mut next = vec![Frac(0, 1); k + 2];
        for (p, c) in cur.iter().enumerate() {
            next[p + 1] = next[p + 1].add(c.mul(Frac::new(2 * k as i128 + 1, k as i128 + 1)));
        }
        for (p, c) in prev.iter().enumerate() {
            next[p] = next[p].add(c.mul(Frac::new(-(k as i128), k as i128 + 1)));
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `½∫ ξ^p P_i P_j dξ` over `[-1, 1]`, exactly.
fn exact_moment(p: usize, i: usize, j: usize) -> Frac {
    let (a, b) = (legendre_monomials(i), legendre_monomials(j));
    let mut total = Frac(0, 1);
    for (u, ca) in a.iter().enumerate() {
        for (v, cb) in b.iter().enumerate() {
            let e = p + u + v;
            if e % 2 == 0 {
                total = total.add(ca.mul(*cb).mul(Frac::new(1, e as i128 + 1)));
            }
        }
    }
    total
}

#[test]
fn projection_is_exact_for_low_degree_polynomials() {
    let basis = BasisSet::new(1, 4).unwrap();
    for p in 0..=4usize {
        let proj = basis.project_scalar(|xi| xi[0].powi(p as i32), Some(p));
        for i in 0..=4 {
            for j in 0..=4 {
                let norm = (((2 * i + 1) * (2 * j + 1)) as f64).sqrt();
                let expect = exact_moment(p, i, j).to_f64() * norm;
                assert!((proj[(i, j)] - expect).abs() <= 1e-13, "p={p} ({i},{j})");
            }
        }
    }
}

#[test]
fn projection_of_affine_wavenumber() {
    let (theta, kbar) = (0.1, 50.0);
    let basis = BasisSet::new(1, 3).unwrap();
    let proj = basis.project_scalar(|xi| (1.0 + theta * xi[0]) * kbar, Some(1));
    // independent composite Simpson oracle with φ0 = 1, φ1 = √3 ξ
    let n = 2000;
    let h = 2.0 / n as f64;
    let mut acc = 0.0;
    for s in 0..=n {
        let x = -1.0 + s as f64 * h;
        let w = if s == 0 || s == n {
            1.0
        } else if s % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * (1.0 + theta * x) * kbar * 3f64.sqrt() * x;
    }
    let simpson = acc * h / 3.0 / 2.0;
    assert!((proj[(0, 1)] - simpson).abs() <= 1e-10);
    assert!((proj[(0, 1)] - theta * kbar / 3f64.sqrt()).abs() <= 1e-12);
    assert!((proj[(0, 1)] - 2.88675).abs() <= 1e-5);
    for i in 0..4usize {
        for j in 0..4 {
            if i.abs_diff(j) > 1 {
                assert!(proj[(i, j)].abs() <= 1e-13);
            }
        }
    }
}

#[test]
fn eigenvalues_against_known_roots() {
    let roots = [
        C64::new(3.0, 1.0),
        C64::new(-2.0, 0.5),
        C64::new(0.25, -1.5),
        C64::new(1.0, 0.0),
        C64::new(-0.75, -0.25),
        C64::new(2.0, 2.0),
        C64::new(-1.0, 3.0),
        C64::new(0.5, 0.5),
    ];
    // characteristic polynomial from its roots, eigenvalues of its companion matrix
    let mut coeffs = vec![C64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
        for (p, c) in coeffs.iter().enumerate() {
            next[p + 1] += c;
            next[p] -= c * r;
        }
        coeffs = next;
    }
    let n = roots.len();
    let companion = DenseMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -coeffs[i]
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    // and a dense similarity transform of diag(roots)
    let v = DenseMatrix::from_fn(n, n, |i, j| {
        C64::new(
            ((i * 7 + j * 3) as f64).sin() + if i == j { 3.0 } else { 0.0 },
            ((i + 2 * j) as f64).cos(),
        )
    });
    let vinv = DenseLu::new(&v).unwrap().inverse();
    let d = DenseMatrix::from_fn(n, n, |i, j| if i == j { roots[i] } else { C64::new(0.0, 0.0) });
    let similar = v.matmul(&d).matmul(&vinv);
    for m in [companion, similar] {
        let eigs = dense_eigs(&m).unwrap();
        assert_eq!(eigs.len(), n);
        for r in roots {
            let best = eigs.iter().map(|e| (e - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best <= 1e-8, "root {r} missed by {best}");
        }
    }
}

#[test]
fn dirichlet_spectrum_lies_on_the_arc() {
    let beta = 0.5;
    let sys = system_1d(20.0, 0.1, 31, 3, BoundaryCondition::Dirichlet);
    let report = preconditioned_spectrum(&sys.a, &build_csl(&sys, beta).unwrap(), beta).unwrap();
    assert_eq!(report.eigenvalues.len(), sys.dim());
    assert!(report.min_circle_deviation <= 1e-8);
    let half = C64::new(0.5, 0.0);
    let start = (mobius(C64::new(0.0, 0.0), beta).unwrap() - half).arg();
    assert!((-core::f64::consts::FRAC_PI_2..0.0).contains(&start));
    for z in &report.eigenvalues {
        let a = (z - half).arg();
        assert!(!(a > start + 1e-8 && a < -1e-8), "eigenvalue {z} off the arc");
    }
}

#[test]
fn absorbing_spectrum_in_disk_and_outside_shift_disk() {
    let beta = 0.5;
    let sys = system_1d(20.0, 0.1, 31, 3, BoundaryCondition::Absorbing);
    let p = build_csl(&sys, beta).unwrap();
    let report = preconditioned_spectrum(&sys.a, &p, beta).unwrap();
    assert!(report.max_disk_violation <= 1e-8);
    assert!(report.beta_disk_violation <= 1e-8);

    // A M⁻¹ and M⁻¹ A share their spectrum
    let mut left = dense_eigs(&left_preconditioned_matrix(&sys.a, &p).unwrap()).unwrap();
    let mut right = dense_eigs(&right_preconditioned_matrix(&sys.a, &p).unwrap()).unwrap();
    let key = |z: &C64| (z.re, z.im);
    left.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    right.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    let mut used = vec![false; right.len()];
    for z in &left {
        let (idx, d) = right
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, w)| (i, (w - z).norm()))
            .fold((usize::MAX, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        used[idx] = true;
        assert!(d <= 1e-7, "unmatched eigenvalue {z}");
    }
}

#[test]
fn preconditioner_distances_are_ordered() {
    let (kbar, theta) = (50.0, 0.1);
    let q = mesh_rule(kbar * (1.0 + theta)).unwrap();
    assert_eq!(q, 255);
    let sys = system_1d(kbar, theta, q, 3, BoundaryCondition::Absorbing);
    let one = C64::new(1.0, 0.0);
    let dist = |m: &sghelm_core::sparse::SparseComplexMatrix| sys.a.add_scaled(one, m, -one).unwrap().norm_inf();
    let abar = dist(&mean_value_matrix(&sys).unwrap());
    let m = dist(&csl_matrix(&sys, 0.5).unwrap());
    let m0 = dist(&mean_csl_matrix(&sys, 0.5).unwrap());
    assert!(abar < m && m < m0, "{abar} {m} {m0}");
}

#[test]
fn stationary_contracts_at_spectral_radius() {
    let sys = system_1d(10.0, 0.2, 15, 3, BoundaryCondition::Absorbing);
    let p = build_mean_value(&sys).unwrap();
    let reference = direct_solve(&sys.a, &sys.rhs).unwrap();

    // spectral radius of I − Ā⁻¹A
    let pa = left_preconditioned_matrix(&sys.a, &p).unwrap();
    let n = sys.dim();
    let iter = DenseMatrix::from_fn(
        n,
        n,
        |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) } - pa[(i, j)],
    );
    let rho = dense_eigs(&iter).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(rho < 1.0, "instance must be contractive, rho = {rho}");

    let opts = StationaryOptions {
        maxit: 500,
        tol: 0.0,
        x0: None,
        reference: Some(&reference),
    };
    let rep = stationary(&sys.a, &p, &sys.rhs, &opts).unwrap();
    assert!(!rep.diverged);
    let errs = &rep.error_history;
    let end = errs.iter().position(|&e| e < 1e-10).expect("iteration converges");
    assert!(end > 10);
    let rate = (errs[end] / errs[end - 10]).powf(0.1);
    assert!(rate <= 1.2 * rho && rate >= rho / 1.2, "rate {rate} vs rho {rho}");
}

#[test]
fn gmres_matches_direct_solve() {
    let sys = system_1d(20.0, 0.1, 31, 3, BoundaryCondition::Absorbing);
    let x = direct_solve(&sys.a, &sys.rhs).unwrap();
    let rep = gmres(&sys.a, &sys.rhs, &build_mean_value(&sys).unwrap(), Side::Right, 1e-12, sys.dim()).unwrap();
    assert!(rep.converged);
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let diff = x.iter().zip(&rep.solution).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    assert!(diff <= 1e-12 * scale);
}

#[test]
fn wedge_system_sizes() {
    let field = RandomField::wedge_2d(30.0, 15.0, 20.0, 0.1).unwrap();
    let q = mesh_rule(field.max_wavenumber()).unwrap();
    assert_eq!(q, 127);
    let grid = Grid::new(2, q).unwrap();
    for (r, size) in [(0, 16641), (1, 66564)] {
        let sys = assemble_galerkin(&grid, &field, BoundaryCondition::Absorbing, &BasisSet::new(3, r).unwrap()).unwrap();
        assert_eq!(sys.dim(), size);
    }
}
