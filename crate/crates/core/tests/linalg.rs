mod common;

use common::*;
use dsaddle::linalg::*;
use dsaddle::operator::SparseOperator;
use dsaddle::pencil::pencil_spectrum_with;
use proptest::prelude::*;

fn sym(rows: &[Vec<f64>]) -> DenseSymMatrix {
    DenseSymMatrix::from_rows(rows).unwrap()
}

#[test]
fn householder_ql_matches_jacobi() {
    let mut r = rng(1);
    for n in [1, 2, 5, 17, 40] {
        let g = random_matrix(&mut r, n, n);
        let m: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| 0.5 * (g[i][j] + g[j][i])).collect()).collect();
        let got = sym_eigenvalues(&sym(&m)).unwrap();
        let want = jacobi_eigenvalues(&m);
        assert!(max_abs_diff(got.eigenvalues(), &want) < 1e-12, "n={n}");
    }
}

#[test]
fn generalized_routes_agree_with_whitened_jacobi() {
    let mut r = rng(2);
    let n = 12;
    let a = random_matrix(&mut r, n, n);
    let a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[i][j] + a[j][i]).collect()).collect();
    let b = random_spd(&mut r, n);
    let direct = gen_sym_eigenvalues(&sym(&a), &sym(&b)).unwrap();
    let b_inv = cholesky_factor(&sym(&b)).unwrap().inverse();
    let via_inv = gen_sym_eigenvalues_inv(&sym(&a), &b_inv).unwrap();
    // oracle: eigenvalues of B⁻¹A are the roots of det(A − λB); check each by
    // the sign change of the smallest |eigenvalue| of A − λB is awkward, so use
    // Jacobi on the symmetric B^{-1/2} A B^{-1/2} assembled through B⁻¹A's
    // similarity with L⁻¹AL⁻ᵀ built by Gaussian solves.
    let l = cholesky_factor(&sym(&b)).unwrap().into_lower();
    let lrows = l.to_rows();
    let mut y = vec![vec![0.0; n]; n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| a[i][j]).collect();
        let s = gauss_solve(&lrows, &col);
        for i in 0..n {
            y[i][j] = s[i];
        }
    }
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        let s = gauss_solve(&lrows, &y[i]);
        w[i] = s;
    }
    let want = jacobi_eigenvalues(&w);
    assert!(max_abs_diff(direct.eigenvalues(), &want) < 1e-9);
    assert!(max_abs_diff(via_inv.eigenvalues(), &want) < 1e-9);
}

#[test]
fn tridiagonal_laplacian_closed_form() {
    let n = 30;
    let s = tridiagonal_eigenvalues_oracle(n);
    let got = eigen::tridiagonal_eigenvalues(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
    assert!(max_abs_diff(got.eigenvalues(), &s) < 1e-13);
}

fn tridiagonal_eigenvalues_oracle(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (1..=n)
        .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos())
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[test]
fn cholesky_rejects_indefinite() {
    let m = sym(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
    assert!(matches!(cholesky_factor(&m), Err(dsaddle::Error::NotSpd { .. })));
}

#[test]
fn band_cholesky_matches_dense_solve() {
    let n = 25;
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, 4.0 + i as f64 * 0.01));
        for d in [1, 3] {
            if i + d < n {
                t.push((i, i + d, -1.0));
                t.push((i + d, i, -1.0));
            }
        }
    }
    let a = CsrMatrix::from_triplets(n, n, &t).unwrap();
    let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
    let x = BandCholesky::new(&a).unwrap().solve(&b).unwrap();
    let want = gauss_solve(&a.to_dense().to_rows(), &b);
    assert!(max_abs_diff(&x, &want) < 1e-12);
}

#[test]
fn sparse_products_match_dense() {
    let mut r = rng(3);
    let a = random_matrix(&mut r, 6, 4);
    let b = random_matrix(&mut r, 4, 5);
    let (ca, cb) = (
        CsrMatrix::from_dense(&DenseMatrix::from_rows(&a).unwrap()),
        CsrMatrix::from_dense(&DenseMatrix::from_rows(&b).unwrap()),
    );
    let prod = ca.matmul(&cb).unwrap().to_dense();
    let want = DenseMatrix::from_rows(&a).unwrap().matmul(&DenseMatrix::from_rows(&b).unwrap()).unwrap();
    assert!(prod.max_abs_diff(&want) < 1e-14);
    let x = [1.0, -2.0, 0.5, 3.0, 0.25, -1.0];
    let mut y = vec![0.0; 4];
    ca.matvec_t_into(&x, &mut y);
    let yt = ca.transpose().matvec(&x);
    assert!(max_abs_diff(&y, &yt) < 1e-14);
}

#[test]
fn lanczos_extremes_match_dense_route() {
    let n = 300;
    let mut t = Vec::new();
    for i in 0..n {
        let d = match i {
            0 => 12.0,
            _ if i + 1 == n => -4.0,
            _ => 2.0 + (i % 7) as f64 * 0.1,
        };
        t.push((i, i, d));
        if i + 1 < n {
            t.push((i, i + 1, -1.0));
            t.push((i + 1, i, -1.0));
        }
    }
    let z = SparseOperator::new(CsrMatrix::from_triplets(n, n, &t).unwrap(), true).unwrap();
    let w_inv = SparseOperator::new(CsrMatrix::identity(n), true).unwrap();
    let dense = pencil_spectrum_with(&z, &w_inv, n).unwrap();
    let lanczos = pencil_spectrum_with(&z, &w_inv, 10).unwrap();
    assert!((dense.max() - lanczos.max()).abs() < 1e-8 * dense.max());
    assert!((dense.min() - lanczos.min()).abs() < 1e-8 * dense.min().abs());
}

#[test]
fn chebyshev_polynomial_values() {
    assert_eq!(chebyshev_t(0, 0.3), 1.0);
    assert_eq!(chebyshev_t(1, 0.3), 0.3);
    assert!((chebyshev_t(2, 5.0 / 3.0) - 41.0 / 9.0).abs() < 1e-14);
    for l in 0..8 {
        let x: f64 = 0.37;
        assert!((chebyshev_t(l, x) - (l as f64 * x.acos()).cos()).abs() < 1e-13);
    }
}

proptest! {
    #[test]
    fn cubic_roots_match_bisection(r1 in -5.0f64..5.0, d1 in 0.05f64..3.0, d2 in 0.05f64..3.0) {
        let (r2, r3) = (r1 + d1, r1 + d1 + d2);
        let (c2, c1, c0) = (-(r1 + r2 + r3), r1 * r2 + r1 * r3 + r2 * r3, -r1 * r2 * r3);
        let (a, b, c) = solve_cubic_real(c2, c1, c0).unwrap();
        let oracle = bisect_roots(|x| ((x + c2) * x + c1) * x + c0, r1 - 1.0, r3 + 1.0, 4000);
        prop_assert_eq!(oracle.len(), 3);
        prop_assert!(max_abs_diff(&[a, b, c], &oracle) < 1e-9);
    }

    #[test]
    fn quadratic_roots_are_ordered(b in -10.0f64..10.0, c in -10.0f64..-0.01) {
        let (lo, hi) = solve_quadratic_real(b, c).unwrap();
        prop_assert!(lo < hi);
        prop_assert!((lo * lo + b * lo + c).abs() < 1e-10 * (1.0 + lo * lo));
        prop_assert!((hi * hi + b * hi + c).abs() < 1e-10 * (1.0 + hi * hi));
    }
}
