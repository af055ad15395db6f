mod common;

use common::*;
use dsaddle::bounds::{bounds_e_zero, CONTAINMENT_INFLATION};
use dsaddle::indicators::compute_indicators;
use dsaddle::linalg::sym_eigenvalues;
use dsaddle::system::{coupling_gram, schur_s_tilde};
use dsaddle::synthetic::*;

fn example_targets() -> Targets {
    Targets::new((0.9, 1.2), (0.9, 1.2), (0.9, 1.2)).unwrap()
}

fn gap(x: (f64, f64), t: (f64, f64)) -> f64 {
    (x.0 - t.0).abs().max((x.1 - t.1).abs())
}

/// Condition number of a generated Schur-type matrix.
fn kappa(m: &dsaddle::linalg::DenseSymMatrix) -> f64 {
    let s = sym_eigenvalues(m).unwrap();
    s.max() / s.min()
}

#[test]
fn example_cell_reproduces_the_targets_up_to_conditioning() {
    let t = example_targets();
    let case = generate_case(&SyntheticParams::new(t, 0)).unwrap();
    let (sys, pc) = (&case.system, &case.preconditioner);
    let g = compute_indicators(sys, pc).unwrap();
    assert!(gap(g.gamma_a, t.gamma_a) < 1e-10);
    // the stored blocks realize the targets only up to eps * cond of the Schur matrices
    let tol_r = INDICATOR_TOL.max(f64::EPSILON * kappa(&schur_s_tilde(sys, pc.a_inv().as_ref()).unwrap()));
    let tol_k = INDICATOR_TOL.max(f64::EPSILON * kappa(&coupling_gram(sys, pc.s_inv().as_ref()).unwrap()));
    assert!(gap(g.gamma_r, t.gamma_r) < tol_r);
    assert!(gap(g.gamma_k, t.gamma_k) < tol_k);
    let (n, m, p) = (sys.n(), sys.m(), sys.p());
    assert!((60..70).contains(&n) && n >= m && m >= p);
}

#[test]
fn well_conditioned_draw_reproduces_the_targets() {
    let t = example_targets();
    let case = generate_case(&SyntheticParams::new(t, 1)).unwrap();
    let g = compute_indicators(&case.system, &case.preconditioner).unwrap();
    assert!(gap(g.gamma_a, t.gamma_a) < INDICATOR_TOL);
    assert!(gap(g.gamma_r, t.gamma_r) < INDICATOR_TOL);
    assert!(gap(g.gamma_k, t.gamma_k) < INDICATOR_TOL);
}

#[test]
fn inertia_matches_independent_oracles() {
    let t = Targets::new((0.3, 1.5), (0.1, 1.8), (0.9, 5.0)).unwrap();
    let case = generate_case(&SyntheticParams::new(t, 3).with_dimensions(14, 4)).unwrap();
    let m = case.system.m();
    let spectrum = eigen_verify(&case.system, &case.preconditioner).unwrap();
    assert_eq!(spectrum.count_below(0.0), m);
    let k = case.system.assemble_full_matrix().unwrap().as_matrix().to_rows();
    assert_eq!(ldlt_negative_count(&k), m);
    assert_eq!(jacobi_eigenvalues(&k).iter().filter(|v| **v < 0.0).count(), m);
}

#[test]
fn eigen_routes_agree_and_are_contained() {
    let t = Targets::new((0.1, 1.99), (0.3, 1.2), (0.1, 1.8)).unwrap();
    let case = generate_case(&SyntheticParams::new(t, 5).with_dimensions(20, 5)).unwrap();
    let a = eigen_verify(&case.system, &case.preconditioner).unwrap();
    let b = eigen_verify_assembled(&case.system, &case.preconditioner).unwrap();
    let scale = a.max().abs().max(a.min().abs());
    assert!(max_abs_diff(a.eigenvalues(), b.eigenvalues()) < 1e-8 * scale);
    let bounds = bounds_e_zero(&case.indicators).unwrap();
    assert!(a.eigenvalues().iter().all(|l| bounds.contains(*l, CONTAINMENT_INFLATION)));
}

#[test]
fn square_c_cases_have_invertible_c() {
    let params = SyntheticParams::new(example_targets(), 8).with_square_c(true).with_dimensions(16, 4);
    let case = generate_case(&params).unwrap();
    assert_eq!(case.system.m(), case.system.p());
    let c = case.system.c().to_dense().to_rows();
    let ct_c: Vec<Vec<f64>> =
        (0..c.len()).map(|i| (0..c.len()).map(|j| (0..c.len()).map(|l| c[l][i] * c[l][j]).sum()).collect()).collect();
    let eig = jacobi_eigenvalues(&ct_c);
    assert!(eig[0] > 1e-10 * eig[eig.len() - 1]);

    let rec = run_case(&params, 0, 0);
    assert!(rec.passed, "{rec:?}");
    assert!(rec.refine_slack.unwrap() >= 0.0);
}

#[test]
fn singular_e_with_square_c_uses_the_refined_variant() {
    let params = SyntheticParams::new(example_targets(), 9)
        .with_square_c(true)
        .with_e_mode(EMode::RandomPsd)
        .with_dimensions(16, 4);
    let rec = run_case(&params, 0, 0);
    assert!(rec.error.is_none(), "{:?}", rec.error);
    assert!(rec.outcomes.contains_key("E_nonzero") && rec.outcomes.contains_key("E_nonzero_squareC"));
    assert!(rec.passed);
    let e = rec.measured.unwrap().gamma_e;
    assert!(e.0.abs() < 1e-8 && e.1 > 0.0);
}

#[test]
fn grid_has_729_cells() {
    let grid = parameter_grid();
    assert_eq!(grid.len(), 729);
    assert!(grid.iter().all(|t| t.gamma_a.0 < t.gamma_a.1 && t.gamma_a.1 < 2.0));
}

#[test]
fn grid_output_is_deterministic() {
    let cells: Vec<_> =
        GridPreset::Ci.cells(0).into_iter().step_by(97).map(|c| c.with_dimensions(12, 3)).collect();
    let first = run_grid(&cells, 2, Some(1)).unwrap();
    let second = run_grid(&cells, 2, Some(1)).unwrap();
    assert_eq!(records_to_csv(&first.records).unwrap(), records_to_csv(&second.records).unwrap());
    assert!(first.summary.all_passed());
    assert_eq!(first.summary.cases, cells.len() * 2);
}

#[test]
fn infeasible_targets_are_rejected() {
    assert!(Targets::new((0.5, 2.5), (0.9, 1.2), (0.9, 1.2)).is_err());
    assert!(Targets::new((1.2, 0.9), (0.9, 1.2), (0.9, 1.2)).is_err());
}
