mod common;

use std::sync::Arc;

use common::*;
use dsaddle::linalg::{cholesky_factor, gen_sym_eigenvalues, CsrMatrix, DenseMatrix, DenseSymMatrix};
use dsaddle::operator::{LinearOperator, SparseOperator};
use dsaddle::system::{Block, BlockPreconditioner, DoubleSaddleSystem};
use dsaddle::Error;
use rand_chacha::ChaCha8Rng;

fn dense(rows: &[Vec<f64>]) -> Block {
    Block::Dense(DenseMatrix::from_rows(rows).unwrap())
}

fn inv_op(rows: &[Vec<f64>]) -> Arc<dyn LinearOperator> {
    Arc::new(cholesky_factor(&DenseSymMatrix::from_rows(rows).unwrap()).unwrap())
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = b.len();
    a.iter().map(|row| (0..b[0].len()).map(|j| (0..k).map(|l| row[l] * b[l][j]).sum()).collect()).collect()
}

fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

fn inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| gauss_solve(a, &(0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect::<Vec<_>>()))
        .collect();
    transpose(&cols)
}

struct Blocks {
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    c: Vec<Vec<f64>>,
    e: Vec<Vec<f64>>,
    ah: Vec<Vec<f64>>,
    sh: Vec<Vec<f64>>,
    xh: Vec<Vec<f64>>,
}

fn random_blocks(r: &mut ChaCha8Rng, n: usize, m: usize, p: usize) -> Blocks {
    let g = random_matrix(r, p, p);
    let e = matmul(&transpose(&g), &g);
    Blocks {
        a: random_spd(r, n),
        b: random_matrix(r, m, n),
        c: random_matrix(r, p, m),
        e,
        ah: random_spd(r, n),
        sh: random_spd(r, m),
        xh: random_spd(r, p),
    }
}

/// Dense `P = P_L P_D⁻¹ P_Lᵀ` built block by block.
fn oracle_preconditioner(bl: &Blocks) -> Vec<Vec<f64>> {
    let (n, m, p) = (bl.a.len(), bl.b.len(), bl.c.len());
    let order = n + m + p;
    let mut pl = vec![vec![0.0; order]; order];
    let mut pd_inv = vec![vec![0.0; order]; order];
    let put = |dst: &mut Vec<Vec<f64>>, blk: &[Vec<f64>], r0: usize, c0: usize, s: f64| {
        for (i, row) in blk.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                dst[r0 + i][c0 + j] = s * v;
            }
        }
    };
    put(&mut pl, &bl.ah, 0, 0, 1.0);
    put(&mut pl, &bl.b, n, 0, 1.0);
    put(&mut pl, &bl.sh, n, n, -1.0);
    put(&mut pl, &bl.c, n + m, n, 1.0);
    put(&mut pl, &bl.xh, n + m, n + m, 1.0);
    put(&mut pd_inv, &inverse(&bl.ah), 0, 0, 1.0);
    put(&mut pd_inv, &inverse(&bl.sh), n, n, 1.0);
    put(&mut pd_inv, &inverse(&bl.xh), n + m, n + m, 1.0);
    matmul(&matmul(&pl, &pd_inv), &transpose(&pl))
}

fn build(bl: &Blocks) -> (DoubleSaddleSystem, BlockPreconditioner) {
    let order = bl.a.len() + bl.b.len() + bl.c.len();
    let sys =
        DoubleSaddleSystem::new(dense(&bl.a), dense(&bl.b), dense(&bl.c), dense(&bl.e), vec![1.0; order]).unwrap();
    let pc = BlockPreconditioner::new(&sys, inv_op(&bl.ah), inv_op(&bl.sh), inv_op(&bl.xh)).unwrap();
    (sys, pc)
}

#[test]
fn scalar_preconditioner_matches_hand_computation() {
    let s = |v: f64| dense(&[vec![v]]);
    let sys = DoubleSaddleSystem::new(s(2.0), s(1.0), s(1.0), s(0.0), vec![1.0, 0.0, 0.0]).unwrap();
    let pc = BlockPreconditioner::new(&sys, inv_op(&[vec![2.0]]), inv_op(&[vec![0.5]]), inv_op(&[vec![2.0]])).unwrap();
    let w = pc.apply_preconditioner(&[1.0, 0.0, 0.0]).unwrap();
    let p = [vec![2.0, 1.0, 0.0], vec![1.0, 1.0, -1.0], vec![0.0, -1.0, 4.0]];
    let want = gauss_solve(&p, &[1.0, 0.0, 0.0]);
    assert!(max_abs_diff(&w, &[1.5, -2.0, -0.5]) < 1e-15);
    assert!(max_abs_diff(&w, &want) < 1e-14);
}

#[test]
fn scalar_preconditioned_spectrum() {
    let s = |v: f64| dense(&[vec![v]]);
    let sys = DoubleSaddleSystem::new(s(1.0), s(1.0), s(1.0), s(0.0), vec![0.0; 3]).unwrap();
    let pc = BlockPreconditioner::new(&sys, inv_op(&[vec![1.0]]), inv_op(&[vec![1.0]]), inv_op(&[vec![1.0]])).unwrap();
    let k = sys.assemble_full_matrix().unwrap();
    let p = pc.assemble_preconditioner_dense().unwrap();
    let eig = gen_sym_eigenvalues(&k, &p).unwrap();
    assert!(max_abs_diff(eig.eigenvalues(), &[-1.0, 1.0, 1.0]) < 1e-12);
}

#[test]
fn random_preconditioner_solve_matches_oracle() {
    let mut r = rng(11);
    for (n, m, p) in [(6, 4, 2), (5, 5, 5), (8, 3, 1)] {
        let bl = random_blocks(&mut r, n, m, p);
        let (_, pc) = build(&bl);
        let pmat = oracle_preconditioner(&bl);
        let rhs: Vec<f64> = random_matrix(&mut r, 1, n + m + p).remove(0);
        let w = pc.apply_preconditioner(&rhs).unwrap();
        let want = gauss_solve(&pmat, &rhs);
        let scale = want.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        assert!(max_abs_diff(&w, &want) <= 1e-9 * scale);

        let assembled = pc.assemble_preconditioner_dense().unwrap();
        let flat: Vec<f64> = pmat.concat();
        assert!(max_abs_diff(assembled.as_matrix().as_slice(), &flat) <= 1e-9 * flat.iter().fold(1.0f64, |a, v| a.max(v.abs())));
    }
}

#[test]
fn full_matrix_has_expected_inertia() {
    let mut r = rng(12);
    let bl = random_blocks(&mut r, 7, 5, 3);
    let (sys, _) = build(&bl);
    let k = sys.assemble_full_matrix().unwrap().as_matrix().to_rows();
    assert_eq!(ldlt_negative_count(&k), 5);
    let eig = jacobi_eigenvalues(&k);
    assert_eq!(eig.iter().filter(|v| **v < 0.0).count(), 5);
}

#[test]
fn operator_action_matches_assembled_matrix() {
    let mut r = rng(13);
    let bl = random_blocks(&mut r, 6, 4, 3);
    let (sys, _) = build(&bl);
    let x: Vec<f64> = (0..13).map(|i| (i as f64 * 0.7).sin()).collect();
    let y = sys.apply(&x);
    let want = sys.assemble_full_matrix().unwrap().matvec(&x);
    assert!(max_abs_diff(&y, &want) < 1e-13);
}

#[test]
fn json_round_trip_preserves_blocks() {
    let mut r = rng(14);
    let bl = random_blocks(&mut r, 5, 3, 2);
    let a = CsrMatrix::from_dense(&DenseMatrix::from_rows(&bl.a).unwrap());
    let sys = DoubleSaddleSystem::new(
        Block::Sparse(a),
        dense(&bl.b),
        dense(&bl.c),
        dense(&bl.e),
        (0..10).map(|i| i as f64).collect(),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("system.json");
    sys.save_json(&path).unwrap();
    let back = DoubleSaddleSystem::load_json(&path).unwrap();
    assert_eq!(back.rhs(), sys.rhs());
    assert_eq!(back.assemble_full_matrix().unwrap(), sys.assemble_full_matrix().unwrap());
}

#[test]
fn rejects_invalid_systems() {
    let mut r = rng(15);
    let bl = random_blocks(&mut r, 4, 3, 2);
    let rank_deficient_c = vec![bl.c[0].clone(), bl.c[0].clone()];
    let err = DoubleSaddleSystem::new(dense(&bl.a), dense(&bl.b), dense(&rank_deficient_c), dense(&bl.e), vec![0.0; 9]);
    assert!(matches!(err, Err(Error::InvalidSystem(_))));

    let indefinite_e = vec![vec![1.0, 0.0], vec![0.0, -1.0]];
    let err = DoubleSaddleSystem::new(dense(&bl.a), dense(&bl.b), dense(&bl.c), dense(&indefinite_e), vec![0.0; 9]);
    assert!(matches!(err, Err(Error::InvalidSystem(_))));

    let err = DoubleSaddleSystem::new(dense(&bl.b), dense(&bl.a), dense(&bl.c), dense(&bl.e), vec![0.0; 9]);
    assert!(err.is_err());

    let err = DoubleSaddleSystem::from_json_str("{\"n\": 1}");
    assert!(err.is_err());

    let (sys, _) = build(&bl);
    let not_spd: Arc<dyn LinearOperator> =
        Arc::new(SparseOperator::new(CsrMatrix::identity(4), false).unwrap());
    let err = BlockPreconditioner::new(&sys, not_spd, inv_op(&bl.sh), inv_op(&bl.xh));
    assert!(matches!(err, Err(Error::InvalidArgument(_))));
}
