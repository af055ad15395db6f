//! Save a system as JSON, load it back and solve it.

use std::sync::Arc;

use dsaddle::linalg::{cholesky_factor, DenseMatrix, DenseSymMatrix};
use dsaddle::minres::minres_solve;
use dsaddle::system::{schur_s_tilde, schur_x_tilde, Block, BlockPreconditioner, DoubleSaddleSystem};

fn main() -> dsaddle::Result<()> {
    let a = DenseMatrix::from_rows(&[vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 0.5], vec![0.0, 0.5, 2.0]])?;
    let b = DenseMatrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 2.0, 1.0]])?;
    let c = DenseMatrix::from_rows(&[vec![1.0, 1.0]])?;
    let sys = DoubleSaddleSystem::new(
        Block::Dense(a.clone()),
        Block::Dense(b),
        Block::Dense(c),
        Block::Dense(DenseMatrix::zeros(1, 1)),
        vec![1.0, 2.0, 3.0, 0.0, 1.0, -1.0],
    )?;

    let path = std::env::temp_dir().join("dsaddle_system.json");
    sys.save_json(&path)?;
    let sys = DoubleSaddleSystem::load_json(&path)?;
    println!("loaded n={} m={} p={} from {}", sys.n(), sys.m(), sys.p(), path.display());

    // exact Schur complements make P^-1 A have eigenvalues +-1
    let a_inv = Arc::new(cholesky_factor(&DenseSymMatrix::new(a)?)?);
    let s_inv = Arc::new(cholesky_factor(&schur_s_tilde(&sys, a_inv.as_ref())?)?);
    let x_inv = Arc::new(cholesky_factor(&schur_x_tilde(&sys, s_inv.as_ref())?)?);
    let pc = BlockPreconditioner::new(&sys, a_inv, s_inv, x_inv)?;
    let (w, report) = minres_solve(&sys, &pc, 1e-12, 50)?;
    println!("solution {w:.6?} after {} iterations", report.iterations);
    Ok(())
}
