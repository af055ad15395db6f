//! Chebyshev semi-iteration as an approximate inverse of the P1 mass matrix.

use dsaddle::inner::{eta_factor, jacobi_interval, ChebyshevSolver};
use dsaddle::operator::SparseOperator;
use dsaddle::pdeopt::{assemble_matrices, build_mesh};
use dsaddle::pencil::pencil_spectrum;

fn main() -> dsaddle::Result<()> {
    let fem = assemble_matrices(&build_mesh(4)?);
    let (lo, hi) = jacobi_interval(&fem.mass)?;
    println!("spectrum of diag(M)^-1 M: [{lo:.4}, {hi:.4}]");
    let m = SparseOperator::new(fem.mass.clone(), true)?;
    for l in [1, 2, 3, 5, 10] {
        let cheb = ChebyshevSolver::analytic(fem.mass.clone(), l)?;
        let s = pencil_spectrum(&m, &cheb)?;
        let eta = eta_factor(l, 0.5, 2.0)?;
        println!("l={l:>2}: eig(C M) in [{:.6}, {:.6}], 1 -/+ eta = [{:.6}, {:.6}]", s.min(), s.max(), 1.0 - eta, 1.0 + eta);
    }
    Ok(())
}
