//! With exact inner blocks and E = 0 the preconditioned spectrum is {-1, 1}
//! and MINRES converges in two steps.

use dsaddle::minres::minres_solve;
use dsaddle::synthetic::{eigen_verify, generate_case, SyntheticParams, Targets};

fn main() -> dsaddle::Result<()> {
    let case = generate_case(&SyntheticParams::new(Targets::unit(), 42))?;
    let (n, m, p) = (case.system.n(), case.system.m(), case.system.p());
    let spectrum = eigen_verify(&case.system, &case.preconditioner)?;
    let dev = spectrum.eigenvalues().iter().map(|l| (l.abs() - 1.0).abs()).fold(0.0, f64::max);
    println!("n={n} m={m} p={p}: {} negative eigenvalues, max ||lambda| - 1| = {dev:.2e}", spectrum.count_below(0.0));

    let (_, report) = minres_solve(&case.system, &case.preconditioner, 1e-10, 100)?;
    println!("MINRES: {} iterations, relative residual {:.2e}", report.iterations, report.final_residual());
    Ok(())
}
