//! Boundary observation: the largest eigenvalue grows like 1/beta while the
//! negative bounds stay put.

use dsaddle::experiments::{run_pdeco, RunConfig, Subcommand};
use dsaddle::pdeopt::Observation;

fn main() -> dsaddle::Result<()> {
    let mut cfg = RunConfig::new(Subcommand::Pdeco);
    cfg.observation = Observation::Boundary;
    cfg.cheb_iters = vec![2, 5];
    let report = run_pdeco(&cfg)?;
    for r in &report.rows {
        let x = r.extremes.expect("eigens on");
        println!(
            "beta={:e} l={:>2}: neg [{:.4}, {:.4}] in [{:.4}, {:.4}], max eig {:.2} <= {:.2}, {} its",
            r.beta, r.l, x.min, x.max_negative, r.bounds.negative.lo, r.bounds.negative.hi, x.max, r.bounds.positive.hi, r.iterations
        );
    }
    Ok(())
}
