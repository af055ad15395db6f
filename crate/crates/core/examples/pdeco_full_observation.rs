//! Bounds, spectra and MINRES counts for the distributed-control problem
//! with full observation on a 17 x 17 grid.

use dsaddle::experiments::{run_pdeco, RunConfig, Subcommand};
use dsaddle::pdeopt::Observation;

fn main() -> dsaddle::Result<()> {
    let mut cfg = RunConfig::new(Subcommand::Pdeco);
    cfg.observation = Observation::Full;
    cfg.betas = Some(vec![1e-2]);
    let report = run_pdeco(&cfg)?;
    print!("{}", report.eigen_table(4, 1e-2).to_markdown());
    println!();
    print!("{}", report.iteration_table().to_markdown());
    println!("all spectra inside the bounds: {}", report.all_contained());
    Ok(())
}
