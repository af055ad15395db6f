//! Compare MINRES residuals with the envelope implied by the bounds.

use dsaddle::bounds::bounds_e_nonzero;
use dsaddle::indicators::{analytic_indicators_with_eta, measure_gamma_k, MeasuredOverrides};
use dsaddle::inner::{AmgMode, SpectralInterval};
use dsaddle::minres::{attach_bound_curve, minres_solve};
use dsaddle::pdeopt::{build_mesh, build_ocp_preconditioner, build_ocp_system, Observation};

fn main() -> dsaddle::Result<()> {
    let ocp = build_ocp_system(&build_mesh(4)?, 1e-2, Observation::Full)?;
    let built = build_ocp_preconditioner(&ocp, 3, AmgMode::Exact, SpectralInterval::Analytic)?;
    let pc = &built.preconditioner;
    let measured = MeasuredOverrides { gamma_k: Some(measure_gamma_k(&ocp.system, pc)?), ..Default::default() };
    let g = analytic_indicators_with_eta(built.chebyshev.eta(), ocp.beta, ocp.observation, (1.0, 1.0), measured)?;
    let bounds = bounds_e_nonzero(&g)?;

    let (_, report) = minres_solve(&ocp.system, pc, 1e-10, 500)?;
    let report = attach_bound_curve(report, &bounds);
    print!("{}", String::from_utf8_lossy(&report.to_csv()?));
    println!("largest excess over the envelope: {:.3e}", report.bound_violation().unwrap_or(0.0));
    Ok(())
}
