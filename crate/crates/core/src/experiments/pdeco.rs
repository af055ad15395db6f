//! Eigenvalue and iteration tables for the optimal-control benchmarks.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::table::{fmt_opt, Table};
use crate::bounds::{bounds_e_nonzero, SpectralBounds, CONTAINMENT_INFLATION};
use crate::error::{Error, Result};
use crate::indicators::{
    analytic_indicators_with_eta, measure_gamma_e, measure_gamma_k, measure_gamma_x, GammaIndicators,
    MeasuredOverrides,
};
use crate::inner::AmgMode;
use crate::io::write_atomic;
use crate::linalg::gen_sym_eigenvalues_inv;
use crate::minres::{attach_bound_curve, minres_solve, SolveStatus};
use crate::pdeopt::{build_mesh, build_ocp_preconditioner, build_ocp_system, Observation, OcpSystem};
use crate::synthetic::EigenExtremes;

/// Largest system order for which the full spectrum is computed.
pub const PDECO_EIGEN_LIMIT: usize = 4000;

/// Columns of the eigenvalue tables, after the leading `l`.
pub const EIGEN_COLUMNS: [&str; 8] = [
    "Bound_l_neg",
    "rho_l_neg",
    "rho_u_neg",
    "Bound_u_neg",
    "Bound_l_pos",
    "rho_l_pos",
    "rho_u_pos",
    "Bound_u_pos",
];

/// One `(k, β, ℓ)` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdecoRow {
    pub observation: Observation,
    pub level: u32,
    pub beta: f64,
    pub l: usize,
    pub order: usize,
    pub amg_mode: AmgMode,
    pub eta: f64,
    pub amg_quality: (f64, f64),
    pub indicators: GammaIndicators,
    pub bounds: SpectralBounds,
    pub extremes: Option<EigenExtremes>,
    pub contained: Option<bool>,
    pub iterations: usize,
    pub status: SolveStatus,
    pub final_residual: f64,
    /// Largest `history[k] − bound[k]` along the MINRES run.
    pub bound_violation: f64,
}

impl PdecoRow {
    pub fn passed(&self) -> bool {
        self.contained != Some(false)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PdecoReport {
    pub rows: Vec<PdecoRow>,
}

impl PdecoReport {
    pub fn all_contained(&self) -> bool {
        self.rows.iter().all(PdecoRow::passed)
    }

    pub fn rows_for(&self, level: u32, beta: f64) -> Vec<&PdecoRow> {
        self.rows.iter().filter(|r| r.level == level && r.beta == beta).collect()
    }

    /// `(ℓ, iterations)` for one `(k, β)`, in ℓ order.
    pub fn iterations(&self, level: u32, beta: f64) -> Vec<(usize, usize)> {
        self.rows_for(level, beta).iter().map(|r| (r.l, r.iterations)).collect()
    }

    pub fn eigen_table(&self, level: u32, beta: f64) -> Table {
        let mut t = Table::new(std::iter::once("l").chain(EIGEN_COLUMNS));
        for r in self.rows_for(level, beta) {
            let (b, x) = (&r.bounds, r.extremes);
            t.push(vec![
                r.l.to_string(),
                b.negative.lo.to_string(),
                fmt_opt(x.map(|x| x.min)),
                fmt_opt(x.map(|x| x.max_negative)),
                b.negative.hi.to_string(),
                b.positive.lo.to_string(),
                fmt_opt(x.map(|x| x.min_positive)),
                fmt_opt(x.map(|x| x.max)),
                b.positive.hi.to_string(),
            ]);
        }
        t
    }

    /// Rows `ℓ`, one column per `(k, β)`.
    pub fn iteration_table(&self) -> Table {
        let mut keys: Vec<(u32, f64)> = Vec::new();
        let mut ls: Vec<usize> = Vec::new();
        for r in &self.rows {
            if !keys.contains(&(r.level, r.beta)) {
                keys.push((r.level, r.beta));
            }
            if !ls.contains(&r.l) {
                ls.push(r.l);
            }
        }
        ls.sort_unstable();
        let header = std::iter::once("l".to_string()).chain(keys.iter().map(|(k, b)| format!("k{k}_beta{b:e}")));
        let mut t = Table::new(header);
        for l in ls {
            let mut row = vec![l.to_string()];
            for (k, b) in &keys {
                let its = self.rows.iter().find(|r| r.level == *k && r.beta == *b && r.l == l);
                row.push(its.map_or(String::new(), |r| r.iterations.to_string()));
            }
            t.push(row);
        }
        t
    }
}

fn eigen_extremes(ocp: &OcpSystem, pc: &crate::system::BlockPreconditioner) -> Result<crate::linalg::Spectrum> {
    let order = ocp.order();
    if order > PDECO_EIGEN_LIMIT {
        return Err(Error::BudgetExceeded { order, budget: PDECO_EIGEN_LIMIT });
    }
    gen_sym_eigenvalues_inv(&ocp.system.assemble_full_matrix()?, &pc.materialize_inverse()?)
}

/// Builds the preconditioner with `l` Chebyshev steps, evaluates the
/// analytic bounds, and optionally the spectrum and a MINRES solve.
pub fn run_pdeco_case(ocp: &OcpSystem, l: usize, cfg: &RunConfig) -> Result<PdecoRow> {
    let built = build_ocp_preconditioner(ocp, l, cfg.amg_mode, cfg.interval)?;
    let pc = &built.preconditioner;
    let sys = &ocp.system;
    let amg_quality = built.amg_quality(ocp)?;
    let measured = match ocp.observation {
        Observation::Full => MeasuredOverrides { gamma_k: Some(measure_gamma_k(sys, pc)?), ..Default::default() },
        Observation::Boundary => MeasuredOverrides {
            gamma_e_max: Some(measure_gamma_e(sys, pc)?.1),
            gamma_x_max: Some(measure_gamma_x(sys, pc)?.1),
            ..Default::default()
        },
    };
    let eta = built.chebyshev.eta();
    let indicators = analytic_indicators_with_eta(eta, ocp.beta, ocp.observation, amg_quality, measured)?;
    let bounds = bounds_e_nonzero(&indicators)?;

    let (extremes, contained) = if cfg.eigens {
        let spectrum = eigen_extremes(ocp, pc)?;
        let ok = spectrum.eigenvalues().iter().all(|v| bounds.contains(*v, CONTAINMENT_INFLATION));
        (Some(EigenExtremes::from_spectrum(&spectrum)), Some(ok))
    } else {
        (None, None)
    };

    let (_, report) = minres_solve(sys, pc, cfg.tol, cfg.maxit)?;
    let report = attach_bound_curve(report, &bounds);
    Ok(PdecoRow {
        observation: ocp.observation,
        level: ocp.level,
        beta: ocp.beta,
        l,
        order: ocp.order(),
        amg_mode: cfg.amg_mode,
        eta,
        amg_quality,
        indicators,
        bounds,
        extremes,
        contained,
        iterations: report.iterations,
        status: report.status,
        final_residual: report.final_residual(),
        bound_violation: report.bound_violation().unwrap_or(f64::NEG_INFINITY),
    })
}

/// Every `(k, β, ℓ)` combination of the configuration.
pub fn run_pdeco(cfg: &RunConfig) -> Result<PdecoReport> {
    cfg.validate()?;
    let mut systems = Vec::new();
    for &k in &cfg.levels {
        let mesh = build_mesh(k)?;
        for beta in cfg.betas() {
            systems.push(Arc::new(build_ocp_system(&mesh, beta, cfg.observation)?));
        }
    }
    let jobs: Vec<(Arc<OcpSystem>, usize)> =
        systems.iter().flat_map(|s| cfg.cheb_iters.iter().map(move |l| (s.clone(), *l))).collect();
    let run = || jobs.par_iter().map(|(s, l)| run_pdeco_case(s, *l, cfg)).collect::<Result<Vec<_>>>();
    let rows = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    Ok(PdecoReport { rows })
}

/// Runs the tables and writes them under `cfg.out`; returns whether every
/// computed spectrum lies inside its bounds.
pub fn cmd_pdeco(cfg: &RunConfig) -> Result<bool> {
    let report = run_pdeco(cfg)?;
    let obs = cfg.observation;
    for &k in &cfg.levels {
        for beta in cfg.betas() {
            report.eigen_table(k, beta).write(&cfg.out, &format!("pdeco_{obs}_k{k}_beta{beta:e}"))?;
        }
    }
    report.iteration_table().write(&cfg.out, &format!("pdeco_{obs}_iterations"))?;
    write_atomic(
        &cfg.out.join(format!("pdeco_{obs}_summary.json")),
        serde_json::to_string_pretty(&report)?.as_bytes(),
    )?;
    for r in report.rows.iter().filter(|r| !r.passed()) {
        log::error!("k={} beta={} l={}: eigenvalues escape the bounds", r.level, r.beta, r.l);
    }
    Ok(report.all_contained())
}
