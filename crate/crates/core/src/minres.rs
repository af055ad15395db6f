//! Preconditioned MINRES with a fixed SPD preconditioner.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{minres_bound, SpectralBounds};
use crate::error::{check_len, Error, Result};
use crate::io::write_atomic;
use crate::linalg::{axpy, dot, norm2};
use crate::operator::LinearOperator;
use crate::system::{BlockPreconditioner, DoubleSaddleSystem};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAXIT: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    /// The Lanczos process stalled before the tolerance was met; the report
    /// carries the best iterate.
    Breakdown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub iterations: usize,
    /// `‖r_k‖_{P⁻¹} / ‖r_0‖_{P⁻¹}` for `k = 0..=iterations`.
    pub history: Vec<f64>,
    pub status: SolveStatus,
    pub tol: f64,
    pub bound: Option<Vec<f64>>,
}

impl IterationReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn final_residual(&self) -> f64 {
        *self.history.last().expect("history is never empty")
    }

    /// Largest `history[k] − bound[k]`; negative when the envelope holds.
    pub fn bound_violation(&self) -> Option<f64> {
        self.bound
            .as_ref()
            .map(|b| self.history.iter().zip(b).map(|(h, b)| h - b).fold(f64::NEG_INFINITY, f64::max))
    }

    /// CSV with columns `k,rel_resid,bound`; `bound` is empty when no curve
    /// is attached.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "rel_resid", "bound"])?;
        for (k, h) in self.history.iter().enumerate() {
            let b = self.bound.as_ref().map_or(String::new(), |b| format!("{:e}", b[k]));
            w.write_record([k.to_string(), format!("{h:e}"), b])?;
        }
        w.into_inner().map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_csv()?)
    }
}

/// Adds `minres_bound(b, k)` for every entry of the history.
pub fn attach_bound_curve(mut report: IterationReport, b: &SpectralBounds) -> IterationReport {
    report.bound = Some((0..report.history.len()).map(|k| minres_bound(b, k)).collect());
    report
}

/// Solves `sys · w = sys.rhs` preconditioned by `pc`.
pub fn minres_solve(
    sys: &DoubleSaddleSystem,
    pc: &BlockPreconditioner,
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, IterationReport)> {
    minres(sys, pc, sys.rhs(), tol, maxit)
}

/// Paige–Saunders MINRES for symmetric `op` with SPD preconditioner
/// `prec_inv` (applied as `P⁻¹`), starting from zero.
pub fn minres(
    op: &dyn LinearOperator,
    prec_inv: &dyn LinearOperator,
    rhs: &[f64],
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, IterationReport)> {
    let n = op.dim();
    check_len(n, rhs.len())?;
    check_len(n, prec_inv.dim())?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut x = vec![0.0; n];
    let mut report = IterationReport { iterations: 0, history: vec![1.0], status: SolveStatus::Converged, tol, bound: None };
    if norm2(rhs) == 0.0 {
        report.history[0] = 0.0;
        return Ok((x, report));
    }

    let mut r1 = rhs.to_vec();
    let mut r2 = rhs.to_vec();
    let mut y = prec_inv.apply(&r1);
    let beta1 = preconditioned_norm(&r1, &y)?;
    let (mut oldb, mut beta) = (0.0, beta1);
    let (mut dbar, mut epsln, mut phibar) = (0.0, 0.0, beta1);
    let (mut cs, mut sn) = (-1.0, 0.0);
    let (mut w, mut w1, mut w2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut v = vec![0.0; n];
    let mut av = vec![0.0; n];

    report.status = SolveStatus::MaxIterations;
    for itn in 1..=maxit {
        let s = 1.0 / beta;
        v.iter_mut().zip(&y).for_each(|(vi, yi)| *vi = s * yi);
        op.apply_into(&v, &mut av);
        if itn >= 2 {
            axpy(-beta / oldb, &r1, &mut av);
        }
        let alfa = dot(&v, &av);
        axpy(-alfa / beta, &r2, &mut av);
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&av);
        prec_inv.apply_into(&r2, &mut y);
        oldb = beta;
        beta = preconditioned_norm(&r2, &y)?;

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        std::mem::swap(&mut w1, &mut w2);
        std::mem::swap(&mut w2, &mut w);
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
            x[i] += phi * w[i];
        }

        let rel = phibar / beta1;
        report.history.push(rel);
        report.iterations = itn;
        if rel <= tol {
            report.status = SolveStatus::Converged;
            break;
        }
        if beta <= f64::EPSILON * beta1 {
            report.status = SolveStatus::Breakdown;
            break;
        }
    }
    if report.status != SolveStatus::Converged {
        log::warn!("MINRES stopped after {} iterations: {:?}", report.iterations, report.status);
    }
    Ok((x, report))
}

fn preconditioned_norm(r: &[f64], z: &[f64]) -> Result<f64> {
    let q = dot(r, z);
    if q < 0.0 {
        return Err(Error::InvalidArgument(format!("preconditioner is not positive definite (⟨r, P⁻¹r⟩ = {q:e})")));
    }
    Ok(q.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cholesky_factor, DenseSymMatrix};

    fn diag(d: &[f64]) -> DenseSymMatrix {
        DenseSymMatrix::from_diagonal(d)
    }

    #[test]
    fn exact_preconditioner_converges_in_one_step() {
        let a = DenseSymMatrix::from_rows(&[vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 2.0]]).unwrap();
        let p = cholesky_factor(&a).unwrap();
        let (x, rep) = minres(&a, &p, &[1.0, 2.0, 3.0], 1e-12, 10).unwrap();
        assert_eq!(rep.iterations, 1);
        let r = a.matvec(&x);
        assert!((r[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_point_spectrum_converges_in_two_steps() {
        let a = diag(&[-1.0, 1.0, -1.0, 1.0]);
        let id = diag(&[1.0; 4]);
        let (_, rep) = minres(&a, &id, &[1.0, 2.0, 3.0, 4.0], 1e-10, 10).unwrap();
        assert!(rep.converged() && rep.iterations <= 2);
    }

    #[test]
    fn indefinite_diagonal_solution_and_monotone_history() {
        let d: Vec<f64> = (0..40).map(|i| if i % 3 == 0 { -1.0 - i as f64 } else { 0.5 + i as f64 }).collect();
        let a = diag(&d);
        let id = diag(&vec![1.0; 40]);
        let b: Vec<f64> = (0..40).map(|i| (i as f64).sin() + 1.5).collect();
        let (x, rep) = minres(&a, &id, &b, 1e-12, 200).unwrap();
        assert!(rep.converged());
        assert!(rep.history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        for i in 0..40 {
            assert!((x[i] * d[i] - b[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn max_iterations_is_reported() {
        let d: Vec<f64> = (1..=50).map(|i| i as f64).collect();
        let (_, rep) = minres(&diag(&d), &diag(&vec![1.0; 50]), &vec![1.0; 50], 1e-14, 3).unwrap();
        assert_eq!(rep.status, SolveStatus::MaxIterations);
        assert_eq!(rep.history.len(), 4);
    }

    #[test]
    fn csv_layout() {
        let rep = IterationReport { iterations: 1, history: vec![1.0, 0.5], status: SolveStatus::Converged, tol: 0.6, bound: None };
        let text = String::from_utf8(rep.to_csv().unwrap()).unwrap();
        assert!(text.starts_with("k,rel_resid,bound\n0,1e0,\n"));
    }
}
