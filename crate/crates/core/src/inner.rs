//! Inexact inner solvers: Chebyshev semi-iteration with Jacobi splitting,
//! surrogate multigrid operators, and the composite `Â⁻¹`, `Ŝ⁻¹`, `X̂⁻¹`
//! actions used for the optimal-control benchmarks.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{chebyshev_t, cholesky_factor, BandCholesky, Cholesky, CsrMatrix, DenseMatrix, DenseSymMatrix};
use crate::operator::{LinearOperator, Scaled, SparseOperator};
use crate::pencil::{pencil_spectrum, FnOperator};

/// Width below which a spectral interval is treated as a single point.
pub const DEGENERATE_WIDTH: f64 = 1e-14;

/// Eigenvalue enclosure of `diag(M)⁻¹ M` for P1 mass matrices in 2D.
pub const P1_MASS_INTERVAL: (f64, f64) = (0.5, 2.0);

/// Error-reduction factor of `l` Chebyshev steps on `[lmin, lmax]`:
/// `1 / T_l((lmax + lmin) / (lmax − lmin))`.
pub fn eta_factor(l: usize, lmin: f64, lmax: f64) -> Result<f64> {
    if !(lmax - lmin > DEGENERATE_WIDTH) || !(lmin > 0.0) {
        return Err(Error::DegenerateInterval { lo: lmin, hi: lmax });
    }
    if l == 0 {
        return Err(Error::InvalidArgument("Chebyshev iteration count must be >= 1".into()));
    }
    Ok(1.0 / chebyshev_t(l, (lmax + lmin) / (lmax - lmin)))
}

/// How the Chebyshev parameters are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SpectralInterval {
    /// The a-priori P1 enclosure `[1/2, 2]`.
    #[default]
    Analytic,
    /// Computed extremes of `diag(M)⁻¹ M`.
    Measured,
}

impl FromStr for SpectralInterval {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(SpectralInterval::Analytic),
            "measured" => Ok(SpectralInterval::Measured),
            _ => Err(Error::InvalidArgument(format!("unknown spectral interval `{s}`"))),
        }
    }
}

/// `l` steps of Chebyshev semi-iteration for `M x = r` from `x = 0`, with
/// Jacobi splitting. The induced map `r ↦ x` is a fixed polynomial in
/// `D⁻¹M` times `D⁻¹`, hence symmetric.
#[derive(Clone, Debug)]
pub struct ChebyshevSolver {
    m: CsrMatrix,
    inv_diag: Vec<f64>,
    iters: usize,
    interval: (f64, f64),
    // a diagonal M is inverted exactly by its Jacobi splitting
    diagonal: bool,
}

impl ChebyshevSolver {
    pub fn new(m: CsrMatrix, iters: usize, interval: (f64, f64)) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        if iters == 0 {
            return Err(Error::InvalidArgument("Chebyshev iteration count must be >= 1".into()));
        }
        let diag = m.diagonal();
        if let Some(i) = diag.iter().position(|d| !(*d > 0.0)) {
            return Err(Error::NotSpd { index: i, pivot: diag[i] });
        }
        let diagonal = m.nnz() == m.rows();
        if !diagonal {
            eta_factor(iters, interval.0, interval.1)?;
        }
        let inv_diag = diag.iter().map(|d| 1.0 / d).collect();
        Ok(ChebyshevSolver { m, inv_diag, iters, interval, diagonal })
    }

    /// Uses the P1 mass-matrix enclosure `[1/2, 2]`.
    pub fn analytic(m: CsrMatrix, iters: usize) -> Result<Self> {
        Self::new(m, iters, P1_MASS_INTERVAL)
    }

    /// Uses the computed extremes of `diag(M)⁻¹ M`.
    pub fn measured(m: CsrMatrix, iters: usize) -> Result<Self> {
        let interval = jacobi_interval(&m)?;
        Self::new(m, iters, interval)
    }

    pub fn with_interval(m: CsrMatrix, iters: usize, kind: SpectralInterval) -> Result<Self> {
        match kind {
            SpectralInterval::Analytic => Self::analytic(m, iters),
            SpectralInterval::Measured => Self::measured(m, iters),
        }
    }

    pub fn iters(&self) -> usize {
        self.iters
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.m
    }

    /// Error factor guaranteed when the spectrum of `D⁻¹M` lies in the
    /// interval; zero for a diagonal matrix.
    pub fn eta(&self) -> f64 {
        if self.diagonal {
            0.0
        } else {
            eta_factor(self.iters, self.interval.0, self.interval.1).expect("checked at construction")
        }
    }

    pub fn chebyshev_apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len(self.m.rows(), r.len())?;
        Ok(self.apply(r))
    }
}

impl LinearOperator for ChebyshevSolver {
    fn dim(&self) -> usize {
        self.m.rows()
    }

    fn apply_into(&self, r: &[f64], x: &mut [f64]) {
        let n = r.len();
        if self.diagonal {
            x.iter_mut().zip(r).zip(&self.inv_diag).for_each(|((xi, ri), d)| *xi = ri * d);
            return;
        }
        let (a, b) = self.interval;
        let theta = 0.5 * (a + b);
        let delta = 0.5 * (b - a);
        let sigma = theta / delta;
        let mut rho = 1.0 / sigma;
        let mut d: Vec<f64> = r.iter().zip(&self.inv_diag).map(|(ri, di)| ri * di / theta).collect();
        x.copy_from_slice(&d);
        let mut res = vec![0.0; n];
        let mut md = vec![0.0; n];
        if self.iters > 1 {
            self.m.matvec_into(x, &mut md);
            res.iter_mut().zip(r).zip(&md).for_each(|((s, ri), mi)| *s = ri - mi);
        }
        for k in 1..self.iters {
            let rho_next = 1.0 / (2.0 * sigma - rho);
            let c1 = rho_next * rho;
            let c2 = 2.0 * rho_next / delta;
            for i in 0..n {
                d[i] = c1 * d[i] + c2 * self.inv_diag[i] * res[i];
                x[i] += d[i];
            }
            rho = rho_next;
            if k + 1 < self.iters {
                self.m.matvec_into(&d, &mut md);
                res.iter_mut().zip(&md).for_each(|(s, mi)| *s -= mi);
            }
        }
    }

    fn is_spd(&self) -> bool {
        true
    }
}

/// Extremes of `diag(M)⁻¹ M`.
pub fn jacobi_interval(m: &CsrMatrix) -> Result<(f64, f64)> {
    let inv_diag: Vec<f64> = m.diagonal().iter().map(|d| 1.0 / d).collect();
    let z = SparseOperator::new(m.clone(), true)?;
    let w_inv = FnOperator::new(m.rows(), true, |x: &[f64], y: &mut [f64]| {
        y.iter_mut().zip(x).zip(&inv_diag).for_each(|((yi, xi), d)| *yi = xi * d)
    });
    let s = pencil_spectrum(&z, &w_inv)?;
    Ok((s.min(), s.max()))
}

/// `Â⁻¹ = (1/β) · Cheb(M)` for `A = βM`.
pub fn build_ahat_inverse(beta: f64, cheb: Arc<ChebyshevSolver>) -> Result<Arc<dyn LinearOperator>> {
    check_beta(beta)?;
    Ok(Arc::new(Scaled::new(1.0 / beta, cheb)))
}

/// `Ŝ⁻¹ = β · Cheb(M)` for `S = (1/β) M`.
pub fn build_shat_inverse(beta: f64, cheb: Arc<ChebyshevSolver>) -> Result<Arc<dyn LinearOperator>> {
    check_beta(beta)?;
    Ok(Arc::new(Scaled::new(beta, cheb)))
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")))
    }
}

/// Surrogate for the multigrid solver applied to an SPD matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AmgMode {
    /// Sparse Cholesky; the approximation is exact.
    #[default]
    Exact,
    /// `k` symmetric Gauss–Seidel sweeps from a zero initial guess.
    Sgs(usize),
    /// Two cycles of a two-grid method: plain aggregation, two symmetric
    /// Gauss–Seidel sweeps before and after, direct coarse solve.
    TwoGrid,
}

impl FromStr for AmgMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(AmgMode::Exact),
            "two-grid" => Ok(AmgMode::TwoGrid),
            _ => {
                let k = s
                    .strip_prefix("sgs:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|k| *k >= 1)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown amg mode `{s}`")))?;
                Ok(AmgMode::Sgs(k))
            }
        }
    }
}

impl fmt::Display for AmgMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmgMode::Exact => write!(f, "exact"),
            AmgMode::Sgs(k) => write!(f, "sgs:{k}"),
            AmgMode::TwoGrid => write!(f, "two-grid"),
        }
    }
}

impl Serialize for AmgMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AmgMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

const TWO_GRID_SWEEPS: usize = 2;
const TWO_GRID_CYCLES: usize = 2;

enum AmgKind {
    Exact(BandCholesky),
    Sgs(usize),
    TwoGrid { aggregate: Vec<usize>, coarse: Cholesky },
}

/// Fixed SPD approximation of `Z⁻¹`.
pub struct SurrogateAmg {
    z: CsrMatrix,
    mode: AmgMode,
    kind: AmgKind,
}

impl SurrogateAmg {
    pub fn new(z: CsrMatrix, mode: AmgMode) -> Result<Self> {
        if z.rows() != z.cols() {
            return Err(Error::NotSquare { rows: z.rows(), cols: z.cols() });
        }
        let kind = match mode {
            AmgMode::Exact => AmgKind::Exact(BandCholesky::new(&z)?),
            AmgMode::Sgs(k) => {
                check_positive_diagonal(&z)?;
                AmgKind::Sgs(k)
            }
            AmgMode::TwoGrid => {
                check_positive_diagonal(&z)?;
                let aggregate = aggregate_nodes(&z);
                let coarse = galerkin_coarse(&z, &aggregate)?;
                AmgKind::TwoGrid { aggregate, coarse }
            }
        };
        Ok(SurrogateAmg { z, mode, kind })
    }

    pub fn mode(&self) -> AmgMode {
        self.mode
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.z
    }

    pub fn coarse_size(&self) -> Option<usize> {
        match &self.kind {
            AmgKind::TwoGrid { coarse, .. } => Some(coarse.order()),
            _ => None,
        }
    }

    /// Extremes of `(Ẑ M⁻¹ Ẑ)⁻¹ (Z M⁻¹ Z)`, where `Ẑ⁻¹` is this operator.
    /// The exact mode reports `(1, 1)` without computation.
    pub fn quality(&self, m: &CsrMatrix) -> Result<(f64, f64)> {
        if self.mode == AmgMode::Exact {
            return Ok((1.0, 1.0));
        }
        measure_quality(&self.z, self, m)
    }

    fn sgs_sweep(&self, r: &[f64], x: &mut [f64]) {
        gauss_seidel(&self.z, r, x, false);
        gauss_seidel(&self.z, r, x, true);
    }
}

/// Extremes of `(Ẑ M⁻¹ Ẑ)⁻¹ (Z M⁻¹ Z)` for an arbitrary SPD approximation
/// `z_hat_inv` of `Z⁻¹`.
pub fn measure_quality(z: &CsrMatrix, z_hat_inv: &dyn LinearOperator, m: &CsrMatrix) -> Result<(f64, f64)> {
    let m_fac = BandCholesky::new(m)?;
    let n = z.rows();
    let zmz = FnOperator::new(n, true, |x: &[f64], y: &mut [f64]| {
        let mut t = z.matvec(x);
        m_fac.solve_in_place(&mut t);
        z.matvec_into(&t, y);
    });
    let w_inv = FnOperator::new(n, true, |x: &[f64], y: &mut [f64]| {
        let t = z_hat_inv.apply(x);
        let u = m.matvec(&t);
        z_hat_inv.apply_into(&u, y);
    });
    let s = pencil_spectrum(&zmz, &w_inv)?;
    Ok((s.min(), s.max()))
}

impl LinearOperator for SurrogateAmg {
    fn dim(&self) -> usize {
        self.z.rows()
    }

    fn apply_into(&self, r: &[f64], x: &mut [f64]) {
        match &self.kind {
            AmgKind::Exact(fac) => {
                x.copy_from_slice(r);
                fac.solve_in_place(x);
            }
            AmgKind::Sgs(k) => {
                x.iter_mut().for_each(|v| *v = 0.0);
                for _ in 0..*k {
                    self.sgs_sweep(r, x);
                }
            }
            AmgKind::TwoGrid { aggregate, coarse } => {
                x.iter_mut().for_each(|v| *v = 0.0);
                let nc = coarse.order();
                let mut res = vec![0.0; r.len()];
                for _ in 0..TWO_GRID_CYCLES {
                    for _ in 0..TWO_GRID_SWEEPS {
                        self.sgs_sweep(r, x);
                    }
                    self.z.matvec_into(x, &mut res);
                    let mut rc = vec![0.0; nc];
                    for (i, a) in aggregate.iter().enumerate() {
                        rc[*a] += r[i] - res[i];
                    }
                    coarse.forward_in_place(&mut rc);
                    coarse.backward_in_place(&mut rc);
                    for (i, a) in aggregate.iter().enumerate() {
                        x[i] += rc[*a];
                    }
                    for _ in 0..TWO_GRID_SWEEPS {
                        self.sgs_sweep(r, x);
                    }
                }
            }
        }
    }

    fn is_spd(&self) -> bool {
        true
    }
}

fn check_positive_diagonal(z: &CsrMatrix) -> Result<()> {
    match z.diagonal().iter().position(|d| !(*d > 0.0)) {
        Some(i) => Err(Error::NotSpd { index: i, pivot: z.diagonal()[i] }),
        None => Ok(()),
    }
}

/// One Gauss–Seidel sweep for `Z x = r`, in place.
fn gauss_seidel(z: &CsrMatrix, r: &[f64], x: &mut [f64], backward: bool) {
    let n = z.rows();
    let mut step = |i: usize| {
        let mut s = r[i];
        let mut diag = 0.0;
        for (j, v) in z.row(i) {
            if j == i {
                diag = v;
            } else {
                s -= v * x[j];
            }
        }
        x[i] = s / diag;
    };
    if backward {
        (0..n).rev().for_each(&mut step);
    } else {
        (0..n).for_each(&mut step);
    }
}

/// Greedy plain aggregation on the matrix graph. Returns the aggregate index
/// of every node.
fn aggregate_nodes(z: &CsrMatrix) -> Vec<usize> {
    const NONE: usize = usize::MAX;
    let n = z.rows();
    let mut agg = vec![NONE; n];
    let mut count = 0;
    for i in 0..n {
        if agg[i] != NONE {
            continue;
        }
        if z.row(i).all(|(j, _)| agg[j] == NONE) {
            for (j, _) in z.row(i) {
                agg[j] = count;
            }
            agg[i] = count;
            count += 1;
        }
    }
    for i in 0..n {
        if agg[i] == NONE {
            agg[i] = z.row(i).map(|(j, _)| agg[j]).find(|a| *a != NONE).unwrap_or_else(|| {
                count += 1;
                count - 1
            });
        }
    }
    agg
}

/// `Pᵀ Z P` for the piecewise-constant prolongation, factored.
fn galerkin_coarse(z: &CsrMatrix, aggregate: &[usize]) -> Result<Cholesky> {
    let nc = aggregate.iter().max().map_or(0, |m| m + 1);
    let mut coarse = DenseMatrix::zeros(nc, nc);
    for (i, j, v) in z.triplets() {
        coarse[(aggregate[i], aggregate[j])] += v;
    }
    cholesky_factor(&DenseSymMatrix::new(coarse)?)
}

/// `X̂⁻¹ = scale · Ẑ⁻¹ M Ẑ⁻¹`.
pub struct XhatInverse {
    amg: Arc<SurrogateAmg>,
    m: CsrMatrix,
    scale: f64,
}

impl XhatInverse {
    pub fn amg(&self) -> &Arc<SurrogateAmg> {
        &self.amg
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl LinearOperator for XhatInverse {
    fn dim(&self) -> usize {
        self.m.rows()
    }

    fn apply_into(&self, r: &[f64], y: &mut [f64]) {
        let t = self.amg.apply(r);
        let u = self.m.matvec(&t);
        self.amg.apply_into(&u, y);
        if self.scale != 1.0 {
            y.iter_mut().for_each(|v| *v *= self.scale);
        }
    }

    fn is_spd(&self) -> bool {
        true
    }
}

/// Full observation: `X̂ = (3/4) Ẑ M⁻¹ Ẑ` with `Z = √β L + M`, so
/// `X̂⁻¹ = (4/3) Ẑ⁻¹ M Ẑ⁻¹`.
pub fn build_xhat_inverse_full(beta: f64, m: &CsrMatrix, l: &CsrMatrix, mode: AmgMode) -> Result<XhatInverse> {
    check_beta(beta)?;
    let z = l.linear_combination(beta.sqrt(), m, 1.0)?;
    let amg = Arc::new(SurrogateAmg::new(z, mode)?);
    Ok(XhatInverse { amg, m: m.clone(), scale: 4.0 / 3.0 })
}

/// Boundary observation: `X̂ = Ẑ M⁻¹ Ẑ` with `Z = √β L`.
pub fn build_xhat_inverse_boundary(beta: f64, m: &CsrMatrix, l: &CsrMatrix, mode: AmgMode) -> Result<XhatInverse> {
    check_beta(beta)?;
    let z = l.scaled(beta.sqrt());
    let amg = Arc::new(SurrogateAmg::new(z, mode)?);
    Ok(XhatInverse { amg, m: m.clone(), scale: 1.0 })
}
