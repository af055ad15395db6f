//! Randomized verification of the eigenvalue bounds on dense systems whose
//! inner blocks hit prescribed indicator intervals exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bounds_for, SpectralBounds, Variant, CONTAINMENT_INFLATION};
use crate::error::{Error, Result};
use crate::indicators::{compute_indicators, GammaIndicators};
use crate::linalg::{cholesky_factor, gen_sym_eigenvalues, gen_sym_eigenvalues_inv, sym_eigenvalues, Cholesky};
use crate::linalg::{DenseMatrix, DenseSymMatrix, Spectrum};
use crate::operator::{LinearOperator, Scaled};
use crate::system::{Block, BlockPreconditioner, DoubleSaddleSystem, RANK_TOL};

/// Lower ends of the `γ_A` grid.
pub const GRID_A_MIN: [f64; 3] = [0.1, 0.3, 0.9];
/// Upper ends of the `γ_A` grid.
pub const GRID_A_MAX: [f64; 3] = [1.2, 1.5, 1.99];
/// Lower ends of the `γ_R` and `γ_K` grids.
pub const GRID_RK_MIN: [f64; 3] = [0.1, 0.3, 0.9];
/// Upper ends of the `γ_R` and `γ_K` grids.
pub const GRID_RK_MAX: [f64; 3] = [1.2, 1.8, 5.0];
/// Redraws allowed when a random draw cannot meet its targets.
pub const MAX_RETRIES: usize = 10;
/// Draws whose Schur complements are worse conditioned than this are
/// numerically rank deficient and redrawn; matches [`RANK_TOL`].
pub const MAX_CONDITION: f64 = 1.0 / RANK_TOL;
/// Allowed relative deviation of measured indicators from their targets.
pub const INDICATOR_TOL: f64 = 1e-8;

/// Target extremes for `γ_A`, `γ_R`, `γ_K`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub gamma_a: (f64, f64),
    pub gamma_r: (f64, f64),
    pub gamma_k: (f64, f64),
}

impl Targets {
    pub fn new(gamma_a: (f64, f64), gamma_r: (f64, f64), gamma_k: (f64, f64)) -> Result<Self> {
        for (name, (lo, hi)) in [("gamma_A", gamma_a), ("gamma_R", gamma_r), ("gamma_K", gamma_k)] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::InvalidArgument(format!("target {name} = ({lo}, {hi}) is not a positive interval")));
            }
        }
        if gamma_a.1 >= 2.0 {
            return Err(Error::InvalidArgument(format!("target gamma_A.max = {} must be below 2", gamma_a.1)));
        }
        Ok(Targets { gamma_a, gamma_r, gamma_k })
    }

    pub fn unit() -> Self {
        Targets { gamma_a: (1.0, 1.0), gamma_r: (1.0, 1.0), gamma_k: (1.0, 1.0) }
    }
}

/// The 3⁶ target combinations, `γ_A.min` varying slowest.
pub fn parameter_grid() -> Vec<Targets> {
    let mut cells = Vec::with_capacity(729);
    for a0 in GRID_A_MIN {
        for a1 in GRID_A_MAX {
            for r0 in GRID_RK_MIN {
                for r1 in GRID_RK_MAX {
                    for k0 in GRID_RK_MIN {
                        for k1 in GRID_RK_MAX {
                            cells.push(Targets { gamma_a: (a0, a1), gamma_r: (r0, r1), gamma_k: (k0, k1) });
                        }
                    }
                }
            }
        }
    }
    cells
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EMode {
    Zero,
    /// `E = GᵀG` with a Gaussian `G` of half the rows, so `E` is singular.
    RandomPsd,
}

impl fmt::Display for EMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EMode::Zero => "zero",
            EMode::RandomPsd => "random-psd",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticParams {
    pub targets: Targets,
    /// Block sizes are drawn as `base + ⌊spread · U(0,1)⌋`.
    pub base: usize,
    pub spread: usize,
    pub square_c: bool,
    pub e_mode: EMode,
    pub seed: u64,
}

impl SyntheticParams {
    pub fn new(targets: Targets, seed: u64) -> Self {
        SyntheticParams { targets, base: 60, spread: 10, square_c: false, e_mode: EMode::Zero, seed }
    }

    pub fn with_square_c(mut self, square_c: bool) -> Self {
        self.square_c = square_c;
        self
    }

    pub fn with_e_mode(mut self, e_mode: EMode) -> Self {
        self.e_mode = e_mode;
        self
    }

    pub fn with_dimensions(mut self, base: usize, spread: usize) -> Self {
        self.base = base;
        self.spread = spread;
        self
    }
}

/// A generated system with its preconditioner.
pub struct SyntheticCase {
    pub params: SyntheticParams,
    pub system: DoubleSaddleSystem,
    pub preconditioner: BlockPreconditioner,
    /// Indicators known by construction (`γ_X`, `γ_E` measured in E mode).
    pub indicators: GammaIndicators,
    /// `γ_E.max` imposed on `E`, when `E ≠ 0`.
    pub e_scale: Option<f64>,
}

/// `(c, s)` such that the extremes of `s·λ/(λ + c)` over the spectrum
/// `[lmin, lmax]` equal `target`.
pub fn fit_shift_scale(lmin: f64, lmax: f64, target: (f64, f64)) -> Result<(f64, f64)> {
    let (t_lo, t_hi) = target;
    let infeasible = || Error::TargetInfeasible { lo: t_lo, hi: t_hi, spec_lo: lmin, spec_hi: lmax };
    if !(lmin > 0.0 && lmin <= lmax) {
        return Err(infeasible());
    }
    let rho = t_lo / t_hi;
    if lmax - lmin <= 1e-14 * lmax {
        return if rho == 1.0 { Ok((0.0, t_hi)) } else { Err(infeasible()) };
    }
    let (c, s) = if rho * lmax > lmin {
        // increasing map: lmin ↦ t_lo, lmax ↦ t_hi
        let c = lmin * lmax * (1.0 - rho) / (rho * lmax - lmin);
        (c, t_hi * (lmax + c) / lmax)
    } else {
        // decreasing map: lmin ↦ t_hi, lmax ↦ t_lo
        let c = -lmin * lmax * (1.0 - rho) / (lmax - rho * lmin);
        (c, t_hi * (lmin + c) / lmin)
    };
    if !(c > -lmin && s > 0.0 && s.is_finite()) {
        return Err(infeasible());
    }
    Ok((c, s))
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn draw_dimensions(rng: &mut ChaCha8Rng, p: &SyntheticParams) -> (usize, usize, usize) {
    let mut draw = || p.base + (p.spread as f64 * rng.random::<f64>()) as usize;
    loop {
        let (n, m) = (draw(), draw());
        let q = if p.square_c { m } else { draw() };
        if n >= m && m >= q {
            return (n, m, q);
        }
    }
}

/// `M̂ = (M + cI)/s` hitting `target`; returns `s·(M + cI)⁻¹` as an operator.
fn fitted_inverse(m: &DenseSymMatrix, target: (f64, f64)) -> Result<(Arc<Cholesky>, f64)> {
    let spec = sym_eigenvalues(m)?;
    let cond = spec.max() / spec.min();
    if !(spec.min() > 0.0 && cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned { cond, limit: MAX_CONDITION });
    }
    let (c, s) = fit_shift_scale(spec.min(), spec.max(), target)?;
    Ok((Arc::new(cholesky_factor(&m.shifted(c))?), s))
}

/// `s · G (LLᵀ)⁻¹ Gᵀ` through `Y = L⁻¹Gᵀ`.
fn congruence_with(g: &DenseMatrix, chol: &Cholesky, s: f64) -> Result<DenseSymMatrix> {
    let y = chol.forward_matrix(&g.transpose())?;
    let mut out = y.transpose().matmul(&y)?;
    out.scale(s);
    DenseSymMatrix::new(out)
}

fn try_generate(p: &SyntheticParams, rng: &mut ChaCha8Rng) -> Result<SyntheticCase> {
    let t = p.targets;
    let (n, m, q) = draw_dimensions(rng, p);

    let r = gaussian(rng, n, n);
    let sym = DenseSymMatrix::new(r)?;
    let shift = 1.01 * sym_eigenvalues(&sym)?.min().abs();
    let a = sym.shifted(shift);
    let b = gaussian(rng, m, n);
    let c = gaussian(rng, q, m);

    let (a_chol, a_s) = fitted_inverse(&a, t.gamma_a)?;
    let s_tilde = congruence_with(&b, &a_chol, a_s)?;
    let (s_chol, s_s) = fitted_inverse(&s_tilde, t.gamma_r)?;
    let k0 = congruence_with(&c, &s_chol, s_s)?;
    let (x_chol, x_s) = fitted_inverse(&k0, t.gamma_k)?;

    let x_inv: Arc<dyn LinearOperator> = Arc::new(Scaled::new(x_s, x_chol.clone()));
    let (e, e_scale) = match p.e_mode {
        EMode::Zero => (DenseMatrix::zeros(q, q), None),
        EMode::RandomPsd => {
            let g = gaussian(rng, q.div_ceil(2), q);
            let e = DenseSymMatrix::new(g.transpose().matmul(&g)?)?;
            let x_inv_dense = x_chol.inverse().scaled(x_s);
            let top = gen_sym_eigenvalues_inv(&e, &x_inv_dense)?.max();
            let scale = 0.1 + 0.9 * rng.random::<f64>();
            (e.scaled(scale / top).into_matrix(), Some(scale))
        }
    };

    let system = DoubleSaddleSystem::new(
        Block::Dense(a.into_matrix()),
        Block::Dense(b),
        Block::Dense(c),
        Block::Dense(e),
        vec![1.0; n + m + q],
    )?;
    let preconditioner = BlockPreconditioner::new(
        &system,
        Arc::new(Scaled::new(a_s, a_chol)),
        Arc::new(Scaled::new(s_s, s_chol)),
        x_inv,
    )?;
    let indicators = match p.e_mode {
        EMode::Zero => GammaIndicators::e_zero(t.gamma_a, t.gamma_r, t.gamma_k)?,
        EMode::RandomPsd => {
            let measured = compute_indicators(&system, &preconditioner)?;
            GammaIndicators::new(t.gamma_a, t.gamma_r, measured.gamma_x, measured.gamma_e, t.gamma_k)?
        }
    };
    Ok(SyntheticCase { params: *p, system, preconditioner, indicators, e_scale })
}

/// Draws a random system whose preconditioner indicators match the targets,
/// redrawing up to [`MAX_RETRIES`] times on infeasible or numerically
/// rank-deficient draws.
pub fn generate_case(p: &SyntheticParams) -> Result<SyntheticCase> {
    Targets::new(p.targets.gamma_a, p.targets.gamma_r, p.targets.gamma_k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut last = None;
    for _ in 0..=MAX_RETRIES {
        match try_generate(p, &mut rng) {
            Ok(case) => return Ok(case),
            Err(
                e @ (Error::TargetInfeasible { .. }
                | Error::NotSpd { .. }
                | Error::IllConditioned { .. }
                | Error::InvalidSystem(_)),
            ) => {
                log::debug!("seed {}: redrawing after {e}", p.seed);
                last = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// All eigenvalues of `P⁻¹ A_full`, ascending.
pub fn eigen_verify(sys: &DoubleSaddleSystem, pc: &BlockPreconditioner) -> Result<Spectrum> {
    gen_sym_eigenvalues_inv(&sys.assemble_full_matrix()?, &pc.materialize_inverse()?)
}

/// As [`eigen_verify`], whitening with the assembled `P` instead of `P⁻¹`.
pub fn eigen_verify_assembled(sys: &DoubleSaddleSystem, pc: &BlockPreconditioner) -> Result<Spectrum> {
    gen_sym_eigenvalues(&sys.assemble_full_matrix()?, &pc.assemble_preconditioner_dense()?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridPreset {
    /// `E = 0`, 25 repeats.
    Full,
    /// `E = 0`, 3 repeats.
    Ci,
    /// `E = 0`, `m = p`, 3 repeats.
    SquareC,
    /// Random semidefinite `E`, 3 repeats.
    WithE,
}

impl GridPreset {
    pub fn default_repeats(&self) -> usize {
        match self {
            GridPreset::Full => 25,
            _ => 3,
        }
    }

    pub fn square_c(&self) -> bool {
        matches!(self, GridPreset::SquareC)
    }

    pub fn e_mode(&self) -> EMode {
        match self {
            GridPreset::WithE => EMode::RandomPsd,
            _ => EMode::Zero,
        }
    }

    /// One parameter set per grid cell; `base_seed` is the seed of cell 0.
    pub fn cells(&self, base_seed: u64) -> Vec<SyntheticParams> {
        parameter_grid()
            .into_iter()
            .map(|t| SyntheticParams::new(t, base_seed).with_square_c(self.square_c()).with_e_mode(self.e_mode()))
            .collect()
    }
}

impl FromStr for GridPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(GridPreset::Full),
            "ci" => Ok(GridPreset::Ci),
            "square-c" => Ok(GridPreset::SquareC),
            "with-e" => Ok(GridPreset::WithE),
            other => Err(Error::InvalidArgument(format!(
                "unknown preset `{other}` (expected full, ci, square-c or with-e)"
            ))),
        }
    }
}

impl fmt::Display for GridPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridPreset::Full => "full",
            GridPreset::Ci => "ci",
            GridPreset::SquareC => "square-c",
            GridPreset::WithE => "with-e",
        })
    }
}

/// Bound variants that apply to a case.
pub fn applicable_variants(square_c: bool, e_mode: EMode) -> Vec<Variant> {
    let mut v = match e_mode {
        EMode::Zero => vec![Variant::E0],
        EMode::RandomPsd => vec![Variant::ENonzero],
    };
    if square_c {
        v.push(match e_mode {
            EMode::Zero => Variant::E0SquareC,
            EMode::RandomPsd => Variant::ENonzeroSquareC,
        });
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantOutcome {
    pub bounds: SpectralBounds,
    pub contained: bool,
}

/// Extremes of a spectrum of `P⁻¹A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenExtremes {
    pub min: f64,
    pub max_negative: f64,
    pub min_positive: f64,
    pub max: f64,
    pub num_negative: usize,
}

impl EigenExtremes {
    pub fn from_spectrum(s: &Spectrum) -> Self {
        let (min, max_negative) = s.negative_extremes().unwrap_or((f64::NAN, f64::NAN));
        let (min_positive, max) = s.positive_extremes().unwrap_or((f64::NAN, f64::NAN));
        EigenExtremes { min, max_negative, min_positive, max, num_negative: s.count_below(0.0) }
    }
}

/// Result of one generated case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub cell: usize,
    pub repeat: usize,
    pub seed: u64,
    pub dims: (usize, usize, usize),
    pub square_c: bool,
    pub e_mode: EMode,
    pub e_scale: Option<f64>,
    pub targets: Targets,
    pub measured: Option<GammaIndicators>,
    /// Largest relative deviation of the measured `γ_A`, `γ_R`, `γ_K` from
    /// their targets.
    pub indicator_error: Option<f64>,
    pub outcomes: BTreeMap<String, VariantOutcome>,
    pub extremes: Option<EigenExtremes>,
    /// `E0.neg_hi − E0_squareC.neg_hi` (refinement never loosens).
    pub refine_slack: Option<f64>,
    pub passed: bool,
    pub error: Option<String>,
}

impl CaseRecord {
    fn failed(params: &SyntheticParams, cell: usize, repeat: usize, err: Error) -> Self {
        CaseRecord {
            cell,
            repeat,
            seed: params.seed,
            dims: (0, 0, 0),
            square_c: params.square_c,
            e_mode: params.e_mode,
            e_scale: None,
            targets: params.targets,
            measured: None,
            indicator_error: None,
            outcomes: BTreeMap::new(),
            extremes: None,
            refine_slack: None,
            passed: false,
            error: Some(err.to_string()),
        }
    }
}

fn relative_gap(x: (f64, f64), t: (f64, f64)) -> f64 {
    let d = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    d(x.0, t.0).max(d(x.1, t.1))
}

fn evaluate(params: &SyntheticParams, cell: usize, repeat: usize) -> Result<CaseRecord> {
    let case = generate_case(params)?;
    let sys = &case.system;
    let measured = compute_indicators(sys, &case.preconditioner)?;
    let t = params.targets;
    let indicator_error = relative_gap(measured.gamma_a, t.gamma_a)
        .max(relative_gap(measured.gamma_r, t.gamma_r))
        .max(relative_gap(measured.gamma_k, t.gamma_k));
    let spectrum = eigen_verify(sys, &case.preconditioner)?;
    let extremes = EigenExtremes::from_spectrum(&spectrum);
    let mut outcomes = BTreeMap::new();
    for v in applicable_variants(params.square_c, params.e_mode) {
        let bounds = bounds_for(v, &case.indicators, (sys.p(), sys.m()))?;
        let contained = spectrum.eigenvalues().iter().all(|l| bounds.contains(*l, CONTAINMENT_INFLATION));
        outcomes.insert(v.name().to_string(), VariantOutcome { bounds, contained });
    }
    let refine_slack = match (outcomes.get(Variant::E0.name()), outcomes.get(Variant::E0SquareC.name())) {
        (Some(base), Some(refined)) => Some(base.bounds.negative.hi - refined.bounds.negative.hi),
        _ => None,
    };
    let passed = outcomes.values().all(|o| o.contained) && extremes.num_negative == sys.m();
    Ok(CaseRecord {
        cell,
        repeat,
        seed: params.seed,
        dims: (sys.n(), sys.m(), sys.p()),
        square_c: params.square_c,
        e_mode: params.e_mode,
        e_scale: case.e_scale,
        targets: t,
        measured: Some(measured),
        indicator_error: Some(indicator_error),
        outcomes,
        extremes: Some(extremes),
        refine_slack,
        passed,
        error: None,
    })
}

/// Generates, measures and verifies one case; failures are recorded.
pub fn run_case(params: &SyntheticParams, cell: usize, repeat: usize) -> CaseRecord {
    evaluate(params, cell, repeat).unwrap_or_else(|e| CaseRecord::failed(params, cell, repeat, e))
}

/// Worst (smallest) distance from an eigenvalue extreme to the matching
/// bound endpoint; negative means the endpoint was crossed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EndpointSlack {
    pub neg_lo: f64,
    pub neg_hi: f64,
    pub pos_lo: f64,
    pub pos_hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub checked: usize,
    pub contained: usize,
    pub worst_slack: EndpointSlack,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub cases: usize,
    pub passed: usize,
    pub pass_rate: f64,
    pub errors: usize,
    pub inertia_failures: usize,
    pub max_indicator_error: f64,
    pub min_refine_slack: Option<f64>,
    pub variants: BTreeMap<String, VariantSummary>,
}

impl GridSummary {
    pub fn all_passed(&self) -> bool {
        self.cases > 0 && self.passed == self.cases
    }
}

pub struct GridReport {
    pub records: Vec<CaseRecord>,
    pub summary: GridSummary,
}

/// Runs every cell `repeats` times. The case seed is
/// `cell.seed + index · repeats + r`.
pub fn run_grid(cells: &[SyntheticParams], repeats: usize, workers: Option<usize>) -> Result<GridReport> {
    let jobs: Vec<(usize, usize, SyntheticParams)> = cells
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            (0..repeats).map(move |r| {
                let mut p = *c;
                p.seed = c.seed + (i * repeats + r) as u64;
                (i, r, p)
            })
        })
        .collect();
    let run = || jobs.par_iter().map(|(i, r, p)| run_case(p, *i, *r)).collect::<Vec<_>>();
    let records = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(run),
        None => run(),
    };
    let summary = summarize(&records);
    Ok(GridReport { records, summary })
}

pub fn summarize(records: &[CaseRecord]) -> GridSummary {
    let mut variants: BTreeMap<String, VariantSummary> = BTreeMap::new();
    let mut min_refine: Option<f64> = None;
    let mut max_err: f64 = 0.0;
    let mut inertia = 0;
    for rec in records {
        if let Some(e) = rec.indicator_error {
            max_err = max_err.max(e);
        }
        if let Some(s) = rec.refine_slack {
            min_refine = Some(min_refine.map_or(s, |m| m.min(s)));
        }
        let Some(x) = rec.extremes else { continue };
        if x.num_negative != rec.dims.1 {
            inertia += 1;
        }
        for (name, o) in &rec.outcomes {
            let b = &o.bounds;
            let hull = b.positive_hull();
            let entry = variants.entry(name.clone()).or_insert(VariantSummary {
                checked: 0,
                contained: 0,
                worst_slack: EndpointSlack {
                    neg_lo: f64::INFINITY,
                    neg_hi: f64::INFINITY,
                    pos_lo: f64::INFINITY,
                    pos_hi: f64::INFINITY,
                },
            });
            entry.checked += 1;
            entry.contained += o.contained as usize;
            let w = &mut entry.worst_slack;
            w.neg_lo = w.neg_lo.min(x.min - b.negative.lo);
            w.neg_hi = w.neg_hi.min(b.negative.hi - x.max_negative);
            w.pos_lo = w.pos_lo.min(x.min_positive - hull.lo);
            w.pos_hi = w.pos_hi.min(hull.hi - x.max);
        }
    }
    let passed = records.iter().filter(|r| r.passed).count();
    GridSummary {
        cases: records.len(),
        passed,
        pass_rate: if records.is_empty() { 0.0 } else { passed as f64 / records.len() as f64 },
        errors: records.iter().filter(|r| r.error.is_some()).count(),
        inertia_failures: inertia,
        max_indicator_error: max_err,
        min_refine_slack: min_refine,
        variants,
    }
}

/// One row per case with a fixed column set.
pub fn records_to_csv(records: &[CaseRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = [
        "seed", "cell", "repeat", "n", "m", "p", "square_c", "e_mode", "e_scale", "t_a_min", "t_a_max", "t_r_min",
        "t_r_max", "t_k_min", "t_k_max", "g_a_min", "g_a_max", "g_r_min", "g_r_max", "g_x_min", "g_x_max", "g_e_min",
        "g_e_max", "g_k_min", "g_k_max", "indicator_error",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for v in Variant::ALL {
        for col in ["neg_lo", "neg_hi", "pos_lo", "pos_hi", "contained"] {
            header.push(format!("{}_{col}", v.name()));
        }
    }
    for col in ["eig_min", "eig_max_neg", "eig_min_pos", "eig_max", "num_negative", "refine_slack", "passed", "error"] {
        header.push(col.to_string());
    }
    w.write_record(&header)?;

    let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
    for r in records {
        let t = r.targets;
        let mut row = vec![
            r.seed.to_string(),
            r.cell.to_string(),
            r.repeat.to_string(),
            r.dims.0.to_string(),
            r.dims.1.to_string(),
            r.dims.2.to_string(),
            r.square_c.to_string(),
            r.e_mode.to_string(),
            opt(r.e_scale),
        ];
        for v in [t.gamma_a.0, t.gamma_a.1, t.gamma_r.0, t.gamma_r.1, t.gamma_k.0, t.gamma_k.1] {
            row.push(v.to_string());
        }
        match &r.measured {
            Some(g) => {
                for (lo, hi) in [g.gamma_a, g.gamma_r, g.gamma_x, g.gamma_e, g.gamma_k] {
                    row.push(lo.to_string());
                    row.push(hi.to_string());
                }
            }
            None => row.extend(std::iter::repeat_n(String::new(), 10)),
        }
        row.push(opt(r.indicator_error));
        for v in Variant::ALL {
            match r.outcomes.get(v.name()) {
                Some(o) => {
                    let b = &o.bounds;
                    for x in [b.negative.lo, b.negative.hi, b.positive.lo, b.positive.hi] {
                        row.push(x.to_string());
                    }
                    row.push(o.contained.to_string());
                }
                None => row.extend(std::iter::repeat_n(String::new(), 5)),
            }
        }
        match r.extremes {
            Some(x) => {
                for v in [x.min, x.max_negative, x.min_positive, x.max] {
                    row.push(v.to_string());
                }
                row.push(x.num_negative.to_string());
            }
            None => row.extend(std::iter::repeat_n(String::new(), 5)),
        }
        row.push(opt(r.refine_slack));
        row.push(r.passed.to_string());
        row.push(r.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_hits_both_branches() {
        for (lmin, lmax, t) in [(0.5, 40.0, (0.3, 1.8)), (0.5, 40.0, (0.9, 1.2)), (2.0, 3.0, (0.1, 5.0))] {
            let (c, s) = fit_shift_scale(lmin, lmax, t).unwrap();
            let f = |l: f64| s * l / (l + c);
            let (lo, hi) = (f(lmin).min(f(lmax)), f(lmin).max(f(lmax)));
            assert!((lo - t.0).abs() < 1e-12 && (hi - t.1).abs() < 1e-12, "{lo} {hi} {t:?}");
        }
        assert_eq!(fit_shift_scale(1.0, 1.0, (1.0, 1.0)).unwrap(), (0.0, 1.0));
        assert!(fit_shift_scale(1.0, 1.0, (0.5, 1.0)).is_err());
    }

    #[test]
    fn grid_has_729_cells() {
        let g = parameter_grid();
        assert_eq!(g.len(), 729);
        assert_eq!(g[0].gamma_a, (0.1, 1.2));
        assert_eq!(g[728].gamma_k, (0.9, 5.0));
    }

    #[test]
    fn unit_targets_give_two_point_spectrum() {
        let p = SyntheticParams::new(Targets::unit(), 3).with_dimensions(8, 4);
        let case = generate_case(&p).unwrap();
        let s = eigen_verify(&case.system, &case.preconditioner).unwrap();
        assert!(s.eigenvalues().iter().all(|l| (l.abs() - 1.0).abs() < 1e-8));
        assert_eq!(s.count_below(0.0), case.system.m());
    }

    #[test]
    fn small_case_is_contained() {
        let t = Targets::new((0.3, 1.5), (0.1, 5.0), (0.9, 1.2)).unwrap();
        let p = SyntheticParams::new(t, 11).with_dimensions(10, 5);
        let rec = run_case(&p, 0, 0);
        assert!(rec.passed, "{rec:?}");
        assert!(rec.indicator_error.unwrap() < INDICATOR_TOL);
    }
}
