//! Quality indicators of the inner approximations: extreme eigenvalues of
//! `Â⁻¹A`, `Ŝ⁻¹S̃`, `X̂⁻¹X̃`, `X̂⁻¹E` and of `K Kᵀ`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inner::eta_factor;
use crate::linalg::{Spectrum, DenseSymMatrix};
use crate::operator::{LinearOperator, SparseOperator};
use crate::pdeopt::Observation;
use crate::pencil::{pencil_spectrum, FnOperator};
use crate::system::{Block, BlockPreconditioner, DoubleSaddleSystem};

/// Semidefinite pencil eigenvalues below this (relative) size are set to 0.
pub const ZERO_CLAMP: f64 = 1e-10;
/// Slack of the `γ_X` vs `γ_K + γ_E` consistency check.
pub const CONSISTENCY_TOL: f64 = 1e-8;

/// Extreme-eigenvalue pairs `(min, max)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaIndicators {
    pub gamma_a: (f64, f64),
    pub gamma_r: (f64, f64),
    pub gamma_x: (f64, f64),
    pub gamma_e: (f64, f64),
    pub gamma_k: (f64, f64),
}

/// Standing assumptions of the theory. They are recorded, not enforced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionFlags {
    pub a_straddles_one: bool,
    pub r_contains_one: bool,
    pub x_contains_one: bool,
    pub a_max_below_two: bool,
}

impl AssumptionFlags {
    pub fn all_hold(&self) -> bool {
        self.a_straddles_one && self.r_contains_one && self.x_contains_one && self.a_max_below_two
    }

    pub fn violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.a_straddles_one {
            v.push("gamma_A does not straddle 1");
        }
        if !self.r_contains_one {
            v.push("gamma_R interval does not contain 1");
        }
        if !self.x_contains_one {
            v.push("gamma_X interval does not contain 1");
        }
        if !self.a_max_below_two {
            v.push("gamma_A max is not below 2");
        }
        v
    }
}

impl GammaIndicators {
    pub fn new(
        gamma_a: (f64, f64),
        gamma_r: (f64, f64),
        gamma_x: (f64, f64),
        gamma_e: (f64, f64),
        gamma_k: (f64, f64),
    ) -> Result<Self> {
        let g = GammaIndicators { gamma_a, gamma_r, gamma_x, gamma_e, gamma_k };
        g.validate()?;
        Ok(g)
    }

    /// `E = 0` indicators, where `γ_X = γ_K`.
    pub fn e_zero(gamma_a: (f64, f64), gamma_r: (f64, f64), gamma_k: (f64, f64)) -> Result<Self> {
        Self::new(gamma_a, gamma_r, gamma_k, (0.0, 0.0), gamma_k)
    }

    /// The indicators of exact inner blocks with `E = 0`.
    pub fn unit() -> Self {
        GammaIndicators {
            gamma_a: (1.0, 1.0),
            gamma_r: (1.0, 1.0),
            gamma_x: (1.0, 1.0),
            gamma_e: (0.0, 0.0),
            gamma_k: (1.0, 1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("gamma_A", self.gamma_a),
            ("gamma_R", self.gamma_r),
            ("gamma_X", self.gamma_x),
            ("gamma_K", self.gamma_k),
        ];
        for (name, (lo, hi)) in named {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must satisfy 0 < min <= max, got ({lo}, {hi})"
                )));
            }
        }
        let (lo, hi) = self.gamma_e;
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "gamma_E must satisfy 0 <= min <= max, got ({lo}, {hi})"
            )));
        }
        Ok(())
    }

    pub fn is_e_zero(&self) -> bool {
        self.gamma_e.1 == 0.0
    }

    /// `γ_X.min ≥ γ_K.min + γ_E.min` and `γ_X.max ≤ γ_K.max + γ_E.max`, up to
    /// [`CONSISTENCY_TOL`].
    pub fn is_consistent(&self) -> bool {
        self.gamma_x.0 >= self.gamma_k.0 + self.gamma_e.0 - CONSISTENCY_TOL
            && self.gamma_x.1 <= self.gamma_k.1 + self.gamma_e.1 + CONSISTENCY_TOL
    }

    pub fn assumptions(&self) -> AssumptionFlags {
        let contains_one = |(lo, hi): (f64, f64)| lo <= 1.0 && 1.0 <= hi;
        AssumptionFlags {
            a_straddles_one: self.gamma_a.0 < 1.0 && 1.0 < self.gamma_a.1,
            r_contains_one: contains_one(self.gamma_r),
            x_contains_one: contains_one(self.gamma_x),
            a_max_below_two: self.gamma_a.1 < 2.0,
        }
    }

    /// Logs a warning for every failed assumption; returns the failures.
    pub fn warn_assumptions(&self) -> Vec<&'static str> {
        let v = self.assumptions().violations();
        for msg in &v {
            log::warn!("indicator assumption violated: {msg}");
        }
        v
    }
}

#[derive(Serialize, Deserialize)]
struct IndicatorsJson {
    gamma_a_min: f64,
    gamma_a_max: f64,
    gamma_r_min: f64,
    gamma_r_max: f64,
    gamma_x_min: f64,
    gamma_x_max: f64,
    gamma_e_min: f64,
    gamma_e_max: f64,
    gamma_k_min: f64,
    gamma_k_max: f64,
    #[serde(default, skip_deserializing)]
    assumptions: Option<AssumptionFlags>,
}

impl Serialize for GammaIndicators {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IndicatorsJson {
            gamma_a_min: self.gamma_a.0,
            gamma_a_max: self.gamma_a.1,
            gamma_r_min: self.gamma_r.0,
            gamma_r_max: self.gamma_r.1,
            gamma_x_min: self.gamma_x.0,
            gamma_x_max: self.gamma_x.1,
            gamma_e_min: self.gamma_e.0,
            gamma_e_max: self.gamma_e.1,
            gamma_k_min: self.gamma_k.0,
            gamma_k_max: self.gamma_k.1,
            assumptions: Some(self.assumptions()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GammaIndicators {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = IndicatorsJson::deserialize(d)?;
        GammaIndicators::new(
            (j.gamma_a_min, j.gamma_a_max),
            (j.gamma_r_min, j.gamma_r_max),
            (j.gamma_x_min, j.gamma_x_max),
            (j.gamma_e_min, j.gamma_e_max),
            (j.gamma_k_min, j.gamma_k_max),
        )
        .map_err(serde::de::Error::custom)
    }
}

fn extremes(s: &Spectrum) -> (f64, f64) {
    (s.min(), s.max())
}

/// Sets eigenvalues that are zero up to roundoff to exactly zero.
fn clamp_semidefinite(s: &Spectrum) -> (f64, f64) {
    let scale = s.min().abs().max(s.max().abs()).max(1.0);
    let fix = |v: f64| if v.abs() < ZERO_CLAMP * scale { 0.0 } else { v };
    (fix(s.min()).max(0.0), fix(s.max()).max(0.0))
}

pub(crate) fn block_operator(b: &Block) -> Arc<dyn LinearOperator> {
    match b {
        Block::Dense(m) => Arc::new(DenseSymMatrix::new(m.clone()).expect("square block")),
        Block::Sparse(m) => Arc::new(SparseOperator::new(m.clone(), false).expect("square block")),
    }
}

/// `x ↦ G · op · Gᵀ x`.
fn congruence_operator<'a>(
    g: &'a Block,
    op: &'a dyn LinearOperator,
) -> FnOperator<impl Fn(&[f64], &mut [f64]) + Send + Sync + 'a> {
    FnOperator::new(g.rows(), false, move |x: &[f64], y: &mut [f64]| {
        let t = op.apply(&g.matvec_t(x));
        g.matvec_into(&t, y);
    })
}

/// Extremes of `Â⁻¹ A`.
pub fn measure_gamma_a(sys: &DoubleSaddleSystem, pc: &BlockPreconditioner) -> Result<(f64, f64)> {
    let a = block_operator(sys.a());
    Ok(extremes(&pencil_spectrum(a.as_ref(), pc.a_inv().as_ref())?))
}

/// Extremes of `Ŝ⁻¹ S̃` with `S̃ = B Â⁻¹ Bᵀ`.
pub fn measure_gamma_r(sys: &DoubleSaddleSystem, pc: &BlockPreconditioner) -> Result<(f64, f64)> {
    let s_tilde = congruence_operator(sys.b(), pc.a_inv().as_ref());
    Ok(extremes(&pencil_spectrum(&s_tilde, pc.s_inv().as_ref())?))
}

/// Extremes of the pencil `(C Ŝ⁻¹ Cᵀ, X̂)`, congruent to `K Kᵀ`.
pub fn measure_gamma_k(sys: &DoubleSaddleSystem, pc: &BlockPreconditioner) -> Result<(f64, f64)> {
    let k0 = congruence_operator(sys.c(), pc.s_inv().as_ref());
    Ok(extremes(&pencil_spectrum(&k0, pc.x_inv().as_ref())?))
}

/// Extremes of `X̂⁻¹ X̃` with `X̃ = E + C Ŝ⁻¹ Cᵀ`.
pub fn measure_gamma_x(sys: &DoubleSaddleSystem, pc: &BlockPreconditioner) -> Result<(f64, f64)> {
    let k0 = congruence_operator(sys.c(), pc.s_inv().as_ref());
    let e = sys.e();
    let x_tilde = FnOperator::new(sys.p(), false, |x: &[f64], y: &mut [f64]| {
        k0.apply_into(x, y);
        let ex = e.matvec(x);
        y.iter_mut().zip(&ex).for_each(|(a, b)| *a += b);
    });
    Ok(extremes(&pencil_spectrum(&x_tilde, pc.x_inv().as_ref())?))
}

/// Extremes of `X̂⁻¹ E`, with roundoff-level values clamped to 0.
pub fn measure_gamma_e(sys: &DoubleSaddleSystem, pc: &BlockPreconditioner) -> Result<(f64, f64)> {
    if sys.e_is_zero() {
        return Ok((0.0, 0.0));
    }
    let e = block_operator(sys.e());
    Ok(clamp_semidefinite(&pencil_spectrum(e.as_ref(), pc.x_inv().as_ref())?))
}

/// All five indicator pairs from the pencils.
pub fn compute_indicators(sys: &DoubleSaddleSystem, pc: &BlockPreconditioner) -> Result<GammaIndicators> {
    let g = GammaIndicators::new(
        measure_gamma_a(sys, pc)?,
        measure_gamma_r(sys, pc)?,
        measure_gamma_x(sys, pc)?,
        measure_gamma_e(sys, pc)?,
        measure_gamma_k(sys, pc)?,
    )?;
    g.warn_assumptions();
    Ok(g)
}

/// Indicator values measured on the discrete problem, used where no
/// analytic estimate is available.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasuredOverrides {
    pub gamma_k: Option<(f64, f64)>,
    pub gamma_e_max: Option<f64>,
    pub gamma_x_max: Option<f64>,
}

/// Analytic indicator estimates for the optimal-control benchmarks with the
/// Chebyshev interval `[1/2, 2]`.
pub fn analytic_indicators_pdeco(
    l: usize,
    beta: f64,
    observation: Observation,
    amg_quality: (f64, f64),
    measured: MeasuredOverrides,
) -> Result<GammaIndicators> {
    let eta = eta_factor(l, 0.5, 2.0)?;
    analytic_indicators_with_eta(eta, beta, observation, amg_quality, measured)
}

/// As [`analytic_indicators_pdeco`], for an explicit Chebyshev error factor.
pub fn analytic_indicators_with_eta(
    eta: f64,
    beta: f64,
    observation: Observation,
    amg_quality: (f64, f64),
    measured: MeasuredOverrides,
) -> Result<GammaIndicators> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!("eta must lie in [0, 1), got {eta}")));
    }
    let (qmin, qmax) = amg_quality;
    let gamma_a = (1.0 - eta, 1.0 + eta);
    let gamma_r = ((1.0 - eta).powi(2), (1.0 + eta).powi(2));
    let g = match observation {
        Observation::Full => {
            let gamma_k = measured.gamma_k.ok_or(Error::MissingMeasurement("gamma_k"))?;
            GammaIndicators::new(
                gamma_a,
                gamma_r,
                (2.0 / 3.0 * qmin * gamma_a.0, 4.0 / 3.0 * qmax * gamma_a.1),
                (0.0, 4.0 / 3.0 * qmax),
                gamma_k,
            )?
        }
        Observation::Boundary => {
            let e_max = measured.gamma_e_max.ok_or(Error::MissingMeasurement("gamma_e_max"))?;
            let x_max = measured.gamma_x_max.ok_or(Error::MissingMeasurement("gamma_x_max"))?;
            GammaIndicators::new(
                gamma_a,
                gamma_r,
                (qmin * gamma_a.0, x_max),
                (0.0, e_max),
                (qmin * gamma_a.0, qmax * gamma_a.1),
            )?
        }
    };
    Ok(g)
}
