//! Characteristic polynomials of the preconditioned double saddle-point
//! matrix and the eigenvalue-inclusion intervals assembled from their roots.
//!
//! Notation: `a`, `r`, `k`, `e` stand for values of `γ_A`, `γ_R`, `γ_K`,
//! `γ_E`.
//!
//! * `p(λ) = λ² − λ(ar + a − 2r) − r`
//! * `π(λ) = (1+λ)²(a − λ)k + p(λ)λ(1+k)`, a monic cubic
//! * `π_E(λ) = π(λ) − e·p(λ)`
//! * for `a = 1`: `π = (λ − 1)c(λ)` and `π_E = (λ − 1)c^E(λ)`

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicators::GammaIndicators;
use crate::linalg::{cubic_discriminant, solve_cubic_real, solve_quadratic_real};

/// An endpoint `γ_A` this close to 1 is evaluated through the factorized
/// polynomials.
pub const UNIT_A_TOL: f64 = 1e-9;
/// Relative inflation used by containment checks.
pub const CONTAINMENT_INFLATION: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::InvalidArgument(format!("interval [{lo}, {hi}] is reversed")))
        }
    }

    pub fn contains(&self, x: f64, rel_inflation: f64) -> bool {
        let pad = rel_inflation * self.lo.abs().max(self.hi.abs());
        self.lo - pad <= x && x <= self.hi + pad
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

/// Which result produced a pair of intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// `E = 0`.
    E0,
    /// `E = 0` and `C` square (hence invertible).
    #[serde(rename = "E0_squareC")]
    E0SquareC,
    /// `E ≠ 0`.
    #[serde(rename = "E_nonzero")]
    ENonzero,
    /// `E ≠ 0` and `C` square.
    #[serde(rename = "E_nonzero_squareC")]
    ENonzeroSquareC,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::E0, Variant::E0SquareC, Variant::ENonzero, Variant::ENonzeroSquareC];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::E0 => "E0",
            Variant::E0SquareC => "E0_squareC",
            Variant::ENonzero => "E_nonzero",
            Variant::ENonzeroSquareC => "E_nonzero_squareC",
        }
    }

    pub fn needs_square_c(&self) -> bool {
        matches!(self, Variant::E0SquareC | Variant::ENonzeroSquareC)
    }

    pub fn needs_zero_e(&self) -> bool {
        matches!(self, Variant::E0 | Variant::E0SquareC)
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown bound variant `{s}`")))
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralBounds {
    pub negative: Interval,
    pub positive: Interval,
    pub variant: Variant,
    pub indicators: GammaIndicators,
}

impl SpectralBounds {
    fn new(negative: Interval, positive: Interval, variant: Variant, indicators: GammaIndicators) -> Result<Self> {
        if !(negative.hi < 0.0 && positive.lo > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "bounds [{}, {}] ∪ [{}, {}] do not separate zero",
                negative.lo, negative.hi, positive.lo, positive.hi
            )));
        }
        Ok(SpectralBounds { negative, positive, variant, indicators })
    }

    /// `[γ_A.min, γ_A.max]`, the interval carved out by the theory.
    pub fn interval_a(&self) -> Interval {
        Interval { lo: self.indicators.gamma_a.0, hi: self.indicators.gamma_a.1 }
    }

    /// Whether `λ` lies in `negative ∪ positive ∪ I_A`, each inflated by
    /// `rel_inflation`.
    pub fn contains(&self, lambda: f64, rel_inflation: f64) -> bool {
        self.negative.contains(lambda, rel_inflation)
            || self.positive.contains(lambda, rel_inflation)
            || self.interval_a().contains(lambda, rel_inflation)
    }

    /// Hull of the positive interval and `I_A`; every positive eigenvalue
    /// covered by the bounds lies in it.
    pub fn positive_hull(&self) -> Interval {
        let a = self.interval_a();
        Interval { lo: self.positive.lo.min(a.lo), hi: self.positive.hi.max(a.hi) }
    }

    pub fn contains_all(&self, eigenvalues: &[f64]) -> bool {
        eigenvalues.iter().all(|l| self.contains(*l, CONTAINMENT_INFLATION))
    }
}

#[derive(Serialize, Deserialize)]
struct BoundsJson {
    neg_lo: f64,
    neg_hi: f64,
    pos_lo: f64,
    pos_hi: f64,
    variant: Variant,
    indicators: GammaIndicators,
}

impl Serialize for SpectralBounds {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BoundsJson {
            neg_lo: self.negative.lo,
            neg_hi: self.negative.hi,
            pos_lo: self.positive.lo,
            pos_hi: self.positive.hi,
            variant: self.variant,
            indicators: self.indicators,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpectralBounds {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = BoundsJson::deserialize(d)?;
        let neg = Interval::new(j.neg_lo, j.neg_hi).map_err(serde::de::Error::custom)?;
        let pos = Interval::new(j.pos_lo, j.pos_hi).map_err(serde::de::Error::custom)?;
        SpectralBounds::new(neg, pos, j.variant, j.indicators).map_err(serde::de::Error::custom)
    }
}

fn is_unit(a: f64) -> bool {
    (a - 1.0).abs() < UNIT_A_TOL
}

/// `p(λ; a, r)`.
pub fn poly_p(lambda: f64, a: f64, r: f64) -> f64 {
    lambda * lambda - lambda * (a * r + a - 2.0 * r) - r
}

/// Roots `λ− < 0 < λ+` of `p`: `η ± √(η² + r)` with `η = ½(r + 1)a − r`.
pub fn p_roots(a: f64, r: f64) -> (f64, f64) {
    let s = a * r + a - 2.0 * r;
    solve_quadratic_real(-s, -r).expect("p has a positive discriminant for r > 0")
}

/// Monic coefficients `(c2, c1, c0)` of `π_E(λ; a, r, k, e)`; `e = 0` gives `π`.
pub fn pi_e_coefficients(a: f64, r: f64, k: f64, e: f64) -> (f64, f64, f64) {
    let s = a * r + a - 2.0 * r;
    let c2 = k * (a - 2.0) - (1.0 + k) * s - e;
    let c1 = k * (2.0 * a - 1.0) - (1.0 + k) * r + e * s;
    let c0 = a * k + e * r;
    (c2, c1, c0)
}

/// `π(λ; a, r, k)`.
pub fn poly_pi(lambda: f64, a: f64, r: f64, k: f64) -> f64 {
    poly_pi_e(lambda, a, r, k, 0.0)
}

/// `π_E(λ; a, r, k, e) = π(λ) − e·p(λ)`.
pub fn poly_pi_e(lambda: f64, a: f64, r: f64, k: f64, e: f64) -> f64 {
    let (c2, c1, c0) = pi_e_coefficients(a, r, k, e);
    ((lambda + c2) * lambda + c1) * lambda + c0
}

/// Roots of `c(λ; r, k) = λ² + λ(r(k+1) − 2k) − k`.
pub fn c_roots(r: f64, k: f64) -> (f64, f64) {
    c_e_roots(r, k, 0.0)
}

/// Roots of `c^E(λ) = λ² + λ(r(k+1) − 2k − e) − (k + e r)`.
pub fn c_e_roots(r: f64, k: f64, e: f64) -> (f64, f64) {
    solve_quadratic_real(r * (k + 1.0) - 2.0 * k - e, -(k + e * r))
        .expect("c^E has a positive discriminant for k > 0")
}

/// Ascending roots `(μa, μb, μc)` of `π`.
pub fn pi_roots(a: f64, r: f64, k: f64) -> Result<(f64, f64, f64)> {
    pi_e_roots(a, r, k, 0.0)
}

/// Ascending roots `(μa^E, μb^E, μc^E)` of `π_E`. For `a` within
/// [`UNIT_A_TOL`] of 1 the roots come from `(λ − 1)c^E(λ)`.
pub fn pi_e_roots(a: f64, r: f64, k: f64, e: f64) -> Result<(f64, f64, f64)> {
    if is_unit(a) {
        let (lo, hi) = c_e_roots(r, k, e);
        return Ok((lo, hi.min(1.0), hi.max(1.0)));
    }
    let (c2, c1, c0) = pi_e_coefficients(a, r, k, e);
    solve_cubic_real(c2, c1, c0)
}

/// `min{1/(2 − a), k + √(k² + k)}`; the first branch is dropped when `a`
/// reaches 2.
pub fn beta_c(a: f64, k: f64) -> f64 {
    let second = k + (k * k + k).sqrt();
    if a >= 2.0 - UNIT_A_TOL {
        second
    } else {
        (1.0 / (2.0 - a)).min(second)
    }
}

/// `k + e/2 + √((k + e/2)² + k)`.
pub fn beta_c_e(e: f64, k: f64) -> f64 {
    let h = k + 0.5 * e;
    h + (h * h + k).sqrt()
}

fn mu_a(a: f64, r: f64, k: f64) -> Result<f64> {
    Ok(pi_roots(a, r, k)?.0)
}

fn mu_b(a: f64, r: f64, k: f64) -> Result<f64> {
    Ok(pi_roots(a, r, k)?.1)
}

fn mu_c(a: f64, r: f64, k: f64) -> Result<f64> {
    Ok(pi_roots(a, r, k)?.2)
}

/// Rejects `γ_A.max ≥ 2`, where the root ordering the bounds rely on is
/// lost, as [`Error::ComplexRoots`] with the discriminant of `π` at the
/// offending corner.
fn check_admissible(g: &GammaIndicators) -> Result<()> {
    g.validate()?;
    g.warn_assumptions();
    let amax = g.gamma_a.1;
    if amax >= 2.0 {
        let (c2, c1, c0) = pi_e_coefficients(amax, g.gamma_r.0, g.gamma_k.1, 0.0);
        return Err(Error::ComplexRoots { discriminant: cubic_discriminant(c2, c1, c0) });
    }
    Ok(())
}

/// Negative interval shared by the unrefined results.
fn negative_unrefined(g: &GammaIndicators) -> Result<Interval> {
    let (amin, amax) = g.gamma_a;
    let (rmin, rmax) = g.gamma_r;
    Interval::new(mu_a(amin, rmax, g.gamma_k.1)?, p_roots(amax, rmin).0)
}

/// Positive interval for `E = 0`.
fn positive_e_zero(g: &GammaIndicators) -> Result<Interval> {
    let (amin, amax) = g.gamma_a;
    let (rmin, rmax) = g.gamma_r;
    let (kmin, kmax) = g.gamma_k;
    let hi = mu_c(amax, rmin, kmax)?.max(mu_c(amax, rmax, kmax)?).max(beta_c(amax, kmax));
    Interval::new(mu_b(amin, rmax, kmin)?, hi)
}

/// Positive interval for `E ≠ 0`.
fn positive_e_nonzero(g: &GammaIndicators) -> Result<Interval> {
    let (amin, amax) = g.gamma_a;
    let (rmin, rmax) = g.gamma_r;
    let kmax = g.gamma_k.1;
    let xmin = g.gamma_x.0;
    let emax = g.gamma_e.1;
    let lo = xmin.min(pi_e_roots(amin, rmax, xmin, 0.0)?.1);
    let hi = pi_e_roots(amax, rmin, kmax, emax)?
        .2
        .max(pi_e_roots(amax, rmax, kmax, emax)?.2)
        .max(beta_c_e(emax, kmax));
    Interval::new(lo, hi)
}

/// Inclusion intervals for `E = 0`.
pub fn bounds_e_zero(g: &GammaIndicators) -> Result<SpectralBounds> {
    check_admissible(g)?;
    SpectralBounds::new(negative_unrefined(g)?, positive_e_zero(g)?, Variant::E0, *g)
}

/// Inclusion intervals for `E ≠ 0` (also valid for `γ_A = 1`).
pub fn bounds_e_nonzero(g: &GammaIndicators) -> Result<SpectralBounds> {
    check_admissible(g)?;
    SpectralBounds::new(negative_unrefined(g)?, positive_e_nonzero(g)?, Variant::ENonzero, *g)
}

/// Refined intervals when `C` is square; `c_shape` is `(rows, cols)` of `C`.
pub fn bounds_c_invertible(g: &GammaIndicators, e_zero: bool, c_shape: (usize, usize)) -> Result<SpectralBounds> {
    if c_shape.0 != c_shape.1 {
        return Err(Error::NotSquare { rows: c_shape.0, cols: c_shape.1 });
    }
    check_admissible(g)?;
    let (amin, amax) = g.gamma_a;
    let (rmin, rmax) = g.gamma_r;
    let (kmin, kmax) = g.gamma_k;
    if e_zero {
        let negative = Interval::new(mu_a(amin, rmax, kmax)?, mu_a(amax, rmin, kmin)?)?;
        return SpectralBounds::new(negative, positive_e_zero(g)?, Variant::E0SquareC, *g);
    }
    let (xmin, xmax) = g.gamma_x;
    let (emin, emax) = g.gamma_e;
    // roots taken in the γ_X parametrization: γ_K = γ_X − γ_E
    let k_lo = positive_part(xmax - emin, kmax);
    let lo = pi_e_roots(amin, rmax, k_lo, emin)?.0;
    let e_hi = emax.min(xmin - kmin).max(0.0);
    let k_hi = positive_part(xmin - e_hi, kmin);
    let hi = pi_e_roots(amax, rmin, k_hi, e_hi)?.0;
    let negative = Interval::new(lo, hi)?;
    SpectralBounds::new(negative, positive_e_nonzero(g)?, Variant::ENonzeroSquareC, *g)
}

/// `v` if positive, else the fallback (guards roundoff in `γ_X − γ_E`).
fn positive_part(v: f64, fallback: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        fallback
    }
}

/// Bounds of the given variant.
pub fn bounds_for(variant: Variant, g: &GammaIndicators, c_shape: (usize, usize)) -> Result<SpectralBounds> {
    match variant {
        Variant::E0 => bounds_e_zero(g),
        Variant::ENonzero => bounds_e_nonzero(g),
        Variant::E0SquareC => bounds_c_invertible(g, true, c_shape),
        Variant::ENonzeroSquareC => bounds_c_invertible(g, false, c_shape),
    }
}

/// MINRES residual envelope `2·((√|ad| − √|bc|)/(√|ad| + √|bc|))^⌊k/2⌋` for
/// the spectrum in `[a, b] ∪ [c, d]`.
pub fn minres_bound(b: &SpectralBounds, k: usize) -> f64 {
    let pos = b.positive_hull();
    let (a, bb) = (b.negative.lo, b.negative.hi);
    let (c, d) = (pos.lo, pos.hi);
    let outer = (a * d).abs().sqrt();
    let inner = (bb * c).abs().sqrt();
    let factor = (outer - inner) / (outer + inner);
    2.0 * factor.powi((k / 2) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: (f64, f64, f64) = (1.639, 0.734, 0.251);

    #[test]
    fn p_roots_unit_a() {
        let (lo, hi) = p_roots(1.0, 0.7);
        assert!((lo + 0.7).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_a_at_two_is_a_regime_error() {
        let g = GammaIndicators::e_zero((0.5, 2.5), (0.7, 1.2), (0.3, 1.2)).unwrap();
        for v in Variant::ALL {
            assert!(matches!(bounds_for(v, &g, (2, 2)), Err(Error::ComplexRoots { .. })));
        }
    }

    #[test]
    fn pi_roots_figure_configuration() {
        let (a, r, k) = FIG2;
        let (ma, mb, mc) = pi_roots(a, r, k).unwrap();
        assert!((ma + 0.503254554435484).abs() < 1e-12);
        assert!((mb - 0.435434175555416).abs() < 1e-12);
        assert!((mc - 1.877337904880065).abs() < 1e-12);
    }

    #[test]
    fn unit_a_routes_through_c() {
        let (ma, mb, mc) = pi_roots(1.0, 1.0, 1.0).unwrap();
        assert_eq!((ma, mb, mc), (-1.0, 1.0, 1.0));
        let (lo, hi) = c_e_roots(0.4, 0.8, 0.0);
        assert_eq!((lo, hi), c_roots(0.4, 0.8));
        assert!((lo * hi + 0.8).abs() < 1e-14);
    }

    #[test]
    fn beta_values() {
        assert!((beta_c(1.5, 0.5) - (0.5 + 0.75f64.sqrt())).abs() < 1e-15);
        assert!((beta_c_e(0.2, 0.5) - (0.6 + 0.86f64.sqrt())).abs() < 1e-15);
        assert_eq!(beta_c(2.5, 0.5), 0.5 + 0.75f64.sqrt());
    }

    #[test]
    fn minres_bound_values() {
        let g = GammaIndicators::unit();
        let b = SpectralBounds::new(
            Interval::new(-2.0, -1.0).unwrap(),
            Interval::new(1.0, 2.0).unwrap(),
            Variant::E0,
            g,
        )
        .unwrap();
        assert!((minres_bound(&b, 2) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(minres_bound(&b, 0), 2.0);
        assert_eq!(minres_bound(&b, 1), 2.0);
    }

    #[test]
    fn unit_indicators_give_plus_minus_one() {
        let b = bounds_e_zero(&GammaIndicators::unit()).unwrap();
        assert_eq!((b.negative.lo, b.negative.hi), (-1.0, -1.0));
        assert_eq!(b.positive.lo, 1.0);
        // μc(1, 1, 1) = 1 and β_c(1, 1) = min{1, 1 + √2} = 1
        assert_eq!(b.positive.hi, 1.0);
    }

    #[test]
    fn json_shape() {
        let b = bounds_e_zero(&GammaIndicators::unit()).unwrap();
        let v: serde_json::Value = serde_json::to_value(b).unwrap();
        for key in ["neg_lo", "neg_hi", "pos_lo", "pos_hi", "variant", "indicators"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let back: SpectralBounds = serde_json::from_value(v).unwrap();
        assert_eq!(back, b);
    }
}
