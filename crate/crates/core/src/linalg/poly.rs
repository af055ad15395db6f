//! Chebyshev polynomials and real-root solvers for monic quadratics and cubics.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Relative discriminant slack for [`solve_quadratic_real`].
pub const QUADRATIC_DISC_TOL: f64 = 1e-14;
/// Scaled discriminant slack for [`solve_cubic_real`].
pub const CUBIC_DISC_TOL: f64 = 1e-12;

/// `T_l(x)` by the three-term recurrence.
pub fn chebyshev_t(l: usize, x: f64) -> f64 {
    let (mut t0, mut t1) = (1.0, x);
    if l == 0 {
        return t0;
    }
    for _ in 1..l {
        let t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

/// Real roots of `λ² + bλ + c`, ascending.
pub fn solve_quadratic_real(b: f64, c: f64) -> Result<(f64, f64)> {
    let disc = b * b - 4.0 * c;
    let slack = QUADRATIC_DISC_TOL * 1f64.max(b * b).max(c.abs());
    if disc < -slack || !disc.is_finite() {
        return Err(Error::ComplexRoots { discriminant: disc });
    }
    let sq = disc.max(0.0).sqrt();
    let q = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
    if q == 0.0 {
        // b = 0 and c = 0
        return Ok((0.0, 0.0));
    }
    let (r1, r2) = (q, c / q);
    Ok(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}

/// Evaluates `λ³ + c2 λ² + c1 λ + c0`.
/// Discriminant of `x³ + c2 x² + c1 x + c0`; negative means a complex pair.
pub fn cubic_discriminant(c2: f64, c1: f64, c0: f64) -> f64 {
    18.0 * c2 * c1 * c0 - 4.0 * c2.powi(3) * c0 + c2 * c2 * c1 * c1 - 4.0 * c1.powi(3) - 27.0 * c0 * c0
}

pub fn eval_monic_cubic(c2: f64, c1: f64, c0: f64, x: f64) -> f64 {
    ((x + c2) * x + c1) * x + c0
}

/// Three real roots of `λ³ + c2 λ² + c1 λ + c0`, ascending.
///
/// The cubic is rescaled so its roots are O(1), depressed, and solved with
/// the trigonometric formula; each root then receives one Newton step.
pub fn solve_cubic_real(c2: f64, c1: f64, c0: f64) -> Result<(f64, f64, f64)> {
    if !(c2.is_finite() && c1.is_finite() && c0.is_finite()) {
        return Err(Error::InvalidArgument("non-finite cubic coefficient".into()));
    }
    let s = c2.abs().max(c1.abs().sqrt()).max(c0.abs().cbrt());
    if s == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let (a, b, c) = (c2 / s, c1 / (s * s), c0 / (s * s * s));
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    if disc < -CUBIC_DISC_TOL {
        return Err(Error::ComplexRoots { discriminant: disc });
    }
    let shift = -a / 3.0;
    let mut y = if p >= 0.0 {
        // only reachable with p ≈ 0 and q ≈ 0: a triple root
        let r = (-q).cbrt();
        [r, r, r]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        [
            m * theta.cos(),
            m * (theta - 2.0 * PI / 3.0).cos(),
            m * (theta - 4.0 * PI / 3.0).cos(),
        ]
    };
    for v in &mut y {
        *v = s * (*v + shift);
        *v = newton_polish(c2, c1, c0, *v);
    }
    y.sort_by(|u, v| u.partial_cmp(v).expect("finite roots"));
    Ok((y[0], y[1], y[2]))
}

fn newton_polish(c2: f64, c1: f64, c0: f64, x: f64) -> f64 {
    let f = eval_monic_cubic(c2, c1, c0, x);
    let df = (3.0 * x + 2.0 * c2) * x + c1;
    if df == 0.0 || f == 0.0 {
        return x;
    }
    let nx = x - f / df;
    if eval_monic_cubic(c2, c1, c0, nx).abs() <= f.abs() {
        nx
    } else {
        x
    }
}
