//! Extreme generalized eigenvalues of a symmetric pencil `(Z, W)` with `W`
//! SPD, when only the actions of `Z` and `W⁻¹` are available.
//!
//! `Z W⁻¹` is self-adjoint in the `W⁻¹` inner product, so a Lanczos process in
//! that inner product (with full reorthogonalization) yields Ritz values that
//! approach the extremes of `W⁻¹ Z` from inside.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{axpy, dot};
use super::eigen::{tridiagonal_eigenvalues, Spectrum};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    pub max_steps: usize,
    /// Stop once both extreme Ritz values move by less than this (relative)
    /// over a check interval.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { max_steps: 150, tol: 1e-12, seed: 7 }
    }
}

/// Returns the Ritz values of the final Lanczos tridiagonal.
pub fn pencil_ritz_values(
    n: usize,
    apply_z: impl Fn(&[f64], &mut [f64]),
    apply_w_inv: impl Fn(&[f64], &mut [f64]),
    opts: LanczosOptions,
) -> Result<Spectrum> {
    if n == 0 {
        return Err(Error::InvalidArgument("empty pencil".into()));
    }
    let steps = opts.max_steps.min(n).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut r: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let mut z = vec![0.0; n];
    apply_w_inv(&r, &mut z);
    let mut beta = dot(&r, &z);
    if !(beta > 0.0) {
        return Err(Error::NotSpd { index: 0, pivot: beta });
    }
    beta = beta.sqrt();

    let mut qs: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut zs: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas: Vec<f64> = Vec::with_capacity(steps);
    let mut zq = vec![0.0; n];
    let mut last: Option<(f64, f64)> = None;

    for j in 0..steps {
        let q: Vec<f64> = r.iter().map(|v| v / beta).collect();
        let zj: Vec<f64> = z.iter().map(|v| v / beta).collect();
        apply_z(&zj, &mut zq);
        let alpha = dot(&zj, &zq);
        r.copy_from_slice(&zq);
        axpy(-alpha, &q, &mut r);
        if j > 0 {
            axpy(-betas[j - 1], &qs[j - 1], &mut r);
        }
        qs.push(q);
        zs.push(zj);
        alphas.push(alpha);
        // two passes of Gram-Schmidt in the W⁻¹ inner product
        for _ in 0..2 {
            for (qi, zi) in qs.iter().zip(&zs) {
                let c = dot(zi, &r);
                axpy(-c, qi, &mut r);
            }
        }
        apply_w_inv(&r, &mut z);
        let b2 = dot(&r, &z);
        let done = j + 1 == steps;
        if (j + 1) % 10 == 0 || done || !(b2 > 0.0) {
            let ritz = tridiagonal_eigenvalues(&alphas, &betas)?;
            let (lo, hi) = (ritz.min(), ritz.max());
            let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
            let converged = last.is_some_and(|(plo, phi)| {
                (plo - lo).abs() <= opts.tol * scale && (phi - hi).abs() <= opts.tol * scale
            });
            if done || converged || !(b2 > 0.0) {
                return Ok(ritz);
            }
            last = Some((lo, hi));
        }
        beta = b2.sqrt();
        // an invariant subspace has been found when beta collapses
        if beta <= 1e-14 * alpha.abs().max(1e-300) {
            return tridiagonal_eigenvalues(&alphas, &betas);
        }
        betas.push(beta);
    }
    tridiagonal_eigenvalues(&alphas, &betas)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pencil_extremes() {
        let n = 200;
        let zd: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let wd: Vec<f64> = (0..n).map(|i| 1.0 + (i % 3) as f64).collect();
        let exact: Vec<f64> = zd.iter().zip(&wd).map(|(a, b)| a / b).collect();
        let (emin, emax) = exact
            .iter()
            .fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        let s = pencil_ritz_values(
            n,
            |x, y| y.iter_mut().zip(x).zip(&zd).for_each(|((yi, xi), d)| *yi = d * xi),
            |x, y| y.iter_mut().zip(x).zip(&wd).for_each(|((yi, xi), d)| *yi = xi / d),
            LanczosOptions::default(),
        )
        .unwrap();
        assert!((s.min() - emin).abs() < 1e-8 * emax);
        assert!((s.max() - emax).abs() < 1e-8 * emax);
    }
}
