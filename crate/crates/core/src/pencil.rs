//! Spectra of symmetric pencils given by operator actions.

use crate::error::{check_len, Result};
use crate::linalg::{gen_sym_eigenvalues_inv, pencil_ritz_values, LanczosOptions, Spectrum};
use crate::operator::{materialize_sym, LinearOperator};

/// Pencils up to this order are solved densely; larger ones use Lanczos.
pub const DENSE_PENCIL_LIMIT: usize = 2500;

/// Generalized eigenvalues of `(Z, W)` (i.e. of `W⁻¹ Z`) when `W⁻¹` is
/// available as an SPD operator.
///
/// Up to [`DENSE_PENCIL_LIMIT`] the full spectrum is returned. Beyond it the
/// result holds Lanczos Ritz values, whose extremes converge to the true
/// extremes from inside.
pub fn pencil_spectrum(z: &dyn LinearOperator, w_inv: &dyn LinearOperator) -> Result<Spectrum> {
    pencil_spectrum_with(z, w_inv, DENSE_PENCIL_LIMIT)
}

pub fn pencil_spectrum_with(
    z: &dyn LinearOperator,
    w_inv: &dyn LinearOperator,
    dense_limit: usize,
) -> Result<Spectrum> {
    check_len(z.dim(), w_inv.dim())?;
    if z.dim() <= dense_limit {
        let zd = materialize_sym(z)?;
        let wd = materialize_sym(w_inv)?;
        gen_sym_eigenvalues_inv(&zd, &wd)
    } else {
        log::debug!("pencil of order {} estimated by Lanczos", z.dim());
        pencil_ritz_values(
            z.dim(),
            |x, y| z.apply_into(x, y),
            |x, y| w_inv.apply_into(x, y),
            LanczosOptions::default(),
        )
    }
}

/// Operator defined by a closure, for composing actions on the fly.
pub struct FnOperator<F> {
    dim: usize,
    spd: bool,
    f: F,
}

impl<F> FnOperator<F>
where
    F: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    pub fn new(dim: usize, spd: bool, f: F) -> Self {
        FnOperator { dim, spd, f }
    }
}

impl<F> LinearOperator for FnOperator<F>
where
    F: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
    fn is_spd(&self) -> bool {
        self.spd
    }
}
