//! Square linear operators defined by their action on vectors.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, BandCholesky, Cholesky, CsrMatrix, DenseMatrix, DenseSymMatrix};

/// Tolerance used by [`symmetry_defect`] callers that need a yes/no answer.
pub const SYMMETRY_PROBE_TOL: f64 = 1e-10;

pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;

    /// `y = Op x`. Both slices have length `dim()`.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn is_spd(&self) -> bool {
        false
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply_into(x, y)
    }
    fn is_symmetric(&self) -> bool {
        (**self).is_symmetric()
    }
    fn is_spd(&self) -> bool {
        (**self).is_spd()
    }
}

impl LinearOperator for DenseSymMatrix {
    fn dim(&self) -> usize {
        self.order()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.as_matrix().matvec_into(x, y)
    }
}

/// A square sparse matrix used as an operator.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    matrix: CsrMatrix,
    spd: bool,
}

impl SparseOperator {
    pub fn new(matrix: CsrMatrix, spd: bool) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        Ok(SparseOperator { matrix, spd })
    }
}

impl LinearOperator for SparseOperator {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.matrix.matvec_into(x, y)
    }
    fn is_spd(&self) -> bool {
        self.spd
    }
}

/// Applies the inverse of a densely factored SPD matrix.
impl LinearOperator for Cholesky {
    fn dim(&self) -> usize {
        self.order()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
        self.forward_in_place(y);
        self.backward_in_place(y);
    }
    fn is_spd(&self) -> bool {
        true
    }
}

/// Applies the inverse of a band-factored SPD matrix.
impl LinearOperator for BandCholesky {
    fn dim(&self) -> usize {
        self.order()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
        self.solve_in_place(y);
    }
    fn is_spd(&self) -> bool {
        true
    }
}

/// `alpha · inner`.
pub struct Scaled {
    alpha: f64,
    inner: Arc<dyn LinearOperator>,
}

impl Scaled {
    pub fn new(alpha: f64, inner: Arc<dyn LinearOperator>) -> Self {
        Scaled { alpha, inner }
    }
}

impl LinearOperator for Scaled {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.inner.apply_into(x, y);
        y.iter_mut().for_each(|v| *v *= self.alpha);
    }
    fn is_symmetric(&self) -> bool {
        self.inner.is_symmetric()
    }
    fn is_spd(&self) -> bool {
        self.inner.is_spd() && self.alpha > 0.0
    }
}

/// Dense matrix of an operator, built column by column.
pub fn materialize(op: &dyn LinearOperator) -> DenseMatrix {
    let n = op.dim();
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            op.apply(&e)
        })
        .collect();
    DenseMatrix::from_columns(n, &columns).expect("column lengths match")
}

/// Materializes a symmetric operator; the tiny asymmetry left by roundoff is
/// averaged away.
pub fn materialize_sym(op: &dyn LinearOperator) -> Result<DenseSymMatrix> {
    DenseSymMatrix::new(materialize(op))
}

/// Largest relative defect `|⟨u, Op v⟩ − ⟨Op u, v⟩| / (‖u‖‖v‖‖Op‖)` over
/// random probe pairs, with `‖Op‖` estimated from the probes themselves.
pub fn symmetry_defect(op: &dyn LinearOperator, probes: usize, seed: u64) -> f64 {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(probes);
    let mut norm_est: f64 = 0.0;
    for _ in 0..probes {
        let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let (ou, ov) = (op.apply(&u), op.apply(&v));
        norm_est = norm_est.max(norm2(&ou) / norm2(&u)).max(norm2(&ov) / norm2(&v));
        pairs.push((dot(&u, &ov) - dot(&ou, &v), norm2(&u) * norm2(&v)));
    }
    if norm_est == 0.0 {
        return 0.0;
    }
    pairs.into_iter().map(|(d, s)| d.abs() / (s * norm_est)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cholesky_factor;

    #[test]
    fn cholesky_operator_inverts() {
        let m = DenseSymMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let op = cholesky_factor(&m).unwrap();
        let x = op.apply(&m.matvec(&[1.0, -2.0]));
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] + 2.0).abs() < 1e-14);
        assert!(symmetry_defect(&op, 4, 1) < 1e-14);
    }

    #[test]
    fn materialize_round_trip() {
        let m = DenseSymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 5.0]]).unwrap();
        let scaled = Scaled::new(2.0, Arc::new(m.clone()));
        let d = materialize(&scaled);
        assert_eq!(d, m.scaled(2.0).into_matrix());
    }

    #[test]
    fn asymmetric_operator_is_detected() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0)]).unwrap();
        let op = SparseOperator::new(a, false).unwrap();
        assert!(symmetry_defect(&op, 4, 3) > 1e-3);
    }
}
