//! Dense and banded Cholesky factorizations.

use super::dense::{axpy, dot, DenseMatrix, DenseSymMatrix};
use super::sparse::CsrMatrix;
use crate::error::{check_len, Error, Result};

/// Relative pivot tolerance: a pivot at or below `tol * max(diag)` is rejected.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-14;

/// Lower-triangular factor `L` with `L Lᵀ = m`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: DenseMatrix,
}

pub fn cholesky_factor(m: &DenseSymMatrix) -> Result<Cholesky> {
    cholesky_factor_with(m, DEFAULT_PIVOT_TOL)
}

pub fn cholesky_factor_with(m: &DenseSymMatrix, pivot_tol: f64) -> Result<Cholesky> {
    let n = m.order();
    let max_diag = m.diagonal().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if !(max_diag > 0.0) {
        return Err(Error::NotSpd { index: 0, pivot: max_diag });
    }
    let tol = pivot_tol * max_diag;
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let s = m.get(i, j) - dot(&l.row(i)[..j], &l.row(j)[..j]);
            if i == j {
                if !(s > tol) {
                    return Err(Error::NotSpd { index: i, pivot: s });
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(Cholesky { l })
}

impl Cholesky {
    pub fn order(&self) -> usize {
        self.l.rows()
    }

    pub fn lower(&self) -> &DenseMatrix {
        &self.l
    }

    pub fn into_lower(self) -> DenseMatrix {
        self.l
    }

    /// Solves `L y = b` in place.
    pub fn forward_in_place(&self, b: &mut [f64]) {
        for i in 0..b.len() {
            let row = self.l.row(i);
            b[i] = (b[i] - dot(&row[..i], &b[..i])) / row[i];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward_in_place(&self, y: &mut [f64]) {
        let n = y.len();
        for i in (0..n).rev() {
            y[i] /= self.l[(i, i)];
            let yi = y[i];
            // column i of Lᵀ above the diagonal is row i of L left of it
            axpy(-yi, &self.l.row(i)[..i], &mut y[..i]);
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.order(), b.len())?;
        let mut x = b.to_vec();
        self.forward_in_place(&mut x);
        self.backward_in_place(&mut x);
        Ok(x)
    }

    /// Computes `L⁻¹ X` for a dense right-hand side with `order()` rows.
    pub fn forward_matrix(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        check_len(self.order(), x.rows())?;
        let mut y = x.clone();
        let k = x.cols();
        let data = y.as_mut_slice();
        for i in 0..self.order() {
            let (done, rest) = data.split_at_mut(i * k);
            let yi = &mut rest[..k];
            let row = self.l.row(i);
            for (j, lij) in row[..i].iter().enumerate() {
                if *lij != 0.0 {
                    axpy(-lij, &done[j * k..(j + 1) * k], yi);
                }
            }
            let inv = 1.0 / row[i];
            yi.iter_mut().for_each(|v| *v *= inv);
        }
        Ok(y)
    }

    pub fn inverse(&self) -> DenseSymMatrix {
        let n = self.order();
        let linv = self.forward_matrix(&DenseMatrix::identity(n)).expect("square");
        // m⁻¹ = L⁻ᵀ L⁻¹
        let inv = linv.transpose().matmul(&linv).expect("square");
        DenseSymMatrix::new(inv).expect("square")
    }

    /// `L Lᵀ`, mainly for round-trip checks.
    pub fn reconstruct(&self) -> DenseMatrix {
        self.l.matmul(&self.l.transpose()).expect("square")
    }
}

/// Cholesky factor of a sparse SPD matrix kept in band storage.
///
/// Cost is `O(n b²)` for bandwidth `b`, which stays small for lexicographically
/// ordered structured meshes.
#[derive(Clone, Debug)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    // row i holds L[i, i-bw..=i] at offsets 0..=bw
    data: Vec<f64>,
}

impl BandCholesky {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        Self::with_tol(a, DEFAULT_PIVOT_TOL)
    }

    pub fn with_tol(a: &CsrMatrix, pivot_tol: f64) -> Result<Self> {
        if a.rows() != a.cols() || a.rows() == 0 {
            return Err(Error::InvalidArgument("band Cholesky needs a non-empty square matrix".into()));
        }
        let n = a.rows();
        let bw = a.bandwidth();
        let w = bw + 1;
        let mut data = vec![0.0; n * w];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    data[i * w + (j + bw - i)] = v;
                }
            }
        }
        let max_diag = a.diagonal().into_iter().fold(f64::NEG_INFINITY, f64::max);
        if !(max_diag > 0.0) {
            return Err(Error::NotSpd { index: 0, pivot: max_diag });
        }
        let tol = pivot_tol * max_diag;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                // L[i,k] L[j,k] for k in max(lo, j-bw)..j
                let kstart = lo.max(j.saturating_sub(bw));
                let mut s = data[i * w + (j + bw - i)];
                for k in kstart..j {
                    s -= data[i * w + (k + bw - i)] * data[j * w + (k + bw - j)];
                }
                if i == j {
                    if !(s > tol) {
                        return Err(Error::NotSpd { index: i, pivot: s });
                    }
                    data[i * w + bw] = s.sqrt();
                } else {
                    data[i * w + (j + bw - i)] = s / data[j * w + bw];
                }
            }
        }
        Ok(BandCholesky { n, bw, data })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = x[i];
            for k in lo..i {
                s -= self.data[i * w + (k + bw - i)] * x[k];
            }
            x[i] = s / self.data[i * w + bw];
        }
        for i in (0..n).rev() {
            x[i] /= self.data[i * w + bw];
            let xi = x[i];
            let lo = i.saturating_sub(bw);
            for k in lo..i {
                x[k] -= self.data[i * w + (k + bw - i)] * xi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, b.len())?;
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }
}
