//! Symmetric eigenvalues: Householder tridiagonalization followed by
//! implicitly shifted QL sweeps. Eigenvectors are never formed.

use serde::{Deserialize, Serialize};

use super::cholesky::cholesky_factor;
use super::dense::{DenseMatrix, DenseSymMatrix};
use crate::error::{check_len, Error, Result};

pub const DEFAULT_MAX_SWEEPS: usize = 50;

/// Ascending eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Sorts the values. Panics on an empty list or NaN.
    pub fn new(mut eigenvalues: Vec<f64>) -> Self {
        assert!(!eigenvalues.is_empty(), "empty spectrum");
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("NaN eigenvalue"));
        Spectrum { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    pub fn count_below(&self, sigma: f64) -> usize {
        self.eigenvalues.partition_point(|&v| v < sigma)
    }

    /// `(min, max)` of the strictly negative part, if any.
    pub fn negative_extremes(&self) -> Option<(f64, f64)> {
        let k = self.count_below(0.0);
        (k > 0).then(|| (self.eigenvalues[0], self.eigenvalues[k - 1]))
    }

    /// `(min, max)` of the strictly positive part, if any.
    pub fn positive_extremes(&self) -> Option<(f64, f64)> {
        let k = self.eigenvalues.partition_point(|&v| v <= 0.0);
        (k < self.len()).then(|| (self.eigenvalues[k], self.max()))
    }
}

pub fn sym_eigenvalues(m: &DenseSymMatrix) -> Result<Spectrum> {
    sym_eigenvalues_with(m, DEFAULT_MAX_SWEEPS)
}

pub fn sym_eigenvalues_with(m: &DenseSymMatrix, max_sweeps: usize) -> Result<Spectrum> {
    let (mut d, mut e) = tridiagonalize(m.as_matrix().clone());
    tridiagonal_ql(&mut d, &mut e, max_sweeps)?;
    Ok(Spectrum::new(d))
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e.len() == d.len() - 1`).
pub fn tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Result<Spectrum> {
    check_len(d.len().saturating_sub(1), e.len())?;
    let mut dd = d.to_vec();
    let mut ee = vec![0.0; d.len()];
    ee[..e.len()].copy_from_slice(e);
    tridiagonal_ql(&mut dd, &mut ee, DEFAULT_MAX_SWEEPS)?;
    Ok(Spectrum::new(dd))
}

/// Eigenvalues of `b⁻¹ a` for SPD `b`, via `L⁻¹ a L⁻ᵀ` with `b = L Lᵀ`.
pub fn gen_sym_eigenvalues(a: &DenseSymMatrix, b: &DenseSymMatrix) -> Result<Spectrum> {
    check_len(a.order(), b.order())?;
    let l = cholesky_factor(b)?;
    let y = l.forward_matrix(a.as_matrix())?;
    // (L⁻¹ a) L⁻ᵀ = L⁻¹ (L⁻¹ a)ᵀ by symmetry of a
    let w = l.forward_matrix(&y.transpose())?;
    sym_eigenvalues(&DenseSymMatrix::new(w)?)
}

/// Eigenvalues of `b_inv · a` when only the SPD inverse `b_inv = b⁻¹` is at
/// hand, via `Lᵀ a L` with `b_inv = L Lᵀ`.
pub fn gen_sym_eigenvalues_inv(a: &DenseSymMatrix, b_inv: &DenseSymMatrix) -> Result<Spectrum> {
    check_len(a.order(), b_inv.order())?;
    let l = cholesky_factor(b_inv)?.into_lower();
    let al = a.as_matrix().matmul(&l)?;
    let w = l.transpose().matmul(&al)?;
    sym_eigenvalues(&DenseSymMatrix::new(w)?)
}

/// Householder reduction to tridiagonal form, operating on the lower
/// triangle. Returns `(diag, offdiag)` with `offdiag[i]` coupling `i` and
/// `i + 1` and a trailing zero.
fn tridiagonalize(mut a: DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut p = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        if l == 0 {
            e[i] = a[(i, 0)];
            continue;
        }
        let scale: f64 = a.row(i)[..=l].iter().map(|v| v.abs()).sum();
        if scale == 0.0 {
            e[i] = a[(i, l)];
            continue;
        }
        let mut h = 0.0;
        for v in &mut a.row_mut(i)[..=l] {
            *v /= scale;
            h += *v * *v;
        }
        let f = a[(i, l)];
        let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
        e[i] = scale * g;
        h -= f * g;
        a[(i, l)] = f - g;

        // p = (A u) / h over the leading (l+1)x(l+1) block, u = row i
        let u: Vec<f64> = a.row(i)[..=l].to_vec();
        p[..=l].iter_mut().for_each(|v| *v = 0.0);
        for r in 0..=l {
            let row = &a.row(r)[..=r];
            let mut s = 0.0;
            for k in 0..r {
                s += row[k] * u[k];
                p[k] += row[k] * u[r];
            }
            p[r] += s + row[r] * u[r];
        }
        let mut f = 0.0;
        for j in 0..=l {
            p[j] /= h;
            f += p[j] * u[j];
        }
        let hh = f / (h + h);
        for j in 0..=l {
            p[j] -= hh * u[j];
        }
        for j in 0..=l {
            let (fj, gj) = (u[j], p[j]);
            let row = &mut a.row_mut(j)[..=j];
            for k in 0..=j {
                row[k] -= fj * p[k] + gj * u[k];
            }
        }
    }
    for i in 0..n {
        d[i] = a[(i, i)];
    }
    // shift so e[i] couples i and i+1
    for i in 1..n {
        e[i - 1] = e[i];
    }
    if n > 0 {
        e[n - 1] = 0.0;
    }
    (d, e)
}

/// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix.
/// `e` has length `d.len()` with `e[i]` coupling `i` and `i + 1`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], max_sweeps: usize) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_sweeps {
                return Err(Error::NoConvergence { sweeps: max_sweeps });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn diagonal_input() {
        let s = sym_eigenvalues(&DenseSymMatrix::from_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0, 2.0, 3.0]);
        assert_eq!((s.min(), s.max()), (1.0, 3.0));
    }

    #[test]
    fn swap_matrix() {
        let m = DenseSymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = sym_eigenvalues(&m).unwrap();
        assert!(close(s.eigenvalues(), &[-1.0, 1.0], 1e-15));
    }

    #[test]
    fn one_by_one() {
        let s = sym_eigenvalues(&DenseSymMatrix::from_diagonal(&[-4.5])).unwrap();
        assert_eq!(s.eigenvalues(), &[-4.5]);
    }

    #[test]
    fn laplacian_1d_closed_form() {
        let n = 40;
        let m = DenseMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let s = sym_eigenvalues(&DenseSymMatrix::new(m).unwrap()).unwrap();
        let mut expect: Vec<f64> = (1..=n)
            .map(|k| {
                let t = (k as f64) * std::f64::consts::PI / (2.0 * (n as f64 + 1.0));
                4.0 * t.sin().powi(2)
            })
            .collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(close(s.eigenvalues(), &expect, 1e-12));
    }

    #[test]
    fn tridiagonal_entry_point() {
        let s = tridiagonal_eigenvalues(&[2.0, 2.0], &[1.0]).unwrap();
        assert!(close(s.eigenvalues(), &[1.0, 3.0], 1e-14));
    }

    #[test]
    fn generalized_identical_and_scaled() {
        let a = DenseSymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let s = gen_sym_eigenvalues(&a, &a).unwrap();
        assert!(close(s.eigenvalues(), &[1.0, 1.0], 1e-14));
        let s = gen_sym_eigenvalues(&DenseSymMatrix::identity(3).scaled(2.0), &DenseSymMatrix::identity(3))
            .unwrap();
        assert_eq!(s.eigenvalues(), &[2.0, 2.0, 2.0]);
    }

    #[test]
    fn inverse_route_agrees() {
        let a = DenseSymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, -2.0]]).unwrap();
        let b = DenseSymMatrix::from_rows(&[vec![3.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let direct = gen_sym_eigenvalues(&a, &b).unwrap();
        let binv = cholesky_factor(&b).unwrap().inverse();
        let via_inv = gen_sym_eigenvalues_inv(&a, &binv).unwrap();
        assert!(close(direct.eigenvalues(), via_inv.eigenvalues(), 1e-13));
    }

    #[test]
    fn extremes_by_sign() {
        let s = Spectrum::new(vec![0.5, -2.0, -1.0, 3.0]);
        assert_eq!(s.negative_extremes(), Some((-2.0, -1.0)));
        assert_eq!(s.positive_extremes(), Some((0.5, 3.0)));
        assert_eq!(s.count_below(0.0), 2);
    }
}
