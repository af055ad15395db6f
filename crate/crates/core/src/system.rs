//! Double saddle-point systems
//!
//! ```text
//! [ A  Bᵀ 0  ] [x]   [f]
//! [ B  0  Cᵀ ] [y] = [g]
//! [ 0  C  E  ] [z]   [h]
//! ```
//!
//! and the SPD block preconditioner `P = P_L P_D⁻¹ P_Lᵀ` with
//! `P_L = [[Â,0,0],[B,−Ŝ,0],[0,C,X̂]]`, `P_D = diag(Â, Ŝ, X̂)`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{
    cholesky_factor, sym_eigenvalues, BandCholesky, CsrMatrix, DenseMatrix, DenseSymMatrix,
};
use crate::operator::{materialize_sym, LinearOperator};

/// Largest total order that is ever materialized densely.
pub const DENSE_BUDGET: usize = 20_000;
/// Relative tolerance of the semidefiniteness check on `E`.
pub const PSD_TOL: f64 = 1e-10;
/// Relative tolerance of the full-row-rank checks on `B` and `C`.
pub const RANK_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-12;

/// A block stored in whichever layout its producer supplied.
#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    Dense(DenseMatrix),
    Sparse(CsrMatrix),
}

impl Block {
    pub fn rows(&self) -> usize {
        match self {
            Block::Dense(m) => m.rows(),
            Block::Sparse(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Block::Dense(m) => m.cols(),
            Block::Sparse(m) => m.cols(),
        }
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        match self {
            Block::Dense(m) => m.matvec_into(x, y),
            Block::Sparse(m) => m.matvec_into(x, y),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows()];
        self.matvec_into(x, &mut y);
        y
    }

    /// `y = selfᵀ x`
    pub fn matvec_t_into(&self, x: &[f64], y: &mut [f64]) {
        match self {
            Block::Dense(m) => m.matvec_t_into(x, y),
            Block::Sparse(m) => m.matvec_t_into(x, y),
        }
    }

    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.cols()];
        self.matvec_t_into(x, &mut y);
        y
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Block::Dense(m) => m.clone(),
            Block::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_csr(&self) -> CsrMatrix {
        match self {
            Block::Dense(m) => CsrMatrix::from_dense(m),
            Block::Sparse(m) => m.clone(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Block::Dense(m) => m.max_abs(),
            Block::Sparse(m) => m.max_abs(),
        }
    }

    /// Row `i` as a dense vector.
    pub fn row_dense(&self, i: usize) -> Vec<f64> {
        match self {
            Block::Dense(m) => m.row(i).to_vec(),
            Block::Sparse(m) => {
                let mut r = vec![0.0; m.cols()];
                for (j, v) in m.row(i) {
                    r[j] = v;
                }
                r
            }
        }
    }

    /// `self · selfᵀ` in the same layout.
    pub fn gram(&self) -> Block {
        match self {
            Block::Dense(m) => Block::Dense(m.matmul(&m.transpose()).expect("conformal")),
            Block::Sparse(m) => Block::Sparse(m.matmul(&m.transpose()).expect("conformal")),
        }
    }

    fn symmetry_error(&self) -> f64 {
        match self {
            Block::Dense(m) => m.max_abs_diff(&m.transpose()),
            Block::Sparse(m) => m
                .triplets()
                .into_iter()
                .map(|(i, j, v)| (v - m.get(j, i)).abs())
                .fold(0.0, f64::max),
        }
    }

    /// Largest absolute row sum, an upper bound on the spectral norm of a
    /// symmetric matrix.
    fn inf_norm(&self) -> f64 {
        (0..self.rows())
            .map(|i| match self {
                Block::Dense(m) => m.row(i).iter().map(|v| v.abs()).sum::<f64>(),
                Block::Sparse(m) => m.row(i).map(|(_, v)| v.abs()).sum::<f64>(),
            })
            .fold(0.0, f64::max)
    }
}

fn check_symmetric(block: &Block, name: &str) -> Result<()> {
    let scale = block.max_abs();
    if block.symmetry_error() > SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidSystem(format!("{name} is not symmetric")));
    }
    Ok(())
}

fn check_spd(block: &Block, name: &str) -> Result<()> {
    check_symmetric(block, name)?;
    let res = match block {
        Block::Dense(m) => cholesky_factor(&DenseSymMatrix::new(m.clone())?).map(|_| ()),
        Block::Sparse(m) => BandCholesky::new(m).map(|_| ()),
    };
    res.map_err(|e| Error::InvalidSystem(format!("{name} is not SPD: {e}")))
}

fn check_psd(block: &Block, name: &str) -> Result<()> {
    check_symmetric(block, name)?;
    let norm = block.inf_norm();
    if norm == 0.0 {
        return Ok(());
    }
    let ok = match block {
        Block::Dense(m) => {
            let spec = sym_eigenvalues(&DenseSymMatrix::new(m.clone())?)?;
            spec.min() >= -PSD_TOL * spec.min().abs().max(spec.max().abs())
        }
        // E + τI SPD certifies λ_min(E) > −τ
        Block::Sparse(m) => {
            let shifted = m.linear_combination(1.0, &CsrMatrix::identity(m.rows()), PSD_TOL * norm)?;
            BandCholesky::new(&shifted).is_ok()
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSystem(format!("{name} is not positive semidefinite")))
    }
}

fn check_full_row_rank(block: &Block, name: &str) -> Result<()> {
    let g = block.gram();
    let ok = match &g {
        Block::Dense(m) => {
            let spec = sym_eigenvalues(&DenseSymMatrix::new(m.clone())?)?;
            spec.min() > RANK_TOL * spec.max()
        }
        // G − τI SPD with τ ≥ RANK_TOL·λ_max certifies λ_min > RANK_TOL·λ_max
        Block::Sparse(m) => {
            let tau = RANK_TOL * g.inf_norm();
            let shifted = m.linear_combination(1.0, &CsrMatrix::identity(m.rows()), -tau)?;
            BandCholesky::new(&shifted).is_ok()
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSystem(format!("{name} does not have full row rank")))
    }
}

#[derive(Clone, Debug)]
pub struct DoubleSaddleSystem {
    a: Arc<Block>,
    b: Arc<Block>,
    c: Arc<Block>,
    e: Arc<Block>,
    rhs: Vec<f64>,
}

impl DoubleSaddleSystem {
    /// Builds and validates: dimensions, `A` SPD, `E` PSD, `B` and `C` of
    /// full row rank.
    pub fn new(a: Block, b: Block, c: Block, e: Block, rhs: Vec<f64>) -> Result<Self> {
        let sys = Self::new_unchecked(a, b, c, e, rhs)?;
        check_spd(&sys.a, "A")?;
        check_psd(&sys.e, "E")?;
        check_full_row_rank(&sys.b, "B")?;
        check_full_row_rank(&sys.c, "C")?;
        Ok(sys)
    }

    /// Checks dimensions only.
    pub fn new_unchecked(a: Block, b: Block, c: Block, e: Block, rhs: Vec<f64>) -> Result<Self> {
        let n = a.rows();
        let m = b.rows();
        let p = c.rows();
        let shape_ok = a.cols() == n
            && b.cols() == n
            && c.cols() == m
            && e.rows() == p
            && e.cols() == p;
        if !shape_ok {
            return Err(Error::InvalidSystem(format!(
                "block shapes A {}x{}, B {}x{}, C {}x{}, E {}x{} are not conformal",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols(),
                c.rows(),
                c.cols(),
                e.rows(),
                e.cols()
            )));
        }
        if !(n >= m && m >= p && p >= 1) {
            return Err(Error::InvalidSystem(format!("need n >= m >= p >= 1, got {n}, {m}, {p}")));
        }
        check_len(n + m + p, rhs.len())?;
        Ok(DoubleSaddleSystem {
            a: Arc::new(a),
            b: Arc::new(b),
            c: Arc::new(c),
            e: Arc::new(e),
            rhs,
        })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.b.rows()
    }

    pub fn p(&self) -> usize {
        self.c.rows()
    }

    pub fn order(&self) -> usize {
        self.n() + self.m() + self.p()
    }

    pub fn a(&self) -> &Block {
        &self.a
    }

    pub fn b(&self) -> &Block {
        &self.b
    }

    pub fn c(&self) -> &Block {
        &self.c
    }

    pub fn e(&self) -> &Block {
        &self.e
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn e_is_zero(&self) -> bool {
        self.e.max_abs() == 0.0
    }

    pub fn with_rhs(&self, rhs: Vec<f64>) -> Result<Self> {
        check_len(self.order(), rhs.len())?;
        Ok(DoubleSaddleSystem { rhs, ..self.clone() })
    }

    /// The dense symmetric matrix of the whole system.
    pub fn assemble_full_matrix(&self) -> Result<DenseSymMatrix> {
        let (n, m, p) = (self.n(), self.m(), self.p());
        let total = n + m + p;
        check_budget(total)?;
        let mut out = DenseMatrix::zeros(total, total);
        place(&mut out, &self.a.to_dense(), 0, 0, false);
        place(&mut out, &self.b.to_dense(), n, 0, true);
        place(&mut out, &self.c.to_dense(), n + m, n, true);
        place(&mut out, &self.e.to_dense(), n + m, n + m, false);
        DenseSymMatrix::new(out)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let doc = SystemJson {
            n: self.n(),
            m: self.m(),
            p: self.p(),
            a: BlockJson::from(self.a.as_ref()),
            b: BlockJson::from(self.b.as_ref()),
            c: BlockJson::from(self.c.as_ref()),
            e: BlockJson::from(self.e.as_ref()),
            rhs: self.rhs.clone(),
        };
        crate::io::write_atomic(path, serde_json::to_string(&doc)?.as_bytes())
    }

    /// Loads and validates a system stored by [`Self::save_json`].
    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: SystemJson = serde_json::from_str(text)?;
        let sys = Self::new(
            doc.a.into_block()?,
            doc.b.into_block()?,
            doc.c.into_block()?,
            doc.e.into_block()?,
            doc.rhs,
        )?;
        if (sys.n(), sys.m(), sys.p()) != (doc.n, doc.m, doc.p) {
            return Err(Error::InvalidSystem("declared n, m, p disagree with the blocks".into()));
        }
        Ok(sys)
    }
}

/// Writes `block` (or its transpose as well) into `out` at `(r0, c0)`.
fn place(out: &mut DenseMatrix, block: &DenseMatrix, r0: usize, c0: usize, mirror: bool) {
    for i in 0..block.rows() {
        for (j, v) in block.row(i).iter().enumerate() {
            out[(r0 + i, c0 + j)] = *v;
            if mirror {
                out[(c0 + j, r0 + i)] = *v;
            }
        }
    }
}

fn check_budget(order: usize) -> Result<()> {
    if order > DENSE_BUDGET {
        Err(Error::BudgetExceeded { order, budget: DENSE_BUDGET })
    } else {
        Ok(())
    }
}

/// The full system matrix as an operator.
impl LinearOperator for DoubleSaddleSystem {
    fn dim(&self) -> usize {
        self.order()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let (n, m) = (self.n(), self.m());
        let (x1, rest) = x.split_at(n);
        let (x2, x3) = rest.split_at(m);
        let (y1, rest) = y.split_at_mut(n);
        let (y2, y3) = rest.split_at_mut(m);
        self.a.matvec_into(x1, y1);
        let bt = self.b.matvec_t(x2);
        y1.iter_mut().zip(&bt).for_each(|(a, b)| *a += b);
        self.b.matvec_into(x1, y2);
        let ct = self.c.matvec_t(x3);
        y2.iter_mut().zip(&ct).for_each(|(a, b)| *a += b);
        self.c.matvec_into(x2, y3);
        let ex = self.e.matvec(x3);
        y3.iter_mut().zip(&ex).for_each(|(a, b)| *a += b);
    }
}

/// `B Â⁻¹ Bᵀ`.
pub fn schur_s_tilde(sys: &DoubleSaddleSystem, a_inv: &dyn LinearOperator) -> Result<DenseSymMatrix> {
    check_len(sys.n(), a_inv.dim())?;
    congruence(sys.b(), a_inv)
}

/// `E + C Ŝ⁻¹ Cᵀ`.
pub fn schur_x_tilde(sys: &DoubleSaddleSystem, s_inv: &dyn LinearOperator) -> Result<DenseSymMatrix> {
    let mut k = coupling_gram(sys, s_inv)?.into_matrix();
    k.add_scaled(1.0, &sys.e().to_dense())?;
    DenseSymMatrix::new(k)
}

/// `C Ŝ⁻¹ Cᵀ`, the part of `X̃` congruent to `K Kᵀ`.
pub fn coupling_gram(sys: &DoubleSaddleSystem, s_inv: &dyn LinearOperator) -> Result<DenseSymMatrix> {
    check_len(sys.m(), s_inv.dim())?;
    congruence(sys.c(), s_inv)
}

/// `G · Op · Gᵀ` computed column by column.
pub(crate) fn congruence(g: &Block, op: &dyn LinearOperator) -> Result<DenseSymMatrix> {
    use rayon::prelude::*;
    let k = g.rows();
    check_budget(k)?;
    let columns: Vec<Vec<f64>> = (0..k)
        .into_par_iter()
        .map(|j| g.matvec(&op.apply(&g.row_dense(j))))
        .collect();
    DenseSymMatrix::new(DenseMatrix::from_columns(k, &columns)?)
}

/// `P = P_L P_D⁻¹ P_Lᵀ`, applied through its inverse.
#[derive(Clone)]
pub struct BlockPreconditioner {
    a_inv: Arc<dyn LinearOperator>,
    s_inv: Arc<dyn LinearOperator>,
    x_inv: Arc<dyn LinearOperator>,
    b: Arc<Block>,
    c: Arc<Block>,
}

impl BlockPreconditioner {
    pub fn new(
        sys: &DoubleSaddleSystem,
        a_inv: Arc<dyn LinearOperator>,
        s_inv: Arc<dyn LinearOperator>,
        x_inv: Arc<dyn LinearOperator>,
    ) -> Result<Self> {
        check_len(sys.n(), a_inv.dim())?;
        check_len(sys.m(), s_inv.dim())?;
        check_len(sys.p(), x_inv.dim())?;
        for (name, op) in [("A", &a_inv), ("S", &s_inv), ("X", &x_inv)] {
            if !op.is_spd() {
                return Err(Error::InvalidArgument(format!(
                    "inverse {name}-block operator must be declared SPD"
                )));
            }
        }
        Ok(BlockPreconditioner { a_inv, s_inv, x_inv, b: sys.b.clone(), c: sys.c.clone() })
    }

    pub fn a_inv(&self) -> &Arc<dyn LinearOperator> {
        &self.a_inv
    }

    pub fn s_inv(&self) -> &Arc<dyn LinearOperator> {
        &self.s_inv
    }

    pub fn x_inv(&self) -> &Arc<dyn LinearOperator> {
        &self.x_inv
    }

    pub fn n(&self) -> usize {
        self.a_inv.dim()
    }

    pub fn m(&self) -> usize {
        self.s_inv.dim()
    }

    pub fn p(&self) -> usize {
        self.x_inv.dim()
    }

    /// `w = P⁻¹ r`.
    pub fn apply_preconditioner(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), r.len())?;
        let mut w = vec![0.0; r.len()];
        self.apply_into(r, &mut w);
        Ok(w)
    }

    /// Dense `P` from the materialized inverse blocks.
    pub fn assemble_preconditioner_dense(&self) -> Result<DenseSymMatrix> {
        let (n, m, p) = (self.n(), self.m(), self.p());
        check_budget(n + m + p)?;
        let a_inv = materialize_sym(self.a_inv.as_ref())?;
        let s_inv = materialize_sym(self.s_inv.as_ref())?;
        let x_inv = materialize_sym(self.x_inv.as_ref())?;
        let a_hat = cholesky_factor(&a_inv)?.inverse();
        let s_hat = cholesky_factor(&s_inv)?.inverse();
        let x_hat = cholesky_factor(&x_inv)?.inverse();
        let mut s22 = congruence(&self.b, &a_inv)?.into_matrix();
        s22.add_scaled(1.0, s_hat.as_matrix())?;
        let mut s33 = congruence(&self.c, &s_inv)?.into_matrix();
        s33.add_scaled(1.0, x_hat.as_matrix())?;
        let mut neg_c = self.c.to_dense();
        neg_c.scale(-1.0);

        let mut out = DenseMatrix::zeros(n + m + p, n + m + p);
        place(&mut out, a_hat.as_matrix(), 0, 0, false);
        place(&mut out, &self.b.to_dense(), n, 0, true);
        place(&mut out, &s22, n, n, false);
        place(&mut out, &neg_c, n + m, n, true);
        place(&mut out, &s33, n + m, n + m, false);
        let pmat = DenseSymMatrix::new(out)?;
        cholesky_factor(&pmat)?;
        Ok(pmat)
    }

    /// Dense `P⁻¹`, one application per identity column.
    pub fn materialize_inverse(&self) -> Result<DenseSymMatrix> {
        check_budget(self.dim())?;
        materialize_sym(self)
    }
}

impl LinearOperator for BlockPreconditioner {
    fn dim(&self) -> usize {
        self.n() + self.m() + self.p()
    }

    fn apply_into(&self, r: &[f64], w: &mut [f64]) {
        let (n, m) = (self.n(), self.m());
        let (r1, rest) = r.split_at(n);
        let (r2, r3) = rest.split_at(m);
        let (w1, rest) = w.split_at_mut(n);
        let (w2, w3) = rest.split_at_mut(m);

        // forward substitution with P_L, scaling by P_D
        let u1 = self.a_inv.apply(r1);
        let mut v2 = self.b.matvec(&u1);
        v2.iter_mut().zip(r2).for_each(|(v, r)| *v -= r);
        let u2 = self.s_inv.apply(&v2);
        let mut v3 = self.c.matvec(&u2);
        v3.iter_mut().zip(r3).for_each(|(v, r)| *v = r - *v);

        // back substitution with P_Lᵀ
        self.x_inv.apply_into(&v3, w3);
        let mut t2 = self.c.matvec_t(w3);
        t2.iter_mut().zip(&v2).for_each(|(t, v)| *t -= v);
        self.s_inv.apply_into(&t2, w2);
        let mut t1 = self.b.matvec_t(w2);
        t1.iter_mut().zip(r1).for_each(|(t, r)| *t = r - *t);
        self.a_inv.apply_into(&t1, w1);
    }

    fn is_spd(&self) -> bool {
        true
    }
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    n: usize,
    m: usize,
    p: usize,
    #[serde(rename = "A")]
    a: BlockJson,
    #[serde(rename = "B")]
    b: BlockJson,
    #[serde(rename = "C")]
    c: BlockJson,
    #[serde(rename = "E")]
    e: BlockJson,
    rhs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "lowercase")]
enum BlockJson {
    Dense { rows: usize, cols: usize, data: Vec<Vec<f64>> },
    Csr { rows: usize, cols: usize, triplets: Vec<(usize, usize, f64)> },
}

impl From<&Block> for BlockJson {
    fn from(b: &Block) -> Self {
        match b {
            Block::Dense(m) => BlockJson::Dense { rows: m.rows(), cols: m.cols(), data: m.to_rows() },
            Block::Sparse(m) => BlockJson::Csr { rows: m.rows(), cols: m.cols(), triplets: m.triplets() },
        }
    }
}

impl BlockJson {
    fn into_block(self) -> Result<Block> {
        match self {
            BlockJson::Dense { rows, cols, data } => {
                check_len(rows, data.len())?;
                let flat: Vec<f64> = data.into_iter().flatten().collect();
                Ok(Block::Dense(DenseMatrix::from_row_major(rows, cols, flat)?))
            }
            BlockJson::Csr { rows, cols, triplets } => {
                Ok(Block::Sparse(CsrMatrix::from_triplets(rows, cols, &triplets)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::SparseOperator;

    fn scalar(v: f64) -> Block {
        Block::Dense(DenseMatrix::from_rows(&[vec![v]]).unwrap())
    }

    fn scalar_system() -> DoubleSaddleSystem {
        DoubleSaddleSystem::new(scalar(2.0), scalar(1.0), scalar(1.0), scalar(0.0), vec![1.0, 0.0, 0.0])
            .unwrap()
    }

    fn scalar_inv(v: f64) -> Arc<dyn LinearOperator> {
        Arc::new(SparseOperator::new(CsrMatrix::from_triplets(1, 1, &[(0, 0, v)]).unwrap(), true).unwrap())
    }

    #[test]
    fn scalar_full_matrix() {
        let full = scalar_system().assemble_full_matrix().unwrap();
        assert_eq!(
            full.as_matrix().to_rows(),
            vec![vec![2.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]
        );
    }

    #[test]
    fn scalar_preconditioner() {
        let sys = scalar_system();
        let pc = BlockPreconditioner::new(&sys, scalar_inv(0.5), scalar_inv(2.0), scalar_inv(0.5)).unwrap();
        let w = pc.apply_preconditioner(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(w, vec![1.5, -2.0, -0.5]);
        let p = pc.assemble_preconditioner_dense().unwrap();
        let expect = [[2.0, 1.0, 0.0], [1.0, 1.0, -1.0], [0.0, -1.0, 4.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((p.get(i, j) - expect[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_bad_shapes_and_rank() {
        let r = DoubleSaddleSystem::new(scalar(2.0), scalar(1.0), scalar(1.0), scalar(0.0), vec![0.0; 2]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
        let r = DoubleSaddleSystem::new(scalar(2.0), scalar(0.0), scalar(1.0), scalar(0.0), vec![0.0; 3]);
        assert!(matches!(r, Err(Error::InvalidSystem(_))));
        let r = DoubleSaddleSystem::new(scalar(-2.0), scalar(1.0), scalar(1.0), scalar(0.0), vec![0.0; 3]);
        assert!(matches!(r, Err(Error::InvalidSystem(_))));
        let r = DoubleSaddleSystem::new(scalar(2.0), scalar(1.0), scalar(1.0), scalar(-1.0), vec![0.0; 3]);
        assert!(matches!(r, Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn json_round_trip() {
        let sys = DoubleSaddleSystem::new(
            scalar(2.0),
            Block::Sparse(CsrMatrix::from_triplets(1, 1, &[(0, 0, 1.0)]).unwrap()),
            scalar(1.0),
            scalar(0.0),
            vec![1.0, 2.0, 3.0],
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sys.json");
        sys.save_json(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"format\":\"csr\"") && text.contains("\"format\":\"dense\""));
        let back = DoubleSaddleSystem::load_json(&path).unwrap();
        assert_eq!(back.rhs(), sys.rhs());
        assert_eq!(back.b(), sys.b());
        assert_eq!(back.assemble_full_matrix().unwrap(), sys.assemble_full_matrix().unwrap());
    }
}
