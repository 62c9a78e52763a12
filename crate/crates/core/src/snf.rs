//! Smith normal form over Z, Gaussian elimination over Q, and the exact
//! solvers built on them: kernels, image lattices, linear systems.
//!
//! The SNF routine pivots on the entry of minimal absolute value, which
//! limits coefficient growth and makes the output deterministic. All four
//! transforms U, U^-1, V, V^-1 are tracked so callers can certify
//! U * M * V = D and move vectors between coordinate systems without ever
//! inverting a matrix.

use crate::matrix::{ExactMatrix, MatrixError};
use crate::ring::{rounded_div, Coeff, Ring};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("smith normal form requires integer entries (ring Z), got ring {0}")]
    NotIntegerRing(Ring),
    #[error("composition d_out * d_in is nonzero at entry ({row},{col}): the pair is not a complex segment")]
    CompositionNonzero { row: usize, col: usize },
    #[error("column {col} of the denominator does not lie in the numerator subgroup")]
    NotInSubgroup { col: usize },
    #[error("dimension mismatch: d_out has {dout_cols} columns but d_in has {din_rows} rows")]
    SegmentShape { dout_cols: usize, din_rows: usize },
}

/// Certified decomposition U * M * V = D with U, V unimodular and D
/// diagonal with a divisibility chain d1 | d2 | ... .
#[derive(Debug, Clone)]
pub struct SmithNormalForm {
    pub u: ExactMatrix,
    pub d: ExactMatrix,
    pub v: ExactMatrix,
    pub u_inv: ExactMatrix,
    pub v_inv: ExactMatrix,
    pub rank: usize,
}

impl SmithNormalForm {
    /// Diagonal entries of D (all of them, including trailing zeros).
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.get(i, i).to_integer()).collect()
    }

    /// Nonzero diagonal entries, normalized positive.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|d| !d.is_zero()).map(|d| d.abs()).collect()
    }
}

struct Workspace {
    m: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    v_inv: Vec<Vec<BigInt>>,
    rows: usize,
    cols: usize,
}

fn eye(n: usize) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

impl Workspace {
    fn new(m: Vec<Vec<BigInt>>, rows: usize, cols: usize) -> Self {
        Workspace { m, u: eye(rows), u_inv: eye(rows), v: eye(cols), v_inv: eye(cols), rows, cols }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.m.swap(a, b);
        self.u.swap(a, b);
        // U_inv picks up the inverse op on the column side.
        for row in &mut self.u_inv {
            row.swap(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for row in &mut self.m {
            row.swap(a, b);
        }
        for row in &mut self.v {
            row.swap(a, b);
        }
        self.v_inv.swap(a, b);
    }

    /// row a += q * row b, with the inverse shear applied to U_inv.
    fn add_row(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let t = &self.m[b][c] * q;
            self.m[a][c] += t;
        }
        for c in 0..self.rows {
            let t = &self.u[b][c] * q;
            self.u[a][c] += t;
        }
        for r in 0..self.rows {
            let t = &self.u_inv[r][a] * q;
            self.u_inv[r][b] -= t;
        }
    }

    /// col a += q * col b.
    fn add_col(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let t = &self.m[r][b] * q;
            self.m[r][a] += t;
        }
        for r in 0..self.cols {
            let t = &self.v[r][b] * q;
            self.v[r][a] += t;
        }
        for c in 0..self.cols {
            let t = &self.v_inv[a][c] * q;
            self.v_inv[b][c] -= t;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for c in 0..self.cols {
            self.m[a][c] = -self.m[a][c].clone();
        }
        for c in 0..self.rows {
            self.u[a][c] = -self.u[a][c].clone();
        }
        for r in 0..self.rows {
            self.u_inv[r][a] = -self.u_inv[r][a].clone();
        }
    }

    /// Minimal-absolute-value nonzero entry of the trailing submatrix.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for r in t..self.rows {
            for c in t..self.cols {
                let v = &self.m[r][c];
                if v.is_zero() {
                    continue;
                }
                let a = v.abs();
                match &best {
                    Some((_, _, cur)) if *cur <= a => {}
                    _ => best = Some((r, c, a)),
                }
            }
        }
        best.map(|(r, c, _)| (r, c))
    }
}

/// Computes the Smith normal form of an integer matrix.
///
/// Always succeeds on ring-Z input (total function); the only error paths
/// are a ring-Q matrix or stray fractional entries.
pub fn smith_normal_form(m: &ExactMatrix) -> Result<SmithNormalForm, LinalgError> {
    if m.ring() != Ring::Z {
        return Err(LinalgError::NotIntegerRing(m.ring()));
    }
    let grid = m.to_dense_int()?;
    let rows = m.rows();
    let cols = m.cols();
    let mut w = Workspace::new(grid, rows, cols);

    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = w.min_pivot(t) else { break };
        w.swap_rows(t, pr);
        w.swap_cols(t, pc);

        // Clear row and column t; the pivot strictly shrinks whenever a
        // division leaves a remainder, so this terminates.
        loop {
            let mut dirty = false;
            for r in t + 1..rows {
                if w.m[r][t].is_zero() {
                    continue;
                }
                let q = -rounded_div(&w.m[r][t], &w.m[t][t]);
                w.add_row(r, t, &q);
                if !w.m[r][t].is_zero() {
                    // Remainder became the smaller pivot.
                    w.swap_rows(t, r);
                    dirty = true;
                }
            }
            for c in t + 1..cols {
                if w.m[t][c].is_zero() {
                    continue;
                }
                let q = -rounded_div(&w.m[t][c], &w.m[t][t]);
                w.add_col(c, t, &q);
                if !w.m[t][c].is_zero() {
                    w.swap_cols(t, c);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }

        // Enforce the divisibility chain: fold any non-multiple into row t.
        let mut fixed = true;
        'scan: for r in t + 1..rows {
            for c in t + 1..cols {
                if !(&w.m[r][c] % &w.m[t][t]).is_zero() {
                    let one = BigInt::one();
                    w.add_row(t, r, &one);
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if fixed {
            if w.m[t][t].is_negative() {
                w.negate_row(t);
            }
            t += 1;
        }
    }

    let rank = t;
    Ok(SmithNormalForm {
        u: ExactMatrix::from_dense_int(Ring::Z, &w.u),
        d: ExactMatrix::from_dense_int(Ring::Z, &w.m),
        v: ExactMatrix::from_dense_int(Ring::Z, &w.v),
        u_inv: ExactMatrix::from_dense_int(Ring::Z, &w.u_inv),
        v_inv: ExactMatrix::from_dense_int(Ring::Z, &w.v_inv),
        rank,
    })
}

/// Reduced row echelon form over Q. Returns the reduced grid and the
/// pivot column of each pivot row.
fn rref(mut grid: Vec<Vec<Coeff>>, cols: usize) -> (Vec<Vec<Coeff>>, Vec<usize>) {
    let rows = grid.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !grid[i][c].is_zero()) else { continue };
        grid.swap(r, pr);
        let inv = grid[r][c].recip();
        for x in &mut grid[r] {
            *x *= &inv;
        }
        let pivot_row = grid[r].clone();
        for (i, row) in grid.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= p * &f;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    (grid, pivots)
}

/// Rank over the fraction field; equals the free rank over Z as well.
pub fn rank(m: &ExactMatrix) -> usize {
    let (_, pivots) = rref(m.to_dense(), m.cols());
    pivots.len()
}

/// Basis of the kernel as matrix columns.
///
/// Over Z the basis is saturated (the kernel is a direct summand), so any
/// integer vector of the kernel has integer coordinates in this basis.
pub fn kernel_basis(m: &ExactMatrix) -> Result<ExactMatrix, LinalgError> {
    match m.ring() {
        Ring::Z => {
            let snf = smith_normal_form(m)?;
            let cols: Vec<usize> = (snf.rank..m.cols()).collect();
            Ok(snf.v.select_columns(&cols))
        }
        Ring::Q => {
            let (grid, pivots) = rref(m.to_dense(), m.cols());
            let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
            let free: Vec<usize> = (0..m.cols()).filter(|c| !pivot_set.contains(c)).collect();
            let mut basis = ExactMatrix::zero(Ring::Q, m.cols(), free.len());
            for (j, &fc) in free.iter().enumerate() {
                basis.add_entry(fc, j, Coeff::one())?;
                for (i, &pc) in pivots.iter().enumerate() {
                    let v = -grid[i][fc].clone();
                    basis.add_entry(pc, j, v)?;
                }
            }
            Ok(basis)
        }
    }
}

/// Basis (as columns) of the image: the column lattice over Z, the column
/// space over Q.
pub fn image_basis(m: &ExactMatrix) -> Result<ExactMatrix, LinalgError> {
    match m.ring() {
        Ring::Z => {
            let snf = smith_normal_form(m)?;
            // M*V has the lattice basis d_i * (U^-1 e_i) in its leading columns.
            let mv = m.mul(&snf.v)?;
            let cols: Vec<usize> = (0..snf.rank).collect();
            Ok(mv.select_columns(&cols))
        }
        Ring::Q => {
            let (_, pivots) = rref(m.to_dense(), m.cols());
            Ok(m.select_columns(&pivots))
        }
    }
}

/// Solves m * x = target over the coefficient ring of `m`.
///
/// `None` is a legitimate "unsolvable over this ring" answer, not an
/// error: e.g. 2x = 3 has no solution over Z but x = 3/2 over Q.
pub fn solve_preimage(m: &ExactMatrix, target: &[Coeff]) -> Result<Option<Vec<Coeff>>, LinalgError> {
    if target.len() != m.rows() {
        return Err(LinalgError::Matrix(MatrixError::DimensionMismatch {
            lr: m.rows(),
            lc: m.cols(),
            rr: target.len(),
            rc: 1,
        }));
    }
    match m.ring() {
        Ring::Z => {
            let snf = smith_normal_form(m)?;
            solve_with(&snf, m.cols(), target)
        }
        Ring::Q => Ok(solve_q(m, target)),
    }
}

/// Solves with a precomputed SNF of the matrix: y = U*t, x = V*y' where
/// y'_i = y_i / d_i must be integral and y_i = 0 past the rank.
pub fn solve_with(
    snf: &SmithNormalForm,
    cols: usize,
    target: &[Coeff],
) -> Result<Option<Vec<Coeff>>, LinalgError> {
    let y = snf.u.apply(target)?;
    let mut yp = vec![Coeff::zero(); cols];
    let diag = snf.diagonal();
    for (i, yi) in y.iter().enumerate() {
        if i < snf.rank {
            let d = Coeff::from_integer(diag[i].clone());
            let q = yi / &d;
            if !q.is_integer() {
                return Ok(None);
            }
            yp[i] = q;
        } else if !yi.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(snf.v.apply(&yp)?))
}

fn solve_q(m: &ExactMatrix, target: &[Coeff]) -> Option<Vec<Coeff>> {
    let cols = m.cols();
    let mut grid = m.to_dense();
    for (r, row) in grid.iter_mut().enumerate() {
        row.push(target[r].clone());
    }
    let (grid, pivots) = rref(grid, cols + 1);
    if pivots.contains(&cols) {
        return None; // inconsistent system
    }
    let mut x = vec![Coeff::zero(); cols];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = grid[i][cols].clone();
    }
    Some(x)
}

/// Solves K * X = B column by column over the shared ring; `None` when
/// some column of B is not in the image of K.
pub fn solve_matrix(k: &ExactMatrix, b: &ExactMatrix) -> Result<Option<ExactMatrix>, LinalgError> {
    if k.rows() != b.rows() {
        return Err(LinalgError::Matrix(MatrixError::DimensionMismatch {
            lr: k.rows(),
            lc: k.cols(),
            rr: b.rows(),
            rc: b.cols(),
        }));
    }
    let snf = if k.ring() == Ring::Z { Some(smith_normal_form(k)?) } else { None };
    let mut cols = Vec::with_capacity(b.cols());
    for c in 0..b.cols() {
        let t = b.column(c);
        let x = match &snf {
            Some(s) => solve_with(s, k.cols(), &t)?,
            None => solve_q(k, &t),
        };
        match x {
            Some(x) => cols.push(x),
            None => return Ok(None),
        }
    }
    Ok(Some(ExactMatrix::from_columns(k.ring(), k.cols(), &cols)?))
}
