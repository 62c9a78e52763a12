//! Sparse exact matrices over Z or Q.
//!
//! Entries are stored as generator-indexed triplets; the complexes this
//! engine meets are extremely sparse. Zero entries are never stored.

use crate::ring::{Coeff, Ring};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: left is {lr}x{lc}, right is {rr}x{rc}")]
    DimensionMismatch { lr: usize, lc: usize, rr: usize, rc: usize },
    #[error("coefficient ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("entry ({row},{col}) = {value} is not admitted over {ring}")]
    EntryNotInRing { row: usize, col: usize, value: String, ring: Ring },
    #[error("entry index ({row},{col}) out of bounds for {rows}x{cols} matrix")]
    IndexOutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
}

/// A rows x cols matrix with exact entries, kept sparse.
///
/// The convention everywhere in the crate is column-acts: a matrix of a
/// degree-shifting operation has one column per domain generator and one
/// row per codomain generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    ring: Ring,
    entries: BTreeMap<(usize, usize), Coeff>,
}

impl ExactMatrix {
    pub fn zero(ring: Ring, rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, ring, entries: BTreeMap::new() }
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            m.entries.insert((i, i), Coeff::from_integer(BigInt::from(1)));
        }
        m
    }

    pub fn from_triplets<I>(ring: Ring, rows: usize, cols: usize, triplets: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (usize, usize, Coeff)>,
    {
        let mut m = Self::zero(ring, rows, cols);
        for (r, c, v) in triplets {
            m.add_entry(r, c, v)?;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    /// Accumulates `v` onto entry (r, c), dropping the entry if it cancels.
    pub fn add_entry(&mut self, r: usize, c: usize, v: Coeff) -> Result<(), MatrixError> {
        if r >= self.rows || c >= self.cols {
            return Err(MatrixError::IndexOutOfBounds { row: r, col: c, rows: self.rows, cols: self.cols });
        }
        if !self.ring.admits(&v) {
            return Err(MatrixError::EntryNotInRing {
                row: r,
                col: c,
                value: crate::ring::format_coeff(&v),
                ring: self.ring,
            });
        }
        if v.is_zero() {
            return Ok(());
        }
        let slot = self.entries.entry((r, c)).or_insert_with(Coeff::zero);
        *slot += v;
        if slot.is_zero() {
            self.entries.remove(&(r, c));
        }
        Ok(())
    }

    pub fn get(&self, r: usize, c: usize) -> Coeff {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Coeff)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    /// First nonzero entry in row-major order, if any. Used for witnesses.
    pub fn first_nonzero(&self) -> Option<(usize, usize, Coeff)> {
        self.entries.iter().next().map(|(&(r, c), v)| (r, c, v.clone()))
    }

    /// First column containing a nonzero entry (column-major scan).
    pub fn first_nonzero_column(&self) -> Option<usize> {
        self.entries.keys().map(|&(_, c)| c).min()
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, MatrixError> {
        if self.ring != rhs.ring {
            return Err(MatrixError::RingMismatch(self.ring, rhs.ring));
        }
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch {
                lr: self.rows,
                lc: self.cols,
                rr: rhs.rows,
                rc: rhs.cols,
            });
        }
        // Group lhs entries by column so each rhs entry is scanned once.
        let mut by_col: BTreeMap<usize, Vec<(usize, &Coeff)>> = BTreeMap::new();
        for (r, c, v) in self.iter() {
            by_col.entry(c).or_default().push((r, v));
        }
        let mut out = ExactMatrix::zero(self.ring, self.rows, rhs.cols);
        for (k, c, v) in rhs.iter() {
            if let Some(lefts) = by_col.get(&k) {
                for (r, lv) in lefts {
                    let slot = out.entries.entry((*r, c)).or_insert_with(Coeff::zero);
                    *slot += *lv * v;
                }
            }
        }
        out.entries.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    pub fn add(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, MatrixError> {
        if self.ring != rhs.ring {
            return Err(MatrixError::RingMismatch(self.ring, rhs.ring));
        }
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(MatrixError::DimensionMismatch {
                lr: self.rows,
                lc: self.cols,
                rr: rhs.rows,
                rc: rhs.cols,
            });
        }
        let mut out = self.clone();
        for (r, c, v) in rhs.iter() {
            out.add_entry(r, c, v.clone()).expect("bounds already checked");
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, MatrixError> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> ExactMatrix {
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            *v = -v.clone();
        }
        out
    }

    pub fn scale(&self, s: &Coeff) -> ExactMatrix {
        if s.is_zero() {
            return ExactMatrix::zero(self.ring, self.rows, self.cols);
        }
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            *v *= s;
        }
        out
    }

    /// Dense copy of column `c`.
    pub fn column(&self, c: usize) -> Vec<Coeff> {
        let mut out = vec![Coeff::zero(); self.rows];
        for (&(r, cc), v) in &self.entries {
            if cc == c {
                out[r] = v.clone();
            }
        }
        out
    }

    /// Matrix whose columns are the listed columns of `self`.
    pub fn select_columns(&self, cols: &[usize]) -> ExactMatrix {
        let mut out = ExactMatrix::zero(self.ring, self.rows, cols.len());
        let pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        for (r, c, v) in self.iter() {
            if let Some(&i) = pos.get(&c) {
                out.entries.insert((r, i), v.clone());
            }
        }
        out
    }

    /// Horizontal concatenation [self | rhs].
    pub fn hstack(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, MatrixError> {
        if self.ring != rhs.ring {
            return Err(MatrixError::RingMismatch(self.ring, rhs.ring));
        }
        if self.rows != rhs.rows {
            return Err(MatrixError::DimensionMismatch {
                lr: self.rows,
                lc: self.cols,
                rr: rhs.rows,
                rc: rhs.cols,
            });
        }
        let mut out = ExactMatrix::zero(self.ring, self.rows, self.cols + rhs.cols);
        for (r, c, v) in self.iter() {
            out.entries.insert((r, c), v.clone());
        }
        for (r, c, v) in rhs.iter() {
            out.entries.insert((r, c + self.cols), v.clone());
        }
        Ok(out)
    }

    pub fn from_columns(ring: Ring, rows: usize, columns: &[Vec<Coeff>]) -> Result<ExactMatrix, MatrixError> {
        let mut out = ExactMatrix::zero(ring, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {c} has wrong length");
            for (r, v) in col.iter().enumerate() {
                out.add_entry(r, c, v.clone())?;
            }
        }
        Ok(out)
    }

    /// Applies the matrix to a dense vector.
    pub fn apply(&self, x: &[Coeff]) -> Result<Vec<Coeff>, MatrixError> {
        if x.len() != self.cols {
            return Err(MatrixError::DimensionMismatch { lr: self.rows, lc: self.cols, rr: x.len(), rc: 1 });
        }
        let mut out = vec![Coeff::zero(); self.rows];
        for (r, c, v) in self.iter() {
            if !x[c].is_zero() {
                out[r] += v * &x[c];
            }
        }
        Ok(out)
    }

    /// Reinterprets the matrix over another ring. Widening Z -> Q always
    /// succeeds; narrowing Q -> Z fails on any non-integer entry.
    pub fn to_ring(&self, ring: Ring) -> Result<ExactMatrix, MatrixError> {
        if ring == self.ring {
            return Ok(self.clone());
        }
        if ring == Ring::Z {
            for (r, c, v) in self.iter() {
                if !v.is_integer() {
                    return Err(MatrixError::EntryNotInRing {
                        row: r,
                        col: c,
                        value: crate::ring::format_coeff(v),
                        ring,
                    });
                }
            }
        }
        let mut out = self.clone();
        out.ring = ring;
        Ok(out)
    }

    /// Dense integer grid; requires every entry to be integral.
    pub fn to_dense_int(&self) -> Result<Vec<Vec<BigInt>>, MatrixError> {
        let mut grid = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (r, c, v) in self.iter() {
            if !v.is_integer() {
                return Err(MatrixError::EntryNotInRing {
                    row: r,
                    col: c,
                    value: crate::ring::format_coeff(v),
                    ring: Ring::Z,
                });
            }
            grid[r][c] = v.to_integer();
        }
        Ok(grid)
    }

    pub fn from_dense_int(ring: Ring, grid: &[Vec<BigInt>]) -> ExactMatrix {
        let rows = grid.len();
        let cols = grid.first().map_or(0, |r| r.len());
        let mut out = ExactMatrix::zero(ring, rows, cols);
        for (r, row) in grid.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    out.entries.insert((r, c), Coeff::from_integer(v.clone()));
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<Coeff>> {
        let mut grid = vec![vec![Coeff::zero(); self.cols]; self.rows];
        for (r, c, v) in self.iter() {
            grid[r][c] = v.clone();
        }
        grid
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {}", self.rows, self.cols, self.ring)?;
        for r in 0..self.rows {
            let row: Vec<String> =
                (0..self.cols).map(|c| crate::ring::format_coeff(&self.get(r, c))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::coeff_from_i64 as ci;

    #[test]
    fn sparse_entries_cancel() {
        let mut m = ExactMatrix::zero(Ring::Z, 2, 2);
        m.add_entry(0, 1, ci(3)).unwrap();
        m.add_entry(0, 1, ci(-3)).unwrap();
        assert!(m.is_zero());
    }

    #[test]
    fn rejects_fractions_over_z() {
        let mut m = ExactMatrix::zero(Ring::Z, 1, 1);
        let err = m.add_entry(0, 0, crate::ring::coeff_from_pair(1, 2)).unwrap_err();
        assert!(matches!(err, MatrixError::EntryNotInRing { .. }));
    }

    #[test]
    fn multiply_matches_dense() {
        let a = ExactMatrix::from_triplets(
            Ring::Z,
            2,
            3,
            [(0, 0, ci(1)), (0, 2, ci(-2)), (1, 1, ci(4))],
        )
        .unwrap();
        let b = ExactMatrix::from_triplets(Ring::Z, 3, 2, [(0, 0, ci(2)), (1, 0, ci(1)), (2, 1, ci(3))])
            .unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.get(0, 0), ci(2));
        assert_eq!(p.get(0, 1), ci(-6));
        assert_eq!(p.get(1, 0), ci(4));
        assert_eq!(p.get(1, 1), ci(0));
    }

    #[test]
    fn apply_and_select() {
        let m = ExactMatrix::from_triplets(Ring::Q, 2, 2, [(0, 0, ci(1)), (1, 1, ci(5))]).unwrap();
        assert_eq!(m.apply(&[ci(2), ci(3)]).unwrap(), vec![ci(2), ci(15)]);
        let s = m.select_columns(&[1]);
        assert_eq!(s.cols(), 1);
        assert_eq!(s.get(1, 0), ci(5));
    }
}
