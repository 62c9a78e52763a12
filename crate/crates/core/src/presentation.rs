//! Finitely generated abelian groups presented by free rank plus
//! invariant factors, and the subquotient computations that produce them.

use crate::matrix::ExactMatrix;
use crate::ring::Ring;
use crate::snf::{self, LinalgError};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;

/// A finitely generated abelian group in canonical form: `Z^free_rank`
/// plus one cyclic factor per invariant factor, each factor >= 2 and each
/// dividing the next. Over Q the factor list is always empty and
/// `free_rank` is the dimension.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct AbelianGroupPresentation {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl AbelianGroupPresentation {
    pub fn free(rank: usize) -> Self {
        AbelianGroupPresentation { free_rank: rank, invariant_factors: Vec::new() }
    }

    pub fn zero() -> Self {
        Self::free(0)
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Builds the canonical form from any list of cyclic orders: zeros
    /// contribute free rank, units are dropped, the rest are merged into
    /// a divisibility chain via the prime-power exponent table.
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        use num_integer::Integer;
        let mut free_rank = 0;
        // prime -> sorted exponent multiset (descending)
        let mut table: std::collections::BTreeMap<BigInt, Vec<u32>> = std::collections::BTreeMap::new();
        for o in orders {
            let mut n = o.clone();
            if n < BigInt::zero() {
                n = -n;
            }
            if n.is_zero() {
                free_rank += 1;
                continue;
            }
            if n.is_one() {
                continue;
            }
            let mut p = BigInt::from(2);
            while &p * &p <= n {
                let mut e = 0u32;
                while n.is_multiple_of(&p) {
                    n /= &p;
                    e += 1;
                }
                if e > 0 {
                    table.entry(p.clone()).or_default().push(e);
                }
                p += 1;
            }
            if n > BigInt::one() {
                table.entry(n).or_default().push(1);
            }
        }
        for exps in table.values_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
        }
        let depth = table.values().map(|v| v.len()).max().unwrap_or(0);
        let mut factors = Vec::new();
        for j in 0..depth {
            let mut f = BigInt::one();
            for (p, exps) in &table {
                if let Some(&e) = exps.get(j) {
                    f *= p.pow(e);
                }
            }
            factors.push(f);
        }
        factors.reverse(); // ascending divisibility chain
        AbelianGroupPresentation { free_rank, invariant_factors: factors }
    }
}

impl fmt::Display for AbelianGroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.invariant_factors {
            parts.push(format!("Z/{t}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Presents the subquotient A/B of a free module, where A and B are given
/// by generating sets as matrix columns and B is contained in A.
///
/// Over Z: a lattice basis of A is extracted, the B-generators are
/// expressed in that basis (always integrally, since B is a subgroup of
/// A), and the Smith normal form of the coordinate matrix yields the
/// presentation. Over Q the answer is the rank difference.
pub fn subquotient(num: &ExactMatrix, den: &ExactMatrix) -> Result<AbelianGroupPresentation, LinalgError> {
    if num.rows() != den.rows() {
        return Err(LinalgError::Matrix(crate::matrix::MatrixError::DimensionMismatch {
            lr: num.rows(),
            lc: num.cols(),
            rr: den.rows(),
            rc: den.cols(),
        }));
    }
    match num.ring() {
        Ring::Q => {
            let rn = snf::rank(num);
            let rd = snf::rank(den);
            debug_assert!(rd <= rn);
            Ok(AbelianGroupPresentation::free(rn - rd))
        }
        Ring::Z => {
            let basis = snf::image_basis(num)?;
            if basis.cols() == 0 {
                return match den.is_zero() {
                    true => Ok(AbelianGroupPresentation::zero()),
                    false => Err(LinalgError::NotInSubgroup {
                        col: den.first_nonzero().map(|(_, c, _)| c).unwrap_or(0),
                    }),
                };
            }
            let coords = snf::solve_matrix(&basis, den)?.ok_or_else(|| {
                // Identify a failing column for the witness.
                let col = (0..den.cols())
                    .find(|&c| {
                        snf::solve_matrix(&basis, &den.select_columns(&[c]))
                            .map(|r| r.is_none())
                            .unwrap_or(true)
                    })
                    .unwrap_or(0);
                LinalgError::NotInSubgroup { col }
            })?;
            let s = snf::smith_normal_form(&coords)?;
            let torsion: Vec<BigInt> =
                s.invariant_factors().into_iter().filter(|f| !f.is_one()).collect();
            Ok(AbelianGroupPresentation {
                free_rank: basis.cols() - s.rank,
                invariant_factors: torsion,
            })
        }
    }
}

/// Homology of the two-matrix segment `ker(d_out) / im(d_in)`.
///
/// `d_in` maps into the component on which `d_out` is defined, so
/// `d_out.cols() == d_in.rows()` and `d_out * d_in = 0` must hold; a
/// nonzero composite is reported with its witness entry.
pub fn homology_segment(
    d_in: &ExactMatrix,
    d_out: &ExactMatrix,
) -> Result<AbelianGroupPresentation, LinalgError> {
    if d_out.cols() != d_in.rows() {
        return Err(LinalgError::SegmentShape { dout_cols: d_out.cols(), din_rows: d_in.rows() });
    }
    let comp = d_out.mul(d_in)?;
    if let Some((row, col, _)) = comp.first_nonzero() {
        return Err(LinalgError::CompositionNonzero { row, col });
    }
    let kernel = snf::kernel_basis(d_out)?;
    subquotient(&kernel, d_in)
}
