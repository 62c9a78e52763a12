//! Laurent windows in the degree-2 variable u and the homology theories
//! they carve out of an S1-complex.
//!
//! The equivariant differential delta^{S1} = delta_0 + u delta_1 + ... acts
//! on C[[u]] and its localization/quotient. A window selects which
//! u-powers survive: all i >= 0 (power series), all i (Laurent), i <= 0
//! (the quotient by u C[[u]]), or a finite band n <= i < m. Boundedness of
//! the underlying module makes every total-degree slice finite rank, so
//! homology is computed exactly per degree.

use crate::matrix::ExactMatrix;
use crate::presentation::{homology_segment, AbelianGroupPresentation};
use crate::s1::{ComplexError, S1Complex, S1Map, VerifyOutcome};
use crate::snf::LinalgError;
use std::collections::BTreeMap;
use thiserror::Error;

/// Cohomological degree of the formal variable u.
pub const U_DEGREE: i64 = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WindowError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("truncation window requires m >= n, got m={m}, n={n}")]
    InvalidTruncation { m: i64, n: i64 },
    #[error("complex fails its structure relation at k={k} on generator {generator:?}")]
    InvalidComplex { k: usize, generator: String },
    #[error("degree window [{lo}, {hi}] is empty")]
    EmptyDegreeWindow { lo: i64, hi: i64 },
}

/// Which u-powers a basis element may carry.
///
/// `Negative` is the power-series window (negative cyclic homology),
/// `Periodic` the full Laurent window, `Quotient` the representatives of
/// C^/u C[[u]] (ordinary cyclic homology), and `Truncation { m, n }` the
/// finite band n <= i < m used for truncated comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaurentWindow {
    Negative,
    Periodic,
    Quotient,
    Truncation { m: i64, n: i64 },
}

impl LaurentWindow {
    pub fn truncation(m: i64, n: i64) -> Result<Self, WindowError> {
        if m < n {
            return Err(WindowError::InvalidTruncation { m, n });
        }
        Ok(LaurentWindow::Truncation { m, n })
    }

    /// Whether u^i survives in this window.
    pub fn admits(&self, i: i64) -> bool {
        match self {
            LaurentWindow::Negative => i >= 0,
            LaurentWindow::Periodic => true,
            LaurentWindow::Quotient => i <= 0,
            LaurentWindow::Truncation { m, n } => *n <= i && i < *m,
        }
    }
}

impl std::fmt::Display for LaurentWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LaurentWindow::Negative => write!(f, "negative"),
            LaurentWindow::Periodic => write!(f, "periodic"),
            LaurentWindow::Quotient => write!(f, "quotient"),
            LaurentWindow::Truncation { m, n } => write!(f, "truncation({m},{n})"),
        }
    }
}

/// Homology groups per total degree.
pub type DegreeGroups = BTreeMap<i64, AbelianGroupPresentation>;

/// Ordered basis of the total-degree-n slice: pairs (i, generator index)
/// with deg(g) = n - 2i and u^i admitted, sorted by (i, index).
pub fn window_basis(c: &S1Complex, w: LaurentWindow, n: i64) -> Vec<(i64, usize)> {
    let mut basis = Vec::new();
    for (idx, g) in c.module().generators().iter().enumerate() {
        let diff = n - g.degree;
        if diff % U_DEGREE != 0 {
            continue;
        }
        let i = diff / U_DEGREE;
        if w.admits(i) {
            basis.push((i, idx));
        }
    }
    basis.sort();
    basis
}

/// Matrix of delta^{S1} from the total-degree-n slice to the (n+1) slice.
///
/// Basis vectors are u^i * g; the operation delta_j sends one to
/// u^{i+j} * delta_j(g), and terms whose u-power leaves the window are
/// dropped (the window is a subquotient complex, so this is exact).
pub fn assemble_differential(c: &S1Complex, w: LaurentWindow, n: i64) -> ExactMatrix {
    let domain = window_basis(c, w, n);
    let codomain = window_basis(c, w, n + 1);
    let row_of: BTreeMap<(i64, usize), usize> =
        codomain.iter().enumerate().map(|(r, &k)| (k, r)).collect();
    let mut m = ExactMatrix::zero(c.ring(), codomain.len(), domain.len());
    for (col, &(i, g)) in domain.iter().enumerate() {
        for (j, op) in c.operations().iter().enumerate() {
            for (r, cc, v) in op.iter() {
                if cc != g {
                    continue;
                }
                let power = i + j as i64;
                if let Some(&row) = row_of.get(&(power, r)) {
                    m.add_entry(row, col, v.clone()).expect("assembled entry in bounds");
                }
            }
        }
    }
    m
}

/// Matrix of an S1-map on the total-degree-n slice (same n on both sides;
/// kappa_j carries u^i g to u^{i+j} kappa_j(g)).
pub fn assemble_map(f: &S1Map, w: LaurentWindow, n: i64) -> ExactMatrix {
    let domain = window_basis(f.source(), w, n);
    let codomain = window_basis(f.target(), w, n);
    let row_of: BTreeMap<(i64, usize), usize> =
        codomain.iter().enumerate().map(|(r, &k)| (k, r)).collect();
    let mut m = ExactMatrix::zero(f.source().ring(), codomain.len(), domain.len());
    for (col, &(i, g)) in domain.iter().enumerate() {
        for (j, comp) in f.components().iter().enumerate() {
            for (r, cc, v) in comp.iter() {
                if cc != g {
                    continue;
                }
                let power = i + j as i64;
                if let Some(&row) = row_of.get(&(power, r)) {
                    m.add_entry(row, col, v.clone()).expect("assembled entry in bounds");
                }
            }
        }
    }
    m
}

/// Cyclic homology of the windowed complex, one presentation per total
/// degree in `[lo, hi]`. The structure relation is re-verified first; a
/// failing complex is rejected with its witness.
pub fn cyclic_homology(
    c: &S1Complex,
    w: LaurentWindow,
    lo: i64,
    hi: i64,
) -> Result<DegreeGroups, WindowError> {
    if lo > hi {
        return Err(WindowError::EmptyDegreeWindow { lo, hi });
    }
    if let VerifyOutcome::Fail { k, generator } = c.verify_structure()? {
        return Err(WindowError::InvalidComplex { k, generator });
    }
    let mut out = BTreeMap::new();
    for n in lo..=hi {
        let d_in = assemble_differential(c, w, n - 1);
        let d_out = assemble_differential(c, w, n);
        out.insert(n, homology_segment(&d_in, &d_out)?);
    }
    Ok(out)
}

/// Handle on the finite-band subquotient u^n C[[u]] / u^m C[[u]].
#[derive(Debug, Clone)]
pub struct TruncatedComplex {
    complex: S1Complex,
    m: i64,
    n: i64,
}

impl TruncatedComplex {
    pub fn window(&self) -> LaurentWindow {
        LaurentWindow::Truncation { m: self.m, n: self.n }
    }

    /// An empty band (m = n) is the zero complex: legal, and reported
    /// through this flag rather than as an error.
    pub fn is_empty(&self) -> bool {
        self.m == self.n
    }

    pub fn homology(&self, lo: i64, hi: i64) -> Result<DegreeGroups, WindowError> {
        cyclic_homology(&self.complex, self.window(), lo, hi)
    }

    pub fn bounds(&self) -> (i64, i64) {
        (self.m, self.n)
    }
}

/// Builds the truncation handle; `m >= n` is required, `m == n` yields
/// the (reported) zero complex.
pub fn truncated_complex(c: &S1Complex, m: i64, n: i64) -> Result<TruncatedComplex, WindowError> {
    if m < n {
        return Err(WindowError::InvalidTruncation { m, n });
    }
    Ok(TruncatedComplex { complex: c.clone(), m, n })
}

/// Stabilization detector for growing truncation bands: returns the
/// smallest m in (n, m_max] at which the homology of u^n C / u^m C stops
/// changing across two consecutive values of m, together with the stable
/// presentations. Bounded complexes always stabilize once m clears the
/// degree range.
pub fn truncation_stabilization(
    c: &S1Complex,
    n: i64,
    lo: i64,
    hi: i64,
    m_max: i64,
) -> Result<Option<(i64, DegreeGroups)>, WindowError> {
    let mut prev: Option<(i64, DegreeGroups)> = None;
    for m in (n + 1)..=m_max {
        let h = truncated_complex(c, m, n)?.homology(lo, hi)?;
        if let Some((pm, ph)) = &prev {
            if *ph == h {
                return Ok(Some((*pm, h)));
            }
        }
        prev = Some((m, h));
    }
    Ok(None)
}
