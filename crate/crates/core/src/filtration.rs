//! Spectral sequence of a filtered S1-complex.
//!
//! Filtration levels are non-negative integers on generators with every
//! operation entry level-nonincreasing, so F^0 c F^1 c ... is a finite
//! exhaustive filtration by subcomplexes of each windowed total complex.
//! The pages are computed by exact subquotients inside each total-degree
//! slice:
//!
//!   Z_r^{p,n} = { x in F^p C^n : dx in F^{p-r} C^{n+1} }
//!   E_r^{p,n} = Z_r^{p,n} / ( Z_{r-1}^{p-1,n} + d Z_{r-1}^{p+r-1,n-1} )
//!
//! with the convention Z_{-1}^{p,n} = F^p C^n. The engine's convention is
//! cohomological with total degree n = p + q; the induced differential on
//! page r shifts (p, q) by (-r, r + 1) and is reported with each page.

use crate::laurent::{assemble_differential, window_basis, LaurentWindow, WindowError};
use crate::matrix::ExactMatrix;
use crate::presentation::{subquotient, AbelianGroupPresentation};
use crate::ring::Ring;
use crate::s1::{ComplexError, S1Complex, VerifyOutcome};
use crate::snf::{self, LinalgError};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FiltrationError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error("levels list has length {got}, expected one level per generator ({expected})")]
    LevelCount { got: usize, expected: usize },
    #[error("entry {from:?} (level {from_level}) -> {to:?} (level {to_level}) raises the filtration level")]
    LevelRaised { from: String, from_level: usize, to: String, to_level: usize },
}

/// An S1-complex with a filtration level per generator; construction
/// checks that every operation entry is level-nonincreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredS1Complex {
    complex: S1Complex,
    levels: Vec<usize>,
}

impl FilteredS1Complex {
    pub fn new(complex: S1Complex, levels: Vec<usize>) -> Result<Self, FiltrationError> {
        if levels.len() != complex.rank() {
            return Err(FiltrationError::LevelCount { got: levels.len(), expected: complex.rank() });
        }
        for m in complex.operations() {
            for (r, c, _) in m.iter() {
                if levels[r] > levels[c] {
                    return Err(FiltrationError::LevelRaised {
                        from: complex.module().generator(c).id.clone(),
                        from_level: levels[c],
                        to: complex.module().generator(r).id.clone(),
                        to_level: levels[r],
                    });
                }
            }
        }
        Ok(FilteredS1Complex { complex, levels })
    }

    pub fn complex(&self) -> &S1Complex {
        &self.complex
    }

    pub fn level(&self, generator: usize) -> usize {
        self.levels[generator]
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn max_level(&self) -> usize {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    pub fn to_ring(&self, ring: Ring) -> Result<FilteredS1Complex, FiltrationError> {
        Ok(FilteredS1Complex { complex: self.complex.to_ring(ring)?, levels: self.levels.clone() })
    }

    /// The level-p subquotient complex F^p/F^{p-1}: generators at level p
    /// with the level-preserving parts of every operation.
    pub fn associated_graded(&self, p: usize) -> Result<S1Complex, FiltrationError> {
        let keep: Vec<usize> =
            (0..self.complex.rank()).filter(|&i| self.levels[i] == p).collect();
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let gens = keep.iter().map(|&g| self.complex.module().generator(g).clone()).collect();
        let module = crate::graded::GradedModule::new(self.complex.ring(), gens)
            .map_err(ComplexError::from)?;
        let mut ops = Vec::new();
        for m in self.complex.operations() {
            let mut op = ExactMatrix::zero(self.complex.ring(), keep.len(), keep.len());
            for (r, c, v) in m.iter() {
                if let (Some(&rr), Some(&cc)) = (pos.get(&r), pos.get(&c)) {
                    op.add_entry(rr, cc, v.clone()).map_err(ComplexError::from)?;
                }
            }
            ops.push(op);
        }
        Ok(S1Complex::new(module, ops)?)
    }
}

/// One spot of a spectral page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageEntry {
    pub p: usize,
    pub q: i64,
    pub group: AbelianGroupPresentation,
}

/// The induced d_r out of one spot, as a matrix from the source spot's
/// cycle basis to the target spot's (classes are these columns modulo the
/// target denominator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageDifferential {
    pub from: (usize, i64),
    pub to: (usize, i64),
    pub matrix: ExactMatrix,
}

/// A computed page: entries over the requested window, the induced
/// differential matrices, and the spots where d_r is nonzero on classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralPage {
    pub r: usize,
    /// (dp, dq) shift of d_r in the (p, q) indexing.
    pub differential_shift: (i64, i64),
    pub entries: Vec<PageEntry>,
    pub differentials: Vec<PageDifferential>,
    pub nonzero_differentials: Vec<((usize, i64), (usize, i64))>,
}

/// (cycle basis, boundary generators, presentation) of one page spot.
type SpotData = (ExactMatrix, ExactMatrix, AbelianGroupPresentation);

/// Windowed total complex with levels attached to each slice basis.
struct TotalFiltered<'a> {
    fc: &'a FilteredS1Complex,
    /// degree -> matrix of delta^{S1} out of that slice
    diff: BTreeMap<i64, ExactMatrix>,
    /// degree -> level per basis element
    level: BTreeMap<i64, Vec<usize>>,
}

impl<'a> TotalFiltered<'a> {
    fn new(fc: &'a FilteredS1Complex, window: LaurentWindow, lo: i64, hi: i64) -> Self {
        let mut diff = BTreeMap::new();
        let mut level = BTreeMap::new();
        // One degree of margin on each side: boundaries of degree n come
        // from n-1 and their cycles condition lives in n+1.
        for n in (lo - 2)..=(hi + 2) {
            diff.insert(n, assemble_differential(fc.complex(), window, n));
            let lv: Vec<usize> =
                window_basis(fc.complex(), window, n).iter().map(|&(_, g)| fc.level(g)).collect();
            level.insert(n, lv);
        }
        TotalFiltered { fc, diff, level }
    }

    fn dim(&self, n: i64) -> usize {
        self.level.get(&n).map_or(0, |v| v.len())
    }

    fn ring(&self) -> Ring {
        self.fc.complex().ring()
    }

    fn differential(&self, n: i64) -> ExactMatrix {
        self.diff
            .get(&n)
            .cloned()
            .unwrap_or_else(|| ExactMatrix::zero(self.ring(), self.dim(n + 1), self.dim(n)))
    }

    /// Columns spanning Z_r^{p,n}; r = -1 encodes F^p C^n itself.
    /// The span is saturated: it is the kernel of a map between free
    /// modules (restrict to F^p, compose with the projection killing
    /// F^{p-r} of the next slice).
    fn z_basis(&self, r: i64, p: i64, n: i64) -> Result<ExactMatrix, LinalgError> {
        let levels = match self.level.get(&n) {
            Some(l) => l.clone(),
            None => return Ok(ExactMatrix::zero(self.ring(), self.dim(n), 0)),
        };
        let dim = levels.len();
        if p < 0 {
            return Ok(ExactMatrix::zero(self.ring(), dim, 0));
        }
        let in_fp: Vec<usize> =
            (0..dim).filter(|&i| (levels[i] as i64) <= p).collect();
        if r < 0 {
            // F^p itself: coordinate subspace.
            let mut m = ExactMatrix::zero(self.ring(), dim, in_fp.len());
            for (j, &i) in in_fp.iter().enumerate() {
                m.add_entry(i, j, crate::ring::coeff_from_i64(1))?;
            }
            return Ok(m);
        }
        let d = self.differential(n);
        let next_levels = self.level.get(&(n + 1)).cloned().unwrap_or_default();
        let bad_rows: Vec<usize> = (0..next_levels.len())
            .filter(|&i| (next_levels[i] as i64) > p - r)
            .collect();
        // Kernel of (bad rows of d) restricted to the F^p columns.
        let restricted = d.select_columns(&in_fp);
        let mut sub = ExactMatrix::zero(self.ring(), bad_rows.len(), in_fp.len());
        for (new_r, &row) in bad_rows.iter().enumerate() {
            for (rr, cc, v) in restricted.iter() {
                if rr == row {
                    sub.add_entry(new_r, cc, v.clone())?;
                }
            }
        }
        let ker = snf::kernel_basis(&sub)?;
        // Embed back into the full slice.
        let mut out = ExactMatrix::zero(self.ring(), dim, ker.cols());
        for (kr, kc, v) in ker.iter() {
            out.add_entry(in_fp[kr], kc, v.clone())?;
        }
        Ok(out)
    }

    /// Generating set of the page-r denominator at (p, n):
    /// Z_{r-1}^{p-1,n} + d Z_{r-1}^{p+r-1,n-1}.
    fn denominator(&self, r: i64, p: i64, n: i64) -> Result<ExactMatrix, LinalgError> {
        let za = self.z_basis(r - 1, p - 1, n)?;
        let zb = self.z_basis(r - 1, p + r - 1, n - 1)?;
        let dzb = self.differential(n - 1).mul(&zb)?;
        Ok(za.hstack(&dzb)?)
    }

    fn entry(&self, r: i64, p: i64, n: i64) -> Result<SpotData, LinalgError> {
        let num = self.z_basis(r, p, n)?;
        let den = self.denominator(r, p, n)?;
        let pres = subquotient(&num, &den)?;
        Ok((num, den, pres))
    }

    /// Whether the induced d_r out of (p, n) is nonzero on page r.
    fn dr_is_nonzero(&self, r: i64, p: i64, n: i64) -> Result<bool, LinalgError> {
        let num = self.z_basis(r, p, n)?;
        if num.cols() == 0 {
            return Ok(false);
        }
        let dnum = self.differential(n).mul(&num)?;
        if dnum.is_zero() {
            return Ok(false);
        }
        // d_r vanishes iff every image column lies in the target
        // denominator subgroup.
        let den_target = self.denominator(r, p - r, n + 1)?;
        if den_target.cols() == 0 {
            return Ok(true);
        }
        Ok(snf::solve_matrix(&den_target, &dnum)?.is_none())
    }

    /// Matrix of d_r out of (p, n) in numerator-basis coordinates: each
    /// source cycle maps into Z_r of the target spot, whose basis is
    /// saturated, so the coordinates always exist.
    fn induced_matrix(&self, r: i64, p: i64, n: i64) -> Result<Option<ExactMatrix>, LinalgError> {
        let num = self.z_basis(r, p, n)?;
        if num.cols() == 0 {
            return Ok(None);
        }
        let dnum = self.differential(n).mul(&num)?;
        let target = self.z_basis(r, p - r, n + 1)?;
        if target.cols() == 0 {
            return Ok(None);
        }
        let coords = snf::solve_matrix(&target, &dnum)?
            .expect("image of a relative cycle is a relative cycle");
        Ok(Some(coords))
    }

    /// Membership of every column in the denominator subgroup at (p, n),
    /// with the columns given in the numerator-basis coordinates of that
    /// spot.
    fn columns_are_boundaries(&self, r: i64, p: i64, n: i64, cols: &ExactMatrix) -> Result<bool, LinalgError> {
        if cols.is_zero() {
            return Ok(true);
        }
        let num = self.z_basis(r, p, n)?;
        let ambient = num.mul(cols)?;
        let den = self.denominator(r, p, n)?;
        if den.cols() == 0 {
            return Ok(ambient.is_zero());
        }
        Ok(snf::solve_matrix(&den, &ambient)?.is_some())
    }
}

fn verified<'a>(
    fc: &'a FilteredS1Complex,
    window: LaurentWindow,
    lo: i64,
    hi: i64,
) -> Result<TotalFiltered<'a>, FiltrationError> {
    if let VerifyOutcome::Fail { k, generator } = fc.complex().verify_structure()? {
        return Err(FiltrationError::Window(WindowError::InvalidComplex { k, generator }));
    }
    Ok(TotalFiltered::new(fc, window, lo, hi))
}

/// Computes page r of the spectral sequence over the degree window
/// [lo, hi]; entries are reported per (p, q) with p + q = n in window.
pub fn compute_page(
    fc: &FilteredS1Complex,
    window: LaurentWindow,
    lo: i64,
    hi: i64,
    r: usize,
) -> Result<SpectralPage, FiltrationError> {
    let total = verified(fc, window, lo, hi)?;
    let max_p = fc.max_level() as i64;
    let mut entries = Vec::new();
    let mut differentials = Vec::new();
    let mut nonzero = Vec::new();
    for n in lo..=hi {
        for p in 0..=max_p {
            let (_, _, pres) = total.entry(r as i64, p, n)?;
            if !pres.is_zero() {
                entries.push(PageEntry { p: p as usize, q: n - p, group: pres });
            }
            if r >= 1 {
                let from = (p as usize, n - p);
                let to = ((p - r as i64).max(0) as usize, n + 1 - (p - r as i64));
                if let Some(matrix) = total.induced_matrix(r as i64, p, n)? {
                    if !matrix.is_zero() {
                        differentials.push(PageDifferential { from, to, matrix });
                    }
                }
                if total.dr_is_nonzero(r as i64, p, n)? {
                    nonzero.push((from, to));
                }
            }
        }
    }
    Ok(SpectralPage {
        r,
        differential_shift: (-(r as i64), r as i64 + 1),
        entries,
        differentials,
        nonzero_differentials: nonzero,
    })
}

/// Entrywise d_r . d_r = 0: for every spot, the composite of the induced
/// matrices lands in the denominator of the doubly-shifted target spot.
pub fn page_differential_squares_to_zero(
    fc: &FilteredS1Complex,
    window: LaurentWindow,
    lo: i64,
    hi: i64,
    r: usize,
) -> Result<bool, FiltrationError> {
    let total = verified(fc, window, lo, hi)?;
    let r = r as i64;
    let max_p = fc.max_level() as i64;
    for n in lo..=hi {
        for p in 0..=max_p {
            let Some(first) = total.induced_matrix(r, p, n)? else { continue };
            let Some(second) = total.induced_matrix(r, p - r, n + 1)? else { continue };
            let composite = second.mul(&first).map_err(LinalgError::from)?;
            if !total.columns_are_boundaries(r, p - 2 * r, n + 2, &composite)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Degeneration certificate: asserts d_r = 0 for 1 <= r <= r_max over the
/// window and compares total E_1 free ranks per degree against the
/// homology of the unfiltered complex. A mismatch is reported, not
/// silently accepted; for bounded complexes it signals a bug.
/// A nonzero differential found by the certificate sweep: page index,
/// source spot and target spot.
pub type NonzeroDifferential = (usize, (usize, i64), (usize, i64));

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerationReport {
    pub degenerate: bool,
    pub nonzero_differentials: Vec<NonzeroDifferential>,
    /// degree -> (sum of E_1 free ranks over p, free rank of H^n(total)).
    pub rank_comparison: BTreeMap<i64, (usize, usize)>,
    pub ranks_match: bool,
}

pub fn degeneration_certificate(
    fc: &FilteredS1Complex,
    window: LaurentWindow,
    lo: i64,
    hi: i64,
    r_max: usize,
) -> Result<DegenerationReport, FiltrationError> {
    let total = verified(fc, window, lo, hi)?;
    let max_p = fc.max_level() as i64;
    let mut nonzero = Vec::new();
    for r in 1..=r_max.max(1) as i64 {
        for n in lo..=hi {
            for p in 0..=max_p {
                if total.dr_is_nonzero(r, p, n)? {
                    nonzero.push((
                        r as usize,
                        (p as usize, n - p),
                        ((p - r) as usize, n + 1 - (p - r)),
                    ));
                }
            }
        }
    }
    let degenerate = nonzero.is_empty();

    let homology = crate::laurent::cyclic_homology(fc.complex(), window, lo, hi)?;
    let mut rank_comparison = BTreeMap::new();
    let mut ranks_match = true;
    for n in lo..=hi {
        let mut e1_total = 0;
        for p in 0..=max_p {
            let (_, _, pres) = total.entry(1, p, n)?;
            e1_total += pres.free_rank;
        }
        let h = homology[&n].free_rank;
        if e1_total != h {
            ranks_match = false;
        }
        rank_comparison.insert(n, (e1_total, h));
    }
    Ok(DegenerationReport { degenerate, nonzero_differentials: nonzero, rank_comparison, ranks_match })
}

/// E_{r+1} must be the homology of (E_r, d_r); checked on free ranks,
/// which are exact integers. Exposed for the property suite.
pub fn page_turn_consistent(
    fc: &FilteredS1Complex,
    window: LaurentWindow,
    lo: i64,
    hi: i64,
    r: usize,
) -> Result<bool, FiltrationError> {
    let total = verified(fc, window, lo, hi)?;
    let q = fc.to_ring(Ring::Q)?;
    let total_q = TotalFiltered::new(&q, window, lo, hi);
    let r = r as i64;
    let max_p = fc.max_level() as i64;
    for n in lo..=hi {
        for p in 0..=max_p {
            // Over Q: rank E_{r+1} = rank Z_{r+1}/den_{r+1}; homology of
            // (E_r, d_r) has rank  rank(ker d_r) - rank(im d_r into).
            let (_, _, next) = total_q.entry(r + 1, p, n)?;
            let rank_in = induced_rank(&total_q, r, p + r, n - 1)?;
            let rank_out = induced_rank(&total_q, r, p, n)?;
            let (num, den, _) = total_q.entry(r, p, n)?;
            let e_r_rank = snf::rank(&num) - snf::rank(&den);
            let expected = e_r_rank - rank_in - rank_out;
            if next.free_rank != expected {
                return Ok(false);
            }
            let _ = total.dim(n);
        }
    }
    Ok(true)
}

/// Rank over Q of the induced d_r out of spot (p, n) on page r.
fn induced_rank(total: &TotalFiltered<'_>, r: i64, p: i64, n: i64) -> Result<usize, LinalgError> {
    let num = total.z_basis(r, p, n)?;
    if num.cols() == 0 {
        return Ok(0);
    }
    let dnum = total.differential(n).mul(&num)?;
    let den_target = total.denominator(r, p - r, n + 1)?;
    // rank of the image modulo the target denominator
    let stacked = den_target.hstack(&dnum)?;
    Ok(snf::rank(&stacked) - snf::rank(&den_target))
}
