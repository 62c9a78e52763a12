//! S1-complexes: cochain complexes with a tower of operations
//! delta_0, delta_1, ..., delta_D where delta_i shifts degree by 1 - 2i
//! and sum_{i+j=k} delta_i delta_j = 0 for every k. Maps and homotopies
//! between them carry the analogous towers kappa_i (degree -2i) and
//! h_i (degree -2i - 1).

use crate::graded::{GradedError, GradedModule, Generator};
use crate::matrix::{ExactMatrix, MatrixError};
use crate::ring::Coeff;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("operation {op} entry {from:?} -> {to:?} violates the degree shift {expected} (got {got})")]
    GradingMismatch { op: usize, from: String, to: String, expected: i64, got: i64 },
    #[error("operation {op} has shape {rows}x{cols}, expected {n}x{n}")]
    OperationShape { op: usize, rows: usize, cols: usize, n: usize },
    #[error("map component {op} has shape {rows}x{cols}, expected {target_rank}x{source_rank}")]
    ComponentShape { op: usize, rows: usize, cols: usize, target_rank: usize, source_rank: usize },
    #[error("structure relation fails at k={k} on generator {generator:?}")]
    RelationFailure { k: usize, generator: String },
    #[error("homotopy endpoints do not share source/target complexes")]
    MismatchedEndpoints,
}

/// Outcome of a relation check: pass, or the first failing (k, generator)
/// pair as a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyOutcome {
    Pass,
    Fail { k: usize, generator: String },
}

impl VerifyOutcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, VerifyOutcome::Pass)
    }
}

/// A bounded S1-complex: a graded module together with the operation
/// tower. `operations[i]` is the matrix of delta_i on the full generator
/// set (one column per generator, one row per generator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct S1Complex {
    module: GradedModule,
    operations: Vec<ExactMatrix>,
}

impl S1Complex {
    /// Wraps the data after checking shapes and the grading of every
    /// entry. The quadratic relation itself is checked by
    /// [`S1Complex::verify_structure`].
    pub fn new(module: GradedModule, operations: Vec<ExactMatrix>) -> Result<Self, ComplexError> {
        let n = module.rank();
        for (i, op) in operations.iter().enumerate() {
            if op.rows() != n || op.cols() != n {
                return Err(ComplexError::OperationShape { op: i, rows: op.rows(), cols: op.cols(), n });
            }
            let shift = 1 - 2 * i as i64;
            for (r, c, _) in op.iter() {
                let got = module.degree(r) - module.degree(c);
                if got != shift {
                    return Err(ComplexError::GradingMismatch {
                        op: i,
                        from: module.generator(c).id.clone(),
                        to: module.generator(r).id.clone(),
                        expected: shift,
                        got,
                    });
                }
            }
        }
        Ok(S1Complex { module, operations })
    }

    pub fn zero(ring: crate::ring::Ring) -> Self {
        S1Complex { module: GradedModule::empty(ring), operations: Vec::new() }
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn ring(&self) -> crate::ring::Ring {
        self.module.ring()
    }

    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    /// Highest operation index D carried by the data (operations beyond
    /// it are identically zero).
    pub fn top_operation(&self) -> usize {
        self.operations.len().saturating_sub(1)
    }

    /// delta_i, a zero matrix when i exceeds the stored tower.
    pub fn operation(&self, i: usize) -> ExactMatrix {
        self.operations
            .get(i)
            .cloned()
            .unwrap_or_else(|| ExactMatrix::zero(self.ring(), self.rank(), self.rank()))
    }

    pub fn operations(&self) -> &[ExactMatrix] {
        &self.operations
    }

    /// Checks sum_{i+j=k} delta_i delta_j = 0 for every k up to 2D.
    /// Returns the first failing (k, generator) witness, if any.
    pub fn verify_structure(&self) -> Result<VerifyOutcome, ComplexError> {
        let d = self.operations.len();
        if d == 0 {
            return Ok(VerifyOutcome::Pass);
        }
        for k in 0..=(2 * (d - 1)) {
            let mut sum = ExactMatrix::zero(self.ring(), self.rank(), self.rank());
            for i in 0..=k {
                let j = k - i;
                if i >= d || j >= d {
                    continue;
                }
                sum = sum.add(&self.operations[i].mul(&self.operations[j])?)?;
            }
            if let Some(col) = sum.first_nonzero_column() {
                return Ok(VerifyOutcome::Fail { k, generator: self.module.generator(col).id.clone() });
            }
        }
        Ok(VerifyOutcome::Pass)
    }

    pub fn to_ring(&self, ring: crate::ring::Ring) -> Result<S1Complex, ComplexError> {
        let ops = self
            .operations
            .iter()
            .map(|op| op.to_ring(ring))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(S1Complex { module: self.module.with_ring(ring), operations: ops })
    }

    /// Direct sum, with generator ids prefixed to stay unique.
    pub fn direct_sum(&self, other: &S1Complex, left_prefix: &str, right_prefix: &str) -> Result<S1Complex, ComplexError> {
        let ring = self.ring();
        let mut gens = Vec::with_capacity(self.rank() + other.rank());
        for g in self.module.generators() {
            gens.push(Generator { id: format!("{left_prefix}{}", g.id), degree: g.degree, label: g.label.clone() });
        }
        for g in other.module.generators() {
            gens.push(Generator { id: format!("{right_prefix}{}", g.id), degree: g.degree, label: g.label.clone() });
        }
        let module = GradedModule::new(ring, gens)?;
        let n = self.rank();
        let total = module.rank();
        let depth = self.operations.len().max(other.operations.len());
        let mut ops = Vec::with_capacity(depth);
        for i in 0..depth {
            let mut m = ExactMatrix::zero(ring, total, total);
            for (r, c, v) in self.operation(i).iter() {
                m.add_entry(r, c, v.clone())?;
            }
            for (r, c, v) in other.operation(i).iter() {
                m.add_entry(r + n, c + n, v.clone())?;
            }
            ops.push(m);
        }
        S1Complex::new(module, ops)
    }
}

/// An S1-equivariant chain map kappa = (kappa_0, kappa_1, ...) between
/// two S1-complexes; kappa_i drops degree by 2i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct S1Map {
    source: S1Complex,
    target: S1Complex,
    components: Vec<ExactMatrix>,
}

impl S1Map {
    pub fn new(source: S1Complex, target: S1Complex, components: Vec<ExactMatrix>) -> Result<Self, ComplexError> {
        for (i, comp) in components.iter().enumerate() {
            if comp.rows() != target.rank() || comp.cols() != source.rank() {
                return Err(ComplexError::ComponentShape {
                    op: i,
                    rows: comp.rows(),
                    cols: comp.cols(),
                    target_rank: target.rank(),
                    source_rank: source.rank(),
                });
            }
            let shift = -2 * i as i64;
            for (r, c, _) in comp.iter() {
                let got = target.module().degree(r) - source.module().degree(c);
                if got != shift {
                    return Err(ComplexError::GradingMismatch {
                        op: i,
                        from: source.module().generator(c).id.clone(),
                        to: target.module().generator(r).id.clone(),
                        expected: shift,
                        got,
                    });
                }
            }
        }
        Ok(S1Map { source, target, components })
    }

    pub fn identity(c: &S1Complex) -> Self {
        S1Map {
            source: c.clone(),
            target: c.clone(),
            components: vec![ExactMatrix::identity(c.ring(), c.rank())],
        }
    }

    pub fn source(&self) -> &S1Complex {
        &self.source
    }

    pub fn target(&self) -> &S1Complex {
        &self.target
    }

    pub fn component(&self, i: usize) -> ExactMatrix {
        self.components
            .get(i)
            .cloned()
            .unwrap_or_else(|| ExactMatrix::zero(self.source.ring(), self.target.rank(), self.source.rank()))
    }

    pub fn components(&self) -> &[ExactMatrix] {
        &self.components
    }

    pub fn top_component(&self) -> usize {
        self.components.len().saturating_sub(1)
    }

    /// Checks sum_{i+j=k} (kappa_i delta_j - partial_j kappa_i) = 0 for
    /// every k in range.
    pub fn verify(&self) -> Result<VerifyOutcome, ComplexError> {
        let depth = self.components.len()
            + self.source.operations.len().max(self.target.operations.len());
        for k in 0..depth {
            let mut sum = ExactMatrix::zero(self.source.ring(), self.target.rank(), self.source.rank());
            for i in 0..=k {
                let j = k - i;
                let kappa = self.component(i);
                sum = sum.add(&kappa.mul(&self.source.operation(j))?)?;
                sum = sum.sub(&self.target.operation(j).mul(&kappa)?)?;
            }
            if let Some(col) = sum.first_nonzero_column() {
                return Ok(VerifyOutcome::Fail {
                    k,
                    generator: self.source.module().generator(col).id.clone(),
                });
            }
        }
        Ok(VerifyOutcome::Pass)
    }

    /// Composite map: (f . g)_k = sum_{i+j=k} f_i g_j.
    pub fn compose(f: &S1Map, g: &S1Map) -> Result<S1Map, ComplexError> {
        if f.source != g.target {
            return Err(ComplexError::MismatchedEndpoints);
        }
        let depth = (f.components.len() + g.components.len()).saturating_sub(1).max(1);
        let mut comps = Vec::with_capacity(depth);
        for k in 0..depth {
            let mut sum = ExactMatrix::zero(g.source.ring(), f.target.rank(), g.source.rank());
            for i in 0..=k {
                let j = k - i;
                sum = sum.add(&f.component(i).mul(&g.component(j))?)?;
            }
            comps.push(sum);
        }
        S1Map::new(g.source.clone(), f.target.clone(), comps)
    }

    pub fn to_ring(&self, ring: crate::ring::Ring) -> Result<S1Map, ComplexError> {
        let comps = self
            .components
            .iter()
            .map(|c| c.to_ring(ring))
            .collect::<Result<Vec<_>, _>>()?;
        S1Map::new(self.source.to_ring(ring)?, self.target.to_ring(ring)?, comps)
    }
}

/// An S1-equivariant chain homotopy h = (h_0, h_1, ...) between two maps
/// with shared endpoints; h_i drops degree by 2i + 1.
#[derive(Debug, Clone)]
pub struct S1Homotopy {
    from: S1Map,
    to: S1Map,
    components: Vec<ExactMatrix>,
}

impl S1Homotopy {
    pub fn new(from: S1Map, to: S1Map, components: Vec<ExactMatrix>) -> Result<Self, ComplexError> {
        if from.source != to.source || from.target != to.target {
            return Err(ComplexError::MismatchedEndpoints);
        }
        for (i, comp) in components.iter().enumerate() {
            if comp.rows() != from.target.rank() || comp.cols() != from.source.rank() {
                return Err(ComplexError::ComponentShape {
                    op: i,
                    rows: comp.rows(),
                    cols: comp.cols(),
                    target_rank: from.target.rank(),
                    source_rank: from.source.rank(),
                });
            }
            let shift = -2 * i as i64 - 1;
            for (r, c, _) in comp.iter() {
                let got = from.target.module().degree(r) - from.source.module().degree(c);
                if got != shift {
                    return Err(ComplexError::GradingMismatch {
                        op: i,
                        from: from.source.module().generator(c).id.clone(),
                        to: from.target.module().generator(r).id.clone(),
                        expected: shift,
                        got,
                    });
                }
            }
        }
        Ok(S1Homotopy { from, to, components })
    }

    pub fn component(&self, i: usize) -> ExactMatrix {
        self.components.get(i).cloned().unwrap_or_else(|| {
            ExactMatrix::zero(self.from.source.ring(), self.from.target.rank(), self.from.source.rank())
        })
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn endpoints(&self) -> (&S1Map, &S1Map) {
        (&self.from, &self.to)
    }

    /// Checks kappa_k - kappa'_k = sum_{i+j=k} (h_i delta_j + partial_j h_i).
    pub fn verify(&self) -> Result<VerifyOutcome, ComplexError> {
        let src = &self.from.source;
        let tgt = &self.from.target;
        let depth = self
            .components
            .len()
            .max(self.from.components.len())
            .max(self.to.components.len())
            + src.operations.len().max(tgt.operations.len());
        for k in 0..depth {
            let mut sum = self.from.component(k).sub(&self.to.component(k))?;
            for i in 0..=k {
                let j = k - i;
                let h = self.component(i);
                sum = sum.sub(&h.mul(&src.operation(j))?)?;
                sum = sum.sub(&tgt.operation(j).mul(&h)?)?;
            }
            if let Some(col) = sum.first_nonzero_column() {
                return Ok(VerifyOutcome::Fail { k, generator: src.module().generator(col).id.clone() });
            }
        }
        Ok(VerifyOutcome::Pass)
    }
}

/// Mapping cone of an S1-map. The cone of f: C -> D has underlying module
/// C[1] + D and operations (c, d) |-> (-delta_i c, kappa_i c + partial_i d);
/// the sign convention is validated post-hoc by `verify_structure`.
pub fn mapping_cone(f: &S1Map) -> Result<S1Complex, ComplexError> {
    let src = f.source();
    let tgt = f.target();
    let ring = src.ring();
    let mut gens = Vec::with_capacity(src.rank() + tgt.rank());
    for g in src.module().generators() {
        gens.push(Generator { id: format!("cone.src.{}", g.id), degree: g.degree - 1, label: g.label.clone() });
    }
    for g in tgt.module().generators() {
        gens.push(Generator { id: format!("cone.tgt.{}", g.id), degree: g.degree, label: g.label.clone() });
    }
    let module = GradedModule::new(ring, gens)?;
    let n = src.rank();
    let total = module.rank();
    let depth = src
        .operations
        .len()
        .max(tgt.operations.len())
        .max(f.components.len())
        .max(1);
    let mut ops = Vec::with_capacity(depth);
    for i in 0..depth {
        let mut m = ExactMatrix::zero(ring, total, total);
        for (r, c, v) in src.operation(i).iter() {
            m.add_entry(r, c, -v.clone())?;
        }
        for (r, c, v) in f.component(i).iter() {
            m.add_entry(r + n, c, v.clone())?;
        }
        for (r, c, v) in tgt.operation(i).iter() {
            m.add_entry(r + n, c + n, v.clone())?;
        }
        ops.push(m);
    }
    let cone = S1Complex::new(module, ops)?;
    match cone.verify_structure()? {
        VerifyOutcome::Pass => Ok(cone),
        VerifyOutcome::Fail { k, generator } => Err(ComplexError::RelationFailure { k, generator }),
    }
}

/// Convenience builder used across tests and the catalog layer: assembles
/// a complex from (order, from_id, to_id, coeff) entries.
pub fn complex_from_entries(
    ring: crate::ring::Ring,
    generators: Vec<Generator>,
    entries: &[(usize, &str, &str, Coeff)],
) -> Result<S1Complex, ComplexError> {
    let module = GradedModule::new(ring, generators)?;
    let n = module.rank();
    let depth = entries.iter().map(|(i, _, _, _)| i + 1).max().unwrap_or(1);
    let mut ops = vec![ExactMatrix::zero(ring, n, n); depth];
    for (i, from, to, coeff) in entries {
        let c = module.index_of(from)?;
        let r = module.index_of(to)?;
        ops[*i].add_entry(r, c, coeff.clone())?;
    }
    S1Complex::new(module, ops)
}

/// The standard two-generator acyclic complex delta_0(a) = b, summed into
/// larger complexes by tests to adjust homology without changing it.
pub fn acyclic_pair(ring: crate::ring::Ring, degree: i64) -> S1Complex {
    complex_from_entries(
        ring,
        vec![Generator::new("a", degree), Generator::new("b", degree + 1)],
        &[(0, "a", "b", Coeff::one())],
    )
    .expect("static data")
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::ring::{coeff_from_i64 as ci, Ring};

    /// Stage-k model of the unit disk: generators x_0, x_{-1}, ..., x_{-2k}
    /// with delta_0(x_{-2j+1}) = x_{-2j+2} and delta_1(x_{-2j+1}) = j*x_{-2j}.
    pub(crate) fn disk_stage(k: i64) -> S1Complex {
        let mut gens = vec![Generator::new("x0", 0)];
        for d in 1..=2 * k {
            gens.push(Generator::new(format!("x-{d}"), -d));
        }
        let mut entries: Vec<(usize, String, String, Coeff)> = Vec::new();
        for j in 1..=k {
            let odd = format!("x-{}", 2 * j - 1);
            let up = if j == 1 { "x0".to_string() } else { format!("x-{}", 2 * j - 2) };
            entries.push((0, odd.clone(), up, ci(1)));
            entries.push((1, odd, format!("x-{}", 2 * j), ci(j)));
        }
        let refs: Vec<(usize, &str, &str, Coeff)> =
            entries.iter().map(|(i, f, t, c)| (*i, f.as_str(), t.as_str(), c.clone())).collect();
        complex_from_entries(Ring::Z, gens, &refs).unwrap()
    }
}
