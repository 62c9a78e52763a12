//! Finitely generated free graded modules with a bounded degree range.

use crate::ring::Ring;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GradedError {
    #[error("duplicate generator id {0:?}")]
    DuplicateId(String),
    #[error("unknown generator id {0:?}")]
    UnknownId(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub id: String,
    pub degree: i64,
    pub label: Option<String>,
}

impl Generator {
    pub fn new(id: impl Into<String>, degree: i64) -> Self {
        Generator { id: id.into(), degree, label: None }
    }

    pub fn labeled(id: impl Into<String>, degree: i64, label: impl Into<String>) -> Self {
        Generator { id: id.into(), degree, label: Some(label.into()) }
    }
}

/// Free graded module on an ordered list of generators. Boundedness is
/// structural: the degree range is read off the finite generator list, so
/// every total-degree slice of the Laurent complexes built on top of it
/// has finite rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedModule {
    ring: Ring,
    generators: Vec<Generator>,
    index: BTreeMap<String, usize>,
}

impl GradedModule {
    pub fn new(ring: Ring, generators: Vec<Generator>) -> Result<Self, GradedError> {
        let mut index = BTreeMap::new();
        for (i, g) in generators.iter().enumerate() {
            if index.insert(g.id.clone(), i).is_some() {
                return Err(GradedError::DuplicateId(g.id.clone()));
            }
        }
        Ok(GradedModule { ring, generators, index })
    }

    pub fn empty(ring: Ring) -> Self {
        GradedModule { ring, generators: Vec::new(), index: BTreeMap::new() }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.generators[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize, GradedError> {
        self.index.get(id).copied().ok_or_else(|| GradedError::UnknownId(id.to_string()))
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.generators[i].degree
    }

    /// (degree_min, degree_max); `None` for the zero module.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        let min = self.generators.iter().map(|g| g.degree).min()?;
        let max = self.generators.iter().map(|g| g.degree).max()?;
        Some((min, max))
    }

    /// Indices of generators in the given degree, in generator order.
    pub fn generators_in_degree(&self, degree: i64) -> Vec<usize> {
        (0..self.generators.len()).filter(|&i| self.generators[i].degree == degree).collect()
    }

    pub fn with_ring(&self, ring: Ring) -> GradedModule {
        let mut m = self.clone();
        m.ring = ring;
        m
    }
}
