//! Builds S1-complexes from orbit catalogs.
//!
//! A catalog stage lists closed-orbit data: constants (one generator at
//! their Morse index) and nonconstant orbits, each contributing a pair of
//! generators `<id>.hat` / `<id>.check` one degree apart. The local rules
//! are fixed by the orbit type: a bad orbit feeds delta_0 by
//! sign_d * 2 : check -> hat, a good orbit of multiplicity k feeds
//! delta_1 by sign_bv * k : hat -> check. Everything else (Morse
//! differentials on constants, cross-pair differentials) is explicit
//! input via `extra_d` / `extra_bv`, gated by grading, homotopy class,
//! and the structure relation.

use crate::filtration::FilteredS1Complex;
use crate::graded::{GradedModule, Generator};
use crate::matrix::ExactMatrix;
use crate::ring::{Coeff, Ring};
use crate::s1::{ComplexError, S1Complex, S1Map, VerifyOutcome};
use crate::telescope::DirectSystem;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    System(#[from] crate::telescope::TelescopeError),
    #[error("orbit {id:?}: grading_hat must equal grading_check + 1 (got {hat} vs {check})")]
    GradingPair { id: String, hat: i64, check: i64 },
    #[error("orbit {id:?} is bad but has odd multiplicity {k}")]
    BadOrbitOddMultiplicity { id: String, k: u32 },
    #[error("orbit {id:?} has zero multiplicity")]
    ZeroMultiplicity { id: String },
    #[error("orbits {a:?} and {b:?} share the action value {action}")]
    DuplicateAction { a: String, b: String, action: String },
    #[error("orbit {id:?} action {action} is not admissible for slope {slope} (must exceed -slope^2/2 - slope and be negative)")]
    ActionOutOfRange { id: String, action: String, slope: String },
    #[error("duplicate orbit id {0:?}")]
    DuplicateOrbit(String),
    #[error("entry references unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("extra entry {from:?} -> {to:?} crosses homotopy classes {from_class:?} and {to_class:?}")]
    HomotopyClassViolation { from: String, to: String, from_class: String, to_class: String },
    #[error("extra entry {from:?} -> {to:?} stays inside one orbit neighborhood; local terms are fixed by the orbit type")]
    EntryInsideOrbit { from: String, to: String },
    #[error("extra entry {from:?} -> {to:?} has degree shift {got}, expected {expected}")]
    EntryDegree { from: String, to: String, expected: i64, got: i64 },
    #[error("assembled stage violates the structure relation at k={k} on generator {generator:?}")]
    RelationFailure { k: usize, generator: String },
    #[error("continuation map violates its relation at k={k} on generator {generator:?}")]
    MapRelationFailure { k: usize, generator: String },
    #[error("entry {from:?} (level {from_level}) -> {to:?} (level {to_level}) raises the filtration level")]
    FiltrationViolation { from: String, from_level: usize, to: String, to_level: usize },
    #[error("generator {id:?} with action {action} lies below every threshold")]
    NoFiltrationLevel { id: String, action: String },
    #[error("thresholds must be strictly decreasing, got {prev} then {next}")]
    ThresholdsNotDecreasing { prev: String, next: String },
    #[error("stage {index} has slope {slope} not above the previous slope {prev}")]
    SlopesNotIncreasing { index: usize, slope: String, prev: String },
    #[error("inclusion pairs orbit {from:?} with {to:?} but their data disagree ({reason})")]
    MismatchedOrbits { from: String, to: String, reason: String },
    #[error("stage index {0} out of range")]
    StageIndex(usize),
    #[error("higher continuation components must have order >= 1; order-0 entries belong in corrections")]
    HigherOrderZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Good,
    Bad,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitKind {
    /// A critical point of the interior Morse function; one generator at
    /// the Morse index, action = Morse value.
    Constant { morse_index: i64 },
    /// A closed orbit of multiplicity k with perturbation pair hat/check.
    NonConstant { multiplicity: u32, parity: Parity },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDescriptor {
    pub id: String,
    pub kind: OrbitKind,
    pub action: Coeff,
    pub grading_hat: i64,
    pub grading_check: i64,
    pub homotopy_class: String,
    pub sign_d: i8,
    pub sign_bv: i8,
}

impl OrbitDescriptor {
    pub fn constant(id: impl Into<String>, morse_index: i64, action: Coeff, class: impl Into<String>) -> Self {
        OrbitDescriptor {
            id: id.into(),
            kind: OrbitKind::Constant { morse_index },
            action,
            grading_hat: morse_index + 1,
            grading_check: morse_index,
            homotopy_class: class.into(),
            sign_d: 1,
            sign_bv: 1,
        }
    }

    pub fn orbit(
        id: impl Into<String>,
        multiplicity: u32,
        parity: Parity,
        action: Coeff,
        grading_hat: i64,
        grading_check: i64,
        class: impl Into<String>,
    ) -> Self {
        OrbitDescriptor {
            id: id.into(),
            kind: OrbitKind::NonConstant { multiplicity, parity },
            action,
            grading_hat,
            grading_check,
            homotopy_class: class.into(),
            sign_d: 1,
            sign_bv: 1,
        }
    }

    fn validate(&self) -> Result<(), BuildError> {
        if let OrbitKind::NonConstant { multiplicity, parity } = &self.kind {
            if *multiplicity == 0 {
                return Err(BuildError::ZeroMultiplicity { id: self.id.clone() });
            }
            if self.grading_hat != self.grading_check + 1 {
                return Err(BuildError::GradingPair {
                    id: self.id.clone(),
                    hat: self.grading_hat,
                    check: self.grading_check,
                });
            }
            if *parity == Parity::Bad && multiplicity % 2 != 0 {
                return Err(BuildError::BadOrbitOddMultiplicity { id: self.id.clone(), k: *multiplicity });
            }
        }
        Ok(())
    }
}

/// An explicit differential entry between generators of distinct orbit
/// neighborhoods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtraEntry {
    pub from: String,
    pub to: String,
    pub coeff: Coeff,
}

impl ExtraEntry {
    pub fn new(from: impl Into<String>, to: impl Into<String>, coeff: Coeff) -> Self {
        ExtraEntry { from: from.into(), to: to.into(), coeff }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamiltonianStage {
    pub slope: Coeff,
    pub orbits: Vec<OrbitDescriptor>,
    pub extra_d: Vec<ExtraEntry>,
    pub extra_bv: Vec<ExtraEntry>,
    /// Optional action thresholds defining the filtration levels.
    pub thresholds: Option<Vec<Coeff>>,
}

/// Action of an orbit of period l for the quadratic-then-linear profile:
/// a_l = -l^2/2 - l. Stages with other profiles supply actions directly.
pub fn action_for_period(l: &Coeff) -> Coeff {
    let half = Coeff::new(BigInt::from(1), BigInt::from(2));
    -(l * l * half) - l
}

/// Thresholds separating the action bands of the given (sorted, distinct)
/// periods: midpoints between consecutive periods starting from 0, then
/// the slope itself as the final catch-all band.
pub fn midpoint_thresholds(periods: &[Coeff], slope: &Coeff) -> Vec<Coeff> {
    let half = Coeff::new(BigInt::from(1), BigInt::from(2));
    let mut cuts = Vec::with_capacity(periods.len() + 1);
    let mut prev = Coeff::zero();
    for l in periods {
        cuts.push(action_for_period(&((&prev + l) * &half)));
        prev = l.clone();
    }
    cuts.push(action_for_period(slope));
    cuts
}

/// Generator ids derived from an orbit id.
pub fn hat_id(orbit: &str) -> String {
    format!("{orbit}.hat")
}

pub fn check_id(orbit: &str) -> String {
    format!("{orbit}.check")
}

struct StageIndexed {
    /// generator id -> (orbit index, degree)
    gens: BTreeMap<String, (usize, i64)>,
}

impl HamiltonianStage {
    pub fn new(slope: Coeff, orbits: Vec<OrbitDescriptor>) -> Self {
        HamiltonianStage { slope, orbits, extra_d: Vec::new(), extra_bv: Vec::new(), thresholds: None }
    }

    fn index_generators(&self) -> StageIndexed {
        let mut gens = BTreeMap::new();
        for (i, o) in self.orbits.iter().enumerate() {
            match &o.kind {
                OrbitKind::Constant { morse_index } => {
                    gens.insert(o.id.clone(), (i, *morse_index));
                }
                OrbitKind::NonConstant { .. } => {
                    gens.insert(hat_id(&o.id), (i, o.grading_hat));
                    gens.insert(check_id(&o.id), (i, o.grading_check));
                }
            }
        }
        StageIndexed { gens }
    }

    pub fn validate(&self) -> Result<(), BuildError> {
        let mut seen = BTreeMap::new();
        for o in &self.orbits {
            o.validate()?;
            if seen.insert(o.id.clone(), ()).is_some() {
                return Err(BuildError::DuplicateOrbit(o.id.clone()));
            }
        }
        // Nonconstant orbits must carry pairwise distinct action values.
        let nonconstant: Vec<&OrbitDescriptor> = self
            .orbits
            .iter()
            .filter(|o| matches!(o.kind, OrbitKind::NonConstant { .. }))
            .collect();
        for (i, a) in nonconstant.iter().enumerate() {
            for b in &nonconstant[i + 1..] {
                if a.action == b.action {
                    return Err(BuildError::DuplicateAction {
                        a: a.id.clone(),
                        b: b.id.clone(),
                        action: crate::ring::format_coeff(&a.action),
                    });
                }
            }
        }
        // Admissibility: actions sit strictly above the slope's action
        // value, and below zero (constants may touch zero).
        let floor = action_for_period(&self.slope);
        for o in &self.orbits {
            let bad = match o.kind {
                OrbitKind::NonConstant { .. } => o.action <= floor || o.action >= Coeff::zero(),
                OrbitKind::Constant { .. } => o.action <= floor || o.action > Coeff::zero(),
            };
            if bad {
                return Err(BuildError::ActionOutOfRange {
                    id: o.id.clone(),
                    action: crate::ring::format_coeff(&o.action),
                    slope: crate::ring::format_coeff(&self.slope),
                });
            }
        }
        let idx = self.index_generators();
        for (entry, shift) in self
            .extra_d
            .iter()
            .map(|e| (e, 1))
            .chain(self.extra_bv.iter().map(|e| (e, -1)))
        {
            self.validate_extra(&idx, entry, shift)?;
        }
        Ok(())
    }

    fn validate_extra(&self, idx: &StageIndexed, e: &ExtraEntry, shift: i64) -> Result<(), BuildError> {
        let (fo, fd) =
            idx.gens.get(&e.from).ok_or_else(|| BuildError::UnknownGenerator(e.from.clone()))?;
        let (to, td) = idx.gens.get(&e.to).ok_or_else(|| BuildError::UnknownGenerator(e.to.clone()))?;
        if fo == to {
            return Err(BuildError::EntryInsideOrbit { from: e.from.clone(), to: e.to.clone() });
        }
        let fc = &self.orbits[*fo].homotopy_class;
        let tc = &self.orbits[*to].homotopy_class;
        if fc != tc {
            return Err(BuildError::HomotopyClassViolation {
                from: e.from.clone(),
                to: e.to.clone(),
                from_class: fc.clone(),
                to_class: tc.clone(),
            });
        }
        if td - fd != shift {
            return Err(BuildError::EntryDegree {
                from: e.from.clone(),
                to: e.to.clone(),
                expected: shift,
                got: td - fd,
            });
        }
        Ok(())
    }

    /// Ordered generator list: catalog order, hat before check.
    pub fn generators(&self) -> Vec<Generator> {
        let mut gens = Vec::new();
        for o in &self.orbits {
            match &o.kind {
                OrbitKind::Constant { morse_index } => {
                    gens.push(Generator::new(o.id.clone(), *morse_index));
                }
                OrbitKind::NonConstant { .. } => {
                    gens.push(Generator::new(hat_id(&o.id), o.grading_hat));
                    gens.push(Generator::new(check_id(&o.id), o.grading_check));
                }
            }
        }
        gens
    }

    /// Action value carried by each generator (both halves of a pair
    /// share the orbit's action).
    pub fn generator_actions(&self) -> Vec<(String, Coeff)> {
        let mut out = Vec::new();
        for o in &self.orbits {
            match &o.kind {
                OrbitKind::Constant { .. } => out.push((o.id.clone(), o.action.clone())),
                OrbitKind::NonConstant { .. } => {
                    out.push((hat_id(&o.id), o.action.clone()));
                    out.push((check_id(&o.id), o.action.clone()));
                }
            }
        }
        out
    }
}

/// Assembles the stage complex: local rules plus explicit entries, then
/// a full structure verification.
pub fn build_stage_complex(stage: &HamiltonianStage) -> Result<S1Complex, BuildError> {
    build_stage_complex_over(stage, Ring::Z)
}

pub fn build_stage_complex_over(stage: &HamiltonianStage, ring: Ring) -> Result<S1Complex, BuildError> {
    stage.validate()?;
    let module = GradedModule::new(ring, stage.generators()).map_err(ComplexError::from)?;
    let n = module.rank();
    let mut d0 = ExactMatrix::zero(ring, n, n);
    let mut d1 = ExactMatrix::zero(ring, n, n);
    for o in &stage.orbits {
        if let OrbitKind::NonConstant { multiplicity, parity } = &o.kind {
            match parity {
                Parity::Bad => {
                    let r = module.index_of(&hat_id(&o.id)).map_err(ComplexError::from)?;
                    let c = module.index_of(&check_id(&o.id)).map_err(ComplexError::from)?;
                    d0.add_entry(r, c, crate::ring::coeff_from_i64(2 * o.sign_d as i64))
                        .map_err(ComplexError::from)?;
                }
                Parity::Good => {
                    let r = module.index_of(&check_id(&o.id)).map_err(ComplexError::from)?;
                    let c = module.index_of(&hat_id(&o.id)).map_err(ComplexError::from)?;
                    let k = *multiplicity as i64;
                    d1.add_entry(r, c, crate::ring::coeff_from_i64(k * o.sign_bv as i64))
                        .map_err(ComplexError::from)?;
                }
            }
        }
    }
    for e in &stage.extra_d {
        let r = module.index_of(&e.to).map_err(ComplexError::from)?;
        let c = module.index_of(&e.from).map_err(ComplexError::from)?;
        d0.add_entry(r, c, e.coeff.clone()).map_err(ComplexError::from)?;
    }
    for e in &stage.extra_bv {
        let r = module.index_of(&e.to).map_err(ComplexError::from)?;
        let c = module.index_of(&e.from).map_err(ComplexError::from)?;
        d1.add_entry(r, c, e.coeff.clone()).map_err(ComplexError::from)?;
    }
    let complex = S1Complex::new(module, vec![d0, d1])?;
    match complex.verify_structure()? {
        VerifyOutcome::Pass => Ok(complex),
        VerifyOutcome::Fail { k, generator } => Err(BuildError::RelationFailure { k, generator }),
    }
}

/// Assigns filtration levels from action thresholds: level of a generator
/// is the first band whose threshold its action clears. Thresholds must
/// be strictly decreasing; every operation entry must be level-preserving
/// (the executable form of the action estimate for delta_i).
pub fn attach_action_filtration(
    complex: &S1Complex,
    stage: &HamiltonianStage,
    thresholds: &[Coeff],
) -> Result<FilteredS1Complex, BuildError> {
    for w in thresholds.windows(2) {
        if w[1] >= w[0] {
            return Err(BuildError::ThresholdsNotDecreasing {
                prev: crate::ring::format_coeff(&w[0]),
                next: crate::ring::format_coeff(&w[1]),
            });
        }
    }
    let actions: BTreeMap<String, Coeff> = stage.generator_actions().into_iter().collect();
    let mut levels = Vec::with_capacity(complex.rank());
    for g in complex.module().generators() {
        let action = actions
            .get(&g.id)
            .ok_or_else(|| BuildError::UnknownGenerator(g.id.clone()))?;
        let level = thresholds.iter().position(|t| action >= t).ok_or_else(|| {
            BuildError::NoFiltrationLevel { id: g.id.clone(), action: crate::ring::format_coeff(action) }
        })?;
        levels.push(level);
    }
    FilteredS1Complex::new(complex.clone(), levels).map_err(|e| match e {
        crate::filtration::FiltrationError::LevelRaised { from, from_level, to, to_level } => {
            BuildError::FiltrationViolation { from, from_level, to, to_level }
        }
        other => panic!("unexpected filtration failure: {other}"),
    })
}

/// Identification of shared orbits between consecutive stages, plus any
/// explicit corrections to the continuation map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Inclusion {
    /// (orbit id in the lower stage, orbit id in the upper stage)
    pub pairs: Vec<(String, String)>,
    /// Extra kappa_0 entries between generator ids.
    pub corrections: Vec<ExtraEntry>,
    /// Higher components kappa_i, i >= 1, as (order, entries).
    pub higher: Vec<(usize, Vec<ExtraEntry>)>,
}

impl Inclusion {
    /// Pairs every orbit of `lower` with the same id in the next stage.
    pub fn by_id(lower: &HamiltonianStage) -> Inclusion {
        Inclusion {
            pairs: lower.orbits.iter().map(|o| (o.id.clone(), o.id.clone())).collect(),
            corrections: Vec::new(),
            higher: Vec::new(),
        }
    }
}

/// A cofinal tower of stages with strictly increasing slopes and an
/// orbit correspondence for each consecutive pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageSequence {
    pub stages: Vec<HamiltonianStage>,
    pub inclusions: Vec<Inclusion>,
}

impl StageSequence {
    pub fn validate(&self) -> Result<(), BuildError> {
        for (i, s) in self.stages.iter().enumerate() {
            s.validate()?;
            if i > 0 && s.slope <= self.stages[i - 1].slope {
                return Err(BuildError::SlopesNotIncreasing {
                    index: i,
                    slope: crate::ring::format_coeff(&s.slope),
                    prev: crate::ring::format_coeff(&self.stages[i - 1].slope),
                });
            }
        }
        Ok(())
    }
}

fn orbit_by_id<'a>(stage: &'a HamiltonianStage, id: &str) -> Option<&'a OrbitDescriptor> {
    stage.orbits.iter().find(|o| o.id == id)
}

/// Builds the continuation map from stage `i` to stage `i + 1`:
/// kappa_0 is the inclusion on shared orbit generators plus declared
/// corrections, higher components are declared data. The result must pass
/// the map relation and preserve filtration levels when thresholds are
/// present on both stages.
pub fn build_continuation(seq: &StageSequence, i: usize) -> Result<S1Map, BuildError> {
    build_continuation_over(seq, i, Ring::Z)
}

pub fn build_continuation_over(seq: &StageSequence, i: usize, ring: Ring) -> Result<S1Map, BuildError> {
    if i + 1 >= seq.stages.len() || i >= seq.inclusions.len() {
        return Err(BuildError::StageIndex(i));
    }
    let lower = &seq.stages[i];
    let upper = &seq.stages[i + 1];
    let source = build_stage_complex_over(lower, ring)?;
    let target = build_stage_complex_over(upper, ring)?;
    let inc = &seq.inclusions[i];

    let mut k0 = ExactMatrix::zero(ring, target.rank(), source.rank());
    for (from, to) in &inc.pairs {
        let fo = orbit_by_id(lower, from)
            .ok_or_else(|| BuildError::UnknownGenerator(from.clone()))?;
        let to_ = orbit_by_id(upper, to).ok_or_else(|| BuildError::UnknownGenerator(to.clone()))?;
        let compatible = match (&fo.kind, &to_.kind) {
            (OrbitKind::Constant { morse_index: a }, OrbitKind::Constant { morse_index: b }) => a == b,
            (
                OrbitKind::NonConstant { multiplicity: ka, parity: pa },
                OrbitKind::NonConstant { multiplicity: kb, parity: pb },
            ) => ka == kb && pa == pb && fo.grading_hat == to_.grading_hat && fo.grading_check == to_.grading_check,
            _ => false,
        };
        if !compatible || fo.homotopy_class != to_.homotopy_class {
            return Err(BuildError::MismatchedOrbits {
                from: from.clone(),
                to: to.clone(),
                reason: "kind, multiplicity, parity, grading or class differ".into(),
            });
        }
        let gen_pairs: Vec<(String, String)> = match &fo.kind {
            OrbitKind::Constant { .. } => vec![(from.clone(), to.clone())],
            OrbitKind::NonConstant { .. } => vec![
                (hat_id(from), hat_id(to)),
                (check_id(from), check_id(to)),
            ],
        };
        for (fg, tg) in gen_pairs {
            let c = source.module().index_of(&fg).map_err(ComplexError::from)?;
            let r = target.module().index_of(&tg).map_err(ComplexError::from)?;
            k0.add_entry(r, c, crate::ring::coeff_from_i64(1)).map_err(ComplexError::from)?;
        }
    }
    for e in &inc.corrections {
        let c = source.module().index_of(&e.from).map_err(ComplexError::from)?;
        let r = target.module().index_of(&e.to).map_err(ComplexError::from)?;
        k0.add_entry(r, c, e.coeff.clone()).map_err(ComplexError::from)?;
    }
    let depth = inc.higher.iter().map(|(o, _)| o + 1).max().unwrap_or(1);
    let mut comps = vec![ExactMatrix::zero(ring, target.rank(), source.rank()); depth];
    comps[0] = k0;
    for (order, entries) in &inc.higher {
        if *order == 0 {
            return Err(BuildError::HigherOrderZero);
        }
        for e in entries {
            let c = source.module().index_of(&e.from).map_err(ComplexError::from)?;
            let r = target.module().index_of(&e.to).map_err(ComplexError::from)?;
            comps[*order].add_entry(r, c, e.coeff.clone()).map_err(ComplexError::from)?;
        }
    }

    let map = S1Map::new(source.clone(), target.clone(), comps)?;
    match map.verify()? {
        VerifyOutcome::Pass => {}
        VerifyOutcome::Fail { k, generator } => {
            return Err(BuildError::MapRelationFailure { k, generator })
        }
    }

    // Filtration preservation across the link, when both stages carry
    // thresholds.
    if let (Some(tl), Some(tu)) = (&lower.thresholds, &upper.thresholds) {
        let fl = attach_action_filtration(&source, lower, tl)?;
        let fu = attach_action_filtration(&target, upper, tu)?;
        for comp in map.components() {
            for (r, c, _) in comp.iter() {
                let from_level = fl.level(c);
                let to_level = fu.level(r);
                if to_level > from_level {
                    return Err(BuildError::FiltrationViolation {
                        from: source.module().generator(c).id.clone(),
                        from_level,
                        to: target.module().generator(r).id.clone(),
                        to_level,
                    });
                }
            }
        }
    }
    Ok(map)
}

/// Builds every stage complex and continuation map of the sequence.
pub fn build_system(seq: &StageSequence) -> Result<DirectSystem, BuildError> {
    build_system_over(seq, Ring::Z)
}

pub fn build_system_over(seq: &StageSequence, ring: Ring) -> Result<DirectSystem, BuildError> {
    seq.validate()?;
    let stages: Vec<S1Complex> = seq
        .stages
        .iter()
        .map(|s| build_stage_complex_over(s, ring))
        .collect::<Result<_, _>>()?;
    let mut maps = Vec::new();
    for i in 0..seq.stages.len().saturating_sub(1) {
        maps.push(build_continuation_over(seq, i, ring)?);
    }
    DirectSystem::new(stages, maps).map_err(BuildError::from)
}

/// Rational stand-in for pi used by the bundled catalogs. The actual
/// transcendental value is irrelevant: only ordering and distinctness of
/// the action spectrum matter, and those survive any positive rational
/// substitute.
pub fn pi_surrogate() -> Coeff {
    Coeff::new(BigInt::from(355), BigInt::from(113))
}

/// Disk catalog: stage k carries the constant x0 and k good orbits of
/// multiplicities 1..k in one contractible class, with the odd-to-even
/// cross-pair differentials d(x_{-2j+1}) = x_{-2j+2}.
pub fn disk_sequence(max_stage: u32) -> StageSequence {
    let p = pi_surrogate();
    let mut stages = Vec::new();
    for k in 1..=max_stage {
        let slope = &p * crate::ring::coeff_from_i64(k as i64) + crate::ring::coeff_from_i64(1);
        let mut orbits = vec![OrbitDescriptor::constant(
            "x0",
            0,
            crate::ring::coeff_from_pair(-1, 100),
            "c",
        )];
        let mut periods = Vec::new();
        for j in 1..=k {
            let period = &p * crate::ring::coeff_from_i64(j as i64);
            periods.push(period.clone());
            orbits.push(OrbitDescriptor::orbit(
                format!("g{j}"),
                j,
                Parity::Good,
                action_for_period(&period),
                -2 * (j as i64) + 1,
                -2 * (j as i64),
                "c",
            ));
        }
        let mut extra_d = vec![ExtraEntry::new(hat_id("g1"), "x0", crate::ring::coeff_from_i64(1))];
        for j in 2..=k {
            extra_d.push(ExtraEntry::new(
                hat_id(&format!("g{j}")),
                check_id(&format!("g{}", j - 1)),
                crate::ring::coeff_from_i64(1),
            ));
        }
        let mut stage = HamiltonianStage::new(slope.clone(), orbits);
        stage.extra_d = extra_d;
        stage.thresholds = Some(midpoint_thresholds(&periods, &slope));
        stages.push(stage);
    }
    let inclusions = (0..max_stage.saturating_sub(1) as usize)
        .map(|i| Inclusion::by_id(&stages[i]))
        .collect();
    StageSequence { stages, inclusions }
}

/// Annulus catalog: stage i carries the two constants (degrees 0 and 1)
/// and good orbits of winding k for 0 < |k| <= i, each in its own
/// homotopy class, with signed BV coefficient k.
pub fn annulus_sequence(max_stage: u32) -> StageSequence {
    let p = pi_surrogate();
    // Slight period offset keeps the two boundary components' action
    // spectra disjoint, as the genericity condition requires.
    let eps = crate::ring::coeff_from_pair(1, 1000);
    let mut stages = Vec::new();
    for i in 1..=max_stage {
        let slope = &p * crate::ring::coeff_from_i64(i as i64) + crate::ring::coeff_from_i64(1);
        let mut orbits = vec![
            OrbitDescriptor::constant("c0", 0, crate::ring::coeff_from_pair(-1, 100), "w0"),
            OrbitDescriptor::constant("c1", 1, crate::ring::coeff_from_pair(-1, 200), "w0"),
        ];
        let mut periods = Vec::new();
        for k in 1..=i {
            let period_pos = &p * crate::ring::coeff_from_i64(k as i64);
            let period_neg = &period_pos + &eps;
            periods.push(period_pos.clone());
            periods.push(period_neg.clone());
            let mut pos = OrbitDescriptor::orbit(
                format!("g{k}"),
                k,
                Parity::Good,
                action_for_period(&period_pos),
                1,
                0,
                format!("w{k}"),
            );
            pos.sign_bv = 1;
            let mut neg = OrbitDescriptor::orbit(
                format!("g-{k}"),
                k,
                Parity::Good,
                action_for_period(&period_neg),
                1,
                0,
                format!("w-{k}"),
            );
            neg.sign_bv = -1;
            orbits.push(pos);
            orbits.push(neg);
        }
        let mut stage = HamiltonianStage::new(slope.clone(), orbits);
        stage.thresholds = Some(midpoint_thresholds(&periods, &slope));
        stages.push(stage);
    }
    let inclusions = (0..max_stage.saturating_sub(1) as usize)
        .map(|i| Inclusion::by_id(&stages[i]))
        .collect();
    StageSequence { stages, inclusions }
}
