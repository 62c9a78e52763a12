//! JSON schemas (version "psh/1") for complexes, maps, orbit catalogs and
//! reports, with validated conversion to the domain types.
//!
//! Coefficients, actions and slopes are decimal integer strings or
//! "p/q"; degrees and levels are JSON integers.

use crate::builder::{
    ExtraEntry, HamiltonianStage, Inclusion, OrbitDescriptor, OrbitKind, Parity, StageSequence,
};
use crate::graded::{GradedModule, Generator};
use crate::matrix::ExactMatrix;
use crate::presentation::AbelianGroupPresentation;
use crate::ring::{format_coeff, parse_coeff, Ring};
use crate::s1::{ComplexError, S1Complex, S1Map};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA: &str = "psh/1";

#[derive(Debug, Error)]
pub enum JsonError {
    #[error(transparent)]
    Parse(#[from] serde_json::Error),
    #[error("bad scalar for {context}: {message}")]
    Scalar { context: String, message: String },
    #[error("unknown ring {0:?}")]
    Ring(String),
    #[error("unsupported schema {0:?} (expected {SCHEMA})")]
    Schema(String),
    #[error("orbit {id:?}: {message}")]
    Orbit { id: String, message: String },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("document is not a complex, catalog or system (missing the marker fields)")]
    UnknownKind,
}

fn scalar(context: &str, s: &str) -> Result<crate::ring::Coeff, JsonError> {
    parse_coeff(s).map_err(|message| JsonError::Scalar { context: context.to_string(), message })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntryDoc {
    pub from: String,
    pub to: String,
    pub coeff: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpDoc {
    pub order: usize,
    pub entries: Vec<EntryDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub id: String,
    pub degree: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A raw S1-complex document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub ring: String,
    pub generators: Vec<GeneratorDoc>,
    pub operations: Vec<OpDoc>,
}

/// A map/homotopy document: components in the same entry schema with
/// `order` meaning the component index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub components: Vec<OpDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitDoc {
    pub id: String,
    /// "constant" or "nonconstant"
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morse_index: Option<i64>,
    pub action: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grading_hat: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grading_check: Option<i64>,
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_d: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_bv: Option<i8>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageDoc {
    pub slope: String,
    pub orbits: Vec<OrbitDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_d: Vec<EntryDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_bv: Vec<EntryDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairDoc {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InclusionDoc {
    pub pairs: Vec<PairDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub corrections: Vec<EntryDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub higher: Vec<OpDoc>,
}

/// An orbit catalog; with `inclusions` present it doubles as a stage
/// system document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub stages: Vec<StageDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inclusions: Option<Vec<InclusionDoc>>,
}

/// A generic system document referencing raw complex and map files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileSystemDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub stage_files: Vec<String>,
    pub map_files: Vec<String>,
}

/// One parsed input document.
#[derive(Debug, Clone)]
pub enum InputDoc {
    Complex(ComplexDoc),
    Catalog(CatalogDoc),
    FileSystem(FileSystemDoc),
}

fn check_schema(schema: &Option<String>) -> Result<(), JsonError> {
    match schema {
        Some(s) if s != SCHEMA => Err(JsonError::Schema(s.clone())),
        _ => Ok(()),
    }
}

/// Detects the document kind by its marker fields.
pub fn parse_input(text: &str) -> Result<InputDoc, JsonError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let obj = value.as_object().ok_or(JsonError::UnknownKind)?;
    let doc = if obj.contains_key("generators") {
        InputDoc::Complex(serde_json::from_value(value)?)
    } else if obj.contains_key("stages") {
        InputDoc::Catalog(serde_json::from_value(value)?)
    } else if obj.contains_key("stage_files") {
        InputDoc::FileSystem(serde_json::from_value(value)?)
    } else {
        return Err(JsonError::UnknownKind);
    };
    let schema = match &doc {
        InputDoc::Complex(d) => &d.schema,
        InputDoc::Catalog(d) => &d.schema,
        InputDoc::FileSystem(d) => &d.schema,
    };
    check_schema(schema)?;
    Ok(doc)
}

pub fn ring_from_str(s: &str) -> Result<Ring, JsonError> {
    s.parse().map_err(|_| JsonError::Ring(s.to_string()))
}

pub fn complex_from_doc(doc: &ComplexDoc) -> Result<S1Complex, JsonError> {
    check_schema(&doc.schema)?;
    let ring = ring_from_str(&doc.ring)?;
    let gens = doc
        .generators
        .iter()
        .map(|g| Generator { id: g.id.clone(), degree: g.degree, label: g.label.clone() })
        .collect();
    let module = GradedModule::new(ring, gens).map_err(ComplexError::from)?;
    let n = module.rank();
    let depth = doc.operations.iter().map(|o| o.order + 1).max().unwrap_or(1);
    let mut ops = vec![ExactMatrix::zero(ring, n, n); depth];
    for op in &doc.operations {
        for e in &op.entries {
            let r = module.index_of(&e.to).map_err(ComplexError::from)?;
            let c = module.index_of(&e.from).map_err(ComplexError::from)?;
            let v = scalar(&format!("operation {} entry {} -> {}", op.order, e.from, e.to), &e.coeff)?;
            ops[op.order].add_entry(r, c, v).map_err(ComplexError::from)?;
        }
    }
    Ok(S1Complex::new(module, ops)?)
}

pub fn complex_to_doc(c: &S1Complex) -> ComplexDoc {
    let generators = c
        .module()
        .generators()
        .iter()
        .map(|g| GeneratorDoc { id: g.id.clone(), degree: g.degree, label: g.label.clone() })
        .collect();
    let mut operations = Vec::new();
    for (order, op) in c.operations().iter().enumerate() {
        let entries: Vec<EntryDoc> = op
            .iter()
            .map(|(r, cc, v)| EntryDoc {
                from: c.module().generator(cc).id.clone(),
                to: c.module().generator(r).id.clone(),
                coeff: format_coeff(v),
            })
            .collect();
        if !entries.is_empty() {
            operations.push(OpDoc { order, entries });
        }
    }
    ComplexDoc {
        schema: Some(SCHEMA.to_string()),
        ring: c.ring().to_string(),
        generators,
        operations,
    }
}

pub fn map_from_doc(doc: &MapDoc, source: S1Complex, target: S1Complex) -> Result<S1Map, JsonError> {
    check_schema(&doc.schema)?;
    let ring = source.ring();
    let depth = doc.components.iter().map(|o| o.order + 1).max().unwrap_or(1);
    let mut comps = vec![ExactMatrix::zero(ring, target.rank(), source.rank()); depth];
    for op in &doc.components {
        for e in &op.entries {
            let r = target.module().index_of(&e.to).map_err(ComplexError::from)?;
            let c = source.module().index_of(&e.from).map_err(ComplexError::from)?;
            let v = scalar(&format!("component {} entry {} -> {}", op.order, e.from, e.to), &e.coeff)?;
            comps[op.order].add_entry(r, c, v).map_err(ComplexError::from)?;
        }
    }
    Ok(S1Map::new(source, target, comps)?)
}

fn orbit_from_doc(doc: &OrbitDoc) -> Result<OrbitDescriptor, JsonError> {
    let err = |message: &str| JsonError::Orbit { id: doc.id.clone(), message: message.to_string() };
    let action = scalar(&format!("orbit {} action", doc.id), &doc.action)?;
    let kind = match doc.kind.as_str() {
        "constant" => OrbitKind::Constant {
            morse_index: doc.morse_index.ok_or_else(|| err("constant orbit needs morse_index"))?,
        },
        "nonconstant" => {
            let parity = match doc.parity.as_deref() {
                Some("good") => Parity::Good,
                Some("bad") => Parity::Bad,
                other => return Err(err(&format!("bad parity {other:?}"))),
            };
            OrbitKind::NonConstant {
                multiplicity: doc.k.ok_or_else(|| err("nonconstant orbit needs k"))?,
                parity,
            }
        }
        other => return Err(err(&format!("unknown kind {other:?}"))),
    };
    let (grading_hat, grading_check) = match &kind {
        OrbitKind::Constant { morse_index } => (
            doc.grading_hat.unwrap_or(morse_index + 1),
            doc.grading_check.unwrap_or(*morse_index),
        ),
        OrbitKind::NonConstant { .. } => (
            doc.grading_hat.ok_or_else(|| err("nonconstant orbit needs grading_hat"))?,
            doc.grading_check.ok_or_else(|| err("nonconstant orbit needs grading_check"))?,
        ),
    };
    Ok(OrbitDescriptor {
        id: doc.id.clone(),
        kind,
        action,
        grading_hat,
        grading_check,
        homotopy_class: doc.class.clone(),
        sign_d: doc.sign_d.unwrap_or(1),
        sign_bv: doc.sign_bv.unwrap_or(1),
    })
}

fn orbit_to_doc(o: &OrbitDescriptor) -> OrbitDoc {
    let (kind, k, parity, morse_index) = match &o.kind {
        OrbitKind::Constant { morse_index } => ("constant", None, None, Some(*morse_index)),
        OrbitKind::NonConstant { multiplicity, parity } => (
            "nonconstant",
            Some(*multiplicity),
            Some(match parity {
                Parity::Good => "good".to_string(),
                Parity::Bad => "bad".to_string(),
            }),
            None,
        ),
    };
    let is_nonconstant = matches!(o.kind, OrbitKind::NonConstant { .. });
    OrbitDoc {
        id: o.id.clone(),
        kind: kind.to_string(),
        k,
        parity,
        morse_index,
        action: format_coeff(&o.action),
        grading_hat: is_nonconstant.then_some(o.grading_hat),
        grading_check: is_nonconstant.then_some(o.grading_check),
        class: o.homotopy_class.clone(),
        sign_d: Some(o.sign_d),
        sign_bv: Some(o.sign_bv),
    }
}

fn entry_from_doc(e: &EntryDoc, context: &str) -> Result<ExtraEntry, JsonError> {
    Ok(ExtraEntry {
        from: e.from.clone(),
        to: e.to.clone(),
        coeff: scalar(context, &e.coeff)?,
    })
}

fn entry_to_doc(e: &ExtraEntry) -> EntryDoc {
    EntryDoc { from: e.from.clone(), to: e.to.clone(), coeff: format_coeff(&e.coeff) }
}

pub fn stage_from_doc(doc: &StageDoc) -> Result<HamiltonianStage, JsonError> {
    let slope = scalar("stage slope", &doc.slope)?;
    let orbits = doc.orbits.iter().map(orbit_from_doc).collect::<Result<Vec<_>, _>>()?;
    let extra_d = doc
        .extra_d
        .iter()
        .map(|e| entry_from_doc(e, "extra_d"))
        .collect::<Result<Vec<_>, _>>()?;
    let extra_bv = doc
        .extra_bv
        .iter()
        .map(|e| entry_from_doc(e, "extra_bv"))
        .collect::<Result<Vec<_>, _>>()?;
    let thresholds = doc
        .thresholds
        .as_ref()
        .map(|ts| ts.iter().map(|t| scalar("threshold", t)).collect::<Result<Vec<_>, _>>())
        .transpose()?;
    Ok(HamiltonianStage { slope, orbits, extra_d, extra_bv, thresholds })
}

fn stage_to_doc(s: &HamiltonianStage) -> StageDoc {
    StageDoc {
        slope: format_coeff(&s.slope),
        orbits: s.orbits.iter().map(orbit_to_doc).collect(),
        extra_d: s.extra_d.iter().map(entry_to_doc).collect(),
        extra_bv: s.extra_bv.iter().map(entry_to_doc).collect(),
        thresholds: s.thresholds.as_ref().map(|ts| ts.iter().map(format_coeff).collect()),
    }
}

pub fn sequence_from_doc(doc: &CatalogDoc) -> Result<StageSequence, JsonError> {
    check_schema(&doc.schema)?;
    let stages = doc.stages.iter().map(stage_from_doc).collect::<Result<Vec<_>, _>>()?;
    let inclusions = match &doc.inclusions {
        Some(incs) => incs
            .iter()
            .map(|i| {
                Ok(Inclusion {
                    pairs: i.pairs.iter().map(|p| (p.from.clone(), p.to.clone())).collect(),
                    corrections: i
                        .corrections
                        .iter()
                        .map(|e| entry_from_doc(e, "correction"))
                        .collect::<Result<Vec<_>, JsonError>>()?,
                    higher: i
                        .higher
                        .iter()
                        .map(|o| {
                            Ok((
                                o.order,
                                o.entries
                                    .iter()
                                    .map(|e| entry_from_doc(e, "higher component"))
                                    .collect::<Result<Vec<_>, JsonError>>()?,
                            ))
                        })
                        .collect::<Result<Vec<_>, JsonError>>()?,
                })
            })
            .collect::<Result<Vec<_>, JsonError>>()?,
        None => Vec::new(),
    };
    Ok(StageSequence { stages, inclusions })
}

pub fn sequence_to_doc(seq: &StageSequence, with_inclusions: bool) -> CatalogDoc {
    let inclusions = with_inclusions.then(|| {
        seq.inclusions
            .iter()
            .map(|i| InclusionDoc {
                pairs: i
                    .pairs
                    .iter()
                    .map(|(from, to)| PairDoc { from: from.clone(), to: to.clone() })
                    .collect(),
                corrections: i.corrections.iter().map(entry_to_doc).collect(),
                higher: i
                    .higher
                    .iter()
                    .map(|(order, entries)| OpDoc {
                        order: *order,
                        entries: entries.iter().map(entry_to_doc).collect(),
                    })
                    .collect(),
            })
            .collect()
    });
    CatalogDoc {
        schema: Some(SCHEMA.to_string()),
        stages: seq.stages.iter().map(stage_to_doc).collect(),
        inclusions,
    }
}

/// Group presentation in report form: free rank plus decimal torsion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDoc {
    pub free_rank: usize,
    pub torsion: Vec<String>,
}

impl From<&AbelianGroupPresentation> for GroupDoc {
    fn from(p: &AbelianGroupPresentation) -> Self {
        GroupDoc {
            free_rank: p.free_rank,
            torsion: p.invariant_factors.iter().map(|t| t.to_string()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::disk_sequence;

    #[test]
    fn complex_document_round_trip() {
        let seq = disk_sequence(2);
        let c = crate::builder::build_stage_complex(&seq.stages[1]).unwrap();
        let doc = complex_to_doc(&c);
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let back = match parse_input(&text).unwrap() {
            InputDoc::Complex(d) => complex_from_doc(&d).unwrap(),
            _ => panic!("wrong kind"),
        };
        assert_eq!(c, back);
    }

    #[test]
    fn catalog_document_round_trip() {
        let mut seq = disk_sequence(3);
        // Exercise the correction and higher-component fields too.
        seq.inclusions[0].corrections =
            vec![ExtraEntry::new("x0", "x0", crate::ring::coeff_from_i64(1))];
        seq.inclusions[1].higher = vec![(
            2,
            vec![ExtraEntry::new("g1.hat", "g2.check", crate::ring::coeff_from_pair(1, 3))],
        )];
        let doc = sequence_to_doc(&seq, true);
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let back = match parse_input(&text).unwrap() {
            InputDoc::Catalog(d) => sequence_from_doc(&d).unwrap(),
            _ => panic!("wrong kind"),
        };
        assert_eq!(seq, back);
    }

    #[test]
    fn rejects_unknown_schema_and_kind() {
        let bad = r#"{"schema": "psh/2", "generators": [], "operations": [], "ring": "Z"}"#;
        assert!(matches!(parse_input(bad), Err(JsonError::Schema(_))));
        let none = r#"{"foo": 1}"#;
        assert!(matches!(parse_input(none), Err(JsonError::UnknownKind)));
    }

    #[test]
    fn rational_scalars_parse_in_docs() {
        let text = r#"{
            "ring": "Q",
            "generators": [{"id": "a", "degree": 0}, {"id": "b", "degree": 1}],
            "operations": [{"order": 0, "entries": [{"from": "a", "to": "b", "coeff": "3/2"}]}]
        }"#;
        let InputDoc::Complex(doc) = parse_input(text).unwrap() else { panic!() };
        let c = complex_from_doc(&doc).unwrap();
        assert_eq!(c.operation(0).get(1, 0), crate::ring::coeff_from_pair(3, 2));
    }

    #[test]
    fn integer_ring_rejects_fractions() {
        let text = r#"{
            "ring": "Z",
            "generators": [{"id": "a", "degree": 0}, {"id": "b", "degree": 1}],
            "operations": [{"order": 0, "entries": [{"from": "a", "to": "b", "coeff": "1/2"}]}]
        }"#;
        let InputDoc::Complex(doc) = parse_input(text).unwrap() else { panic!() };
        assert!(complex_from_doc(&doc).is_err());
    }
}
