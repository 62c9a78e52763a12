//! psh: exact cyclic homology of S1-complexes from the command line.
//!
//! Inputs are JSON documents (schema "psh/1"): raw complexes, orbit
//! catalogs (optionally with inclusions, making them stage systems), or
//! file-reference systems. Exit codes: 0 success, 1 verification failure
//! or golden mismatch, 2 malformed input.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use psh_core::builder::{attach_action_filtration, build_stage_complex_over, build_system_over};
use psh_core::filtration::degeneration_certificate;
use psh_core::json::{self, GroupDoc, InputDoc};
use psh_core::laurent::LaurentWindow;
use psh_core::telescope::{
    build_telescope, colimit_homology, telescope_cyclic, DirectSystem, TelescopeTail,
};
use psh_core::{cyclic_homology, Ring, S1Complex, VerifyOutcome};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "psh", version, about = "exact cyclic homology of S1-complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RingArg {
    #[value(alias = "Z")]
    Z,
    #[value(alias = "Q")]
    Q,
}

impl From<RingArg> for Ring {
    fn from(r: RingArg) -> Ring {
        match r {
            RingArg::Z => Ring::Z,
            RingArg::Q => Ring::Q,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Negative,
    Periodic,
    Quotient,
    Truncation,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TailArg {
    KeepQ,
    DropQ,
}

#[derive(Args)]
struct CommonArgs {
    /// Input document (complex, catalog or system JSON).
    input: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    output: OutputFormat,
    /// Golden report to compare against (structural comparison).
    #[arg(long)]
    golden: Option<PathBuf>,
    /// Also write the JSON report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DegreeArgs {
    /// Degree window LO..HI (mandatory; output must be finite).
    #[arg(long, allow_hyphen_values = true)]
    degrees: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structure relations of a complex or catalog stage.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// 1-based stage selector for catalogs (default: every stage).
        #[arg(long)]
        stage: Option<usize>,
    },
    /// Cochain homology of (C, delta_0) per degree.
    Homology {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        ring: RingArg,
        #[command(flatten)]
        degrees: DegreeArgs,
        #[arg(long)]
        stage: Option<usize>,
    },
    /// Cyclic homology in a Laurent window per degree.
    Cyclic {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// Truncation bounds M,N (u-powers N <= i < M), for --variant truncation.
        #[arg(long, allow_hyphen_values = true)]
        truncation: Option<String>,
        #[arg(long, value_enum)]
        ring: RingArg,
        #[command(flatten)]
        degrees: DegreeArgs,
        #[arg(long)]
        stage: Option<usize>,
    },
    /// Action-filtration spectral sequence and degeneration certificate.
    Spectral {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        ring: RingArg,
        #[command(flatten)]
        degrees: DegreeArgs,
        /// Highest page whose differentials are checked.
        #[arg(long, default_value_t = 3)]
        r_max: usize,
        #[arg(long)]
        stage: Option<usize>,
    },
    /// Cyclic homology of the N-stage mapping telescope.
    Telescope {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of stages to include.
        #[arg(long)]
        stages: usize,
        /// Last stage's q-part policy: keep-q is the quotient truncation,
        /// drop-q the subcomplex one.
        #[arg(long, value_enum, default_value = "keep-q")]
        tail: TailArg,
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long, allow_hyphen_values = true)]
        truncation: Option<String>,
        #[arg(long, value_enum)]
        ring: RingArg,
        #[command(flatten)]
        degrees: DegreeArgs,
    },
    /// Homology colimit over the periodic window with per-stage groups.
    Colimit {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        ring: RingArg,
        #[command(flatten)]
        degrees: DegreeArgs,
        #[arg(long)]
        max_stage: usize,
    },
}

fn input_label(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn parse_degrees(s: &str) -> Result<(i64, i64)> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| anyhow!("degree window must be LO..HI, got {s:?}"))?;
    let lo: i64 = lo.trim().parse().context("bad degree window low end")?;
    let hi: i64 = hi.trim().parse().context("bad degree window high end")?;
    if lo > hi {
        bail!("degree window [{lo}, {hi}] is empty");
    }
    Ok((lo, hi))
}

fn parse_window(variant: VariantArg, truncation: &Option<String>) -> Result<LaurentWindow> {
    Ok(match variant {
        VariantArg::Negative => LaurentWindow::Negative,
        VariantArg::Periodic => LaurentWindow::Periodic,
        VariantArg::Quotient => LaurentWindow::Quotient,
        VariantArg::Truncation => {
            let band = truncation
                .as_ref()
                .ok_or_else(|| anyhow!("--variant truncation requires --truncation M,N"))?;
            let (m, n) = band
                .split_once(',')
                .ok_or_else(|| anyhow!("--truncation must be M,N, got {band:?}"))?;
            let m: i64 = m.trim().parse().context("bad truncation upper bound")?;
            let n: i64 = n.trim().parse().context("bad truncation lower bound")?;
            LaurentWindow::truncation(m, n).map_err(|e| anyhow!(e.to_string()))?
        }
    })
}

/// Loaded input, normalized: a list of named complexes plus, when the
/// document carries enough data, the catalog stages and the built system.
struct LoadedInput {
    complexes: Vec<(String, S1Complex)>,
    stages: Option<psh_core::builder::StageSequence>,
    system: Option<DirectSystem>,
}

fn load_input(path: &Path, ring: Ring) -> Result<LoadedInput> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let doc = json::parse_input(&text)?;
    match doc {
        InputDoc::Complex(d) => {
            let c = json::complex_from_doc(&d)?;
            let c = c.to_ring(ring).map_err(|e| anyhow!(e.to_string()))?;
            Ok(LoadedInput { complexes: vec![("complex".into(), c)], stages: None, system: None })
        }
        InputDoc::Catalog(d) => {
            let seq = json::sequence_from_doc(&d)?;
            let complexes = seq
                .stages
                .iter()
                .enumerate()
                .map(|(i, s)| Ok((format!("stage {}", i + 1), build_stage_complex_over(s, ring)?)))
                .collect::<Result<Vec<_>>>()?;
            let system = if seq.inclusions.len() + 1 == seq.stages.len() && !seq.stages.is_empty() {
                Some(build_system_over(&seq, ring)?)
            } else {
                None
            };
            Ok(LoadedInput { complexes, stages: Some(seq), system })
        }
        InputDoc::FileSystem(d) => {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            let mut complexes = Vec::new();
            for (i, f) in d.stage_files.iter().enumerate() {
                let text = std::fs::read_to_string(base.join(f))
                    .with_context(|| format!("cannot read stage file {f}"))?;
                let InputDoc::Complex(cd) = json::parse_input(&text)? else {
                    bail!("stage file {f} is not a complex document");
                };
                let c =
                    json::complex_from_doc(&cd)?.to_ring(ring).map_err(|e| anyhow!(e.to_string()))?;
                complexes.push((format!("stage {}", i + 1), c));
            }
            let mut maps = Vec::new();
            for (i, f) in d.map_files.iter().enumerate() {
                let text = std::fs::read_to_string(base.join(f))
                    .with_context(|| format!("cannot read map file {f}"))?;
                let md: json::MapDoc = serde_json::from_str(&text)?;
                let map = json::map_from_doc(
                    &md,
                    complexes[i].1.clone(),
                    complexes
                        .get(i + 1)
                        .ok_or_else(|| anyhow!("map file {f} has no target stage"))?
                        .1
                        .clone(),
                )?;
                maps.push(map);
            }
            let system =
                DirectSystem::new(complexes.iter().map(|(_, c)| c.clone()).collect(), maps)
                    .map_err(|e| anyhow!(e.to_string()))?;
            Ok(LoadedInput { complexes, stages: None, system: Some(system) })
        }
    }
}

fn select_stage(input: &LoadedInput, stage: Option<usize>) -> Result<(&str, &S1Complex)> {
    if input.complexes.is_empty() {
        bail!("input contains no stages");
    }
    let idx = match stage {
        Some(s) if s >= 1 && s <= input.complexes.len() => s - 1,
        Some(s) => bail!("stage {s} out of range 1..={}", input.complexes.len()),
        None => input.complexes.len() - 1,
    };
    let (name, c) = &input.complexes[idx];
    Ok((name.as_str(), c))
}

#[derive(Serialize)]
struct DegreeGroupDoc {
    degree: i64,
    #[serde(flatten)]
    group: GroupDoc,
}

#[derive(Serialize)]
struct GroupsReport {
    schema: &'static str,
    command: String,
    input: String,
    ring: String,
    variant: String,
    degrees: (i64, i64),
    groups: Vec<DegreeGroupDoc>,
}

fn groups_report(
    command: &str,
    input_name: &str,
    ring: Ring,
    window: LaurentWindow,
    lo: i64,
    hi: i64,
    groups: &BTreeMap<i64, psh_core::AbelianGroupPresentation>,
) -> GroupsReport {
    GroupsReport {
        schema: json::SCHEMA,
        command: command.to_string(),
        input: input_name.to_string(),
        ring: ring.to_string(),
        variant: window.to_string(),
        degrees: (lo, hi),
        groups: groups
            .iter()
            .map(|(&degree, p)| DegreeGroupDoc { degree, group: GroupDoc::from(p) })
            .collect(),
    }
}

fn render_group_over(g: &GroupDoc, ring: &str) -> String {
    if g.free_rank == 0 && g.torsion.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    match g.free_rank {
        0 => {}
        1 => parts.push(ring.to_string()),
        r => parts.push(format!("{ring}^{r}")),
    }
    for t in &g.torsion {
        parts.push(format!("Z/{t}"));
    }
    parts.join(" + ")
}

fn print_groups_text(rep: &GroupsReport) {
    println!("{} of {} over {} ({} window)", rep.command, rep.input, rep.ring, rep.variant);
    println!("degree  group");
    for g in &rep.groups {
        println!("{:>6}  {}", g.degree, render_group_over(&g.group, &rep.ring));
    }
}

fn emit(common: &CommonArgs, report: &impl Serialize, text: impl FnOnce()) -> Result<String> {
    let json_text = serde_json::to_string_pretty(report)?;
    match common.output {
        OutputFormat::Json => println!("{json_text}"),
        OutputFormat::Text => text(),
    }
    if let Some(path) = &common.out {
        std::fs::write(path, format!("{json_text}\n"))
            .with_context(|| format!("cannot write report to {}", path.display()))?;
    }
    Ok(json_text)
}

/// Structural comparison against a golden report; differences are listed
/// by JSON path.
fn compare_golden(json_text: &str, golden: &Path) -> Result<bool> {
    let got: serde_json::Value = serde_json::from_str(json_text)?;
    let want: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(golden)
            .with_context(|| format!("cannot read golden {}", golden.display()))?,
    )?;
    let mut diffs = Vec::new();
    diff_values("$", &want, &got, &mut diffs);
    if diffs.is_empty() {
        println!("golden comparison: pass");
        Ok(true)
    } else {
        println!("golden comparison: FAIL ({} differences)", diffs.len());
        for d in diffs.iter().take(20) {
            println!("  {d}");
        }
        Ok(false)
    }
}

fn diff_values(path: &str, want: &serde_json::Value, got: &serde_json::Value, out: &mut Vec<String>) {
    use serde_json::Value;
    match (want, got) {
        (Value::Object(w), Value::Object(g)) => {
            for (k, wv) in w {
                match g.get(k) {
                    Some(gv) => diff_values(&format!("{path}.{k}"), wv, gv, out),
                    None => out.push(format!("{path}.{k}: missing in output")),
                }
            }
            for k in g.keys() {
                if !w.contains_key(k) {
                    out.push(format!("{path}.{k}: unexpected in output"));
                }
            }
        }
        (Value::Array(w), Value::Array(g)) => {
            if w.len() != g.len() {
                out.push(format!("{path}: length {} vs {}", w.len(), g.len()));
            }
            for (i, (wv, gv)) in w.iter().zip(g.iter()).enumerate() {
                diff_values(&format!("{path}[{i}]"), wv, gv, out);
            }
        }
        _ => {
            if want != got {
                out.push(format!("{path}: expected {want}, got {got}"));
            }
        }
    }
}

#[derive(Serialize)]
struct VerifyReport {
    schema: &'static str,
    command: &'static str,
    input: String,
    checks: Vec<VerifyCheck>,
    outcome: &'static str,
}

#[derive(Serialize)]
struct VerifyCheck {
    name: String,
    outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessDoc>,
}

#[derive(Serialize)]
struct WitnessDoc {
    k: usize,
    generator: String,
}

fn run_verify(common: &CommonArgs, stage: Option<usize>) -> Result<ExitCode> {
    let input = load_input(&common.input, Ring::Z)?;
    let mut checks = Vec::new();
    let mut all_pass = true;
    let selected: Vec<(String, &S1Complex)> = match stage {
        Some(s) => {
            let (name, c) = select_stage(&input, Some(s))?;
            vec![(name.to_string(), c)]
        }
        None => input.complexes.iter().map(|(n, c)| (n.clone(), c)).collect(),
    };
    for (name, c) in selected {
        let outcome = c.verify_structure().map_err(|e| anyhow!(e.to_string()))?;
        match outcome {
            VerifyOutcome::Pass => {
                checks.push(VerifyCheck { name, outcome: "pass".into(), witness: None })
            }
            VerifyOutcome::Fail { k, generator } => {
                all_pass = false;
                checks.push(VerifyCheck {
                    name,
                    outcome: "fail".into(),
                    witness: Some(WitnessDoc { k, generator }),
                });
            }
        }
    }
    // Catalog stages with thresholds: the action filtration must be
    // level-preserving entry by entry.
    if let Some(seq) = &input.stages {
        for (i, stage_data) in seq.stages.iter().enumerate() {
            if stage.is_some() && stage != Some(i + 1) {
                continue;
            }
            let Some(thresholds) = &stage_data.thresholds else { continue };
            let name = format!("filtration stage {}", i + 1);
            let built = build_stage_complex_over(stage_data, Ring::Z)?;
            match attach_action_filtration(&built, stage_data, thresholds) {
                Ok(_) => checks.push(VerifyCheck { name, outcome: "pass".into(), witness: None }),
                Err(e) => {
                    all_pass = false;
                    checks.push(VerifyCheck {
                        name: format!("{name} ({e})"),
                        outcome: "fail".into(),
                        witness: None,
                    });
                }
            }
        }
    }
    if stage.is_none() {
        if let Some(sys) = &input.system {
            for i in 0..sys.len().saturating_sub(1) {
                let outcome = sys.map(i).verify().map_err(|e| anyhow!(e.to_string()))?;
                let name = format!("continuation {} -> {}", i + 1, i + 2);
                match outcome {
                    VerifyOutcome::Pass => {
                        checks.push(VerifyCheck { name, outcome: "pass".into(), witness: None })
                    }
                    VerifyOutcome::Fail { k, generator } => {
                        all_pass = false;
                        checks.push(VerifyCheck {
                            name,
                            outcome: "fail".into(),
                            witness: Some(WitnessDoc { k, generator }),
                        });
                    }
                }
            }
        }
    }
    let report = VerifyReport {
        schema: json::SCHEMA,
        command: "verify",
        input: input_label(&common.input),
        outcome: if all_pass { "pass" } else { "fail" },
        checks,
    };
    let json_text = emit(common, &report, || {
        for c in &report.checks {
            match &c.witness {
                None => println!("{}: pass", c.name),
                Some(w) => println!("{}: FAIL at k={} on generator {:?}", c.name, w.k, w.generator),
            }
        }
    })?;
    let golden_ok = match &common.golden {
        Some(g) => compare_golden(&json_text, g)?,
        None => true,
    };
    Ok(if all_pass && golden_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn finish_groups(common: &CommonArgs, rep: &GroupsReport) -> Result<ExitCode> {
    let json_text = emit(common, rep, || print_groups_text(rep))?;
    let ok = match &common.golden {
        Some(g) => compare_golden(&json_text, g)?,
        None => true,
    };
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_cyclic(
    common: &CommonArgs,
    command: &str,
    window: LaurentWindow,
    ring: Ring,
    degrees: &DegreeArgs,
    stage: Option<usize>,
) -> Result<ExitCode> {
    let (lo, hi) = parse_degrees(&degrees.degrees)?;
    let input = load_input(&common.input, ring)?;
    let (name, c) = select_stage(&input, stage)?;
    let groups = cyclic_homology(c, window, lo, hi).map_err(|e| anyhow!(e.to_string()))?;
    let rep = groups_report(command, name, ring, window, lo, hi, &groups);
    finish_groups(common, &rep)
}

#[derive(Serialize)]
struct SpectralReport {
    schema: &'static str,
    command: &'static str,
    input: String,
    ring: String,
    degrees: (i64, i64),
    r_max: usize,
    pages: Vec<PageDoc>,
    certificate: String,
    rank_comparison: Vec<RankCompareDoc>,
    ranks_match: bool,
}

#[derive(Serialize)]
struct PageDoc {
    r: usize,
    differential_shift: (i64, i64),
    entries: Vec<PageEntryDoc>,
    d_nonzero: Vec<DNonzeroDoc>,
}

#[derive(Serialize)]
struct PageEntryDoc {
    p: usize,
    q: i64,
    #[serde(flatten)]
    group: GroupDoc,
}

#[derive(Serialize)]
struct DNonzeroDoc {
    from: (usize, i64),
    to: (usize, i64),
}

#[derive(Serialize)]
struct RankCompareDoc {
    degree: i64,
    e1_total_rank: usize,
    homology_rank: usize,
}

fn run_spectral(
    common: &CommonArgs,
    ring: Ring,
    degrees: &DegreeArgs,
    r_max: usize,
    stage: Option<usize>,
) -> Result<ExitCode> {
    let (lo, hi) = parse_degrees(&degrees.degrees)?;
    let input = load_input(&common.input, ring)?;
    let stages = input.stages.as_ref().ok_or_else(|| {
        anyhow!("spectral needs an orbit catalog input (filtration levels come from action thresholds)")
    })?;
    let idx = match stage {
        Some(s) if s >= 1 && s <= stages.stages.len() => s - 1,
        Some(s) => bail!("stage {s} out of range 1..={}", stages.stages.len()),
        None => stages.stages.len() - 1,
    };
    let stage_data = &stages.stages[idx];
    let thresholds = stage_data
        .thresholds
        .as_ref()
        .ok_or_else(|| anyhow!("stage {} carries no thresholds", idx + 1))?;
    let complex = build_stage_complex_over(stage_data, ring)?;
    let fc = attach_action_filtration(&complex, stage_data, thresholds)?;
    let window = LaurentWindow::Periodic;
    let mut pages = Vec::new();
    for r in 1..=r_max.max(1) {
        let page = psh_core::filtration::compute_page(&fc, window, lo, hi, r)
            .map_err(|e| anyhow!(e.to_string()))?;
        pages.push(PageDoc {
            r,
            differential_shift: page.differential_shift,
            entries: page
                .entries
                .iter()
                .map(|e| PageEntryDoc { p: e.p, q: e.q, group: GroupDoc::from(&e.group) })
                .collect(),
            d_nonzero: page
                .nonzero_differentials
                .iter()
                .map(|&(from, to)| DNonzeroDoc { from, to })
                .collect(),
        });
    }
    let cert =
        degeneration_certificate(&fc, window, lo, hi, r_max).map_err(|e| anyhow!(e.to_string()))?;
    let report = SpectralReport {
        schema: json::SCHEMA,
        command: "spectral",
        input: format!("stage {}", idx + 1),
        ring: ring.to_string(),
        degrees: (lo, hi),
        r_max,
        pages,
        certificate: if cert.degenerate {
            "degenerate_at_E1".into()
        } else {
            "nondegenerate".into()
        },
        rank_comparison: cert
            .rank_comparison
            .iter()
            .map(|(&degree, &(e1, h))| RankCompareDoc { degree, e1_total_rank: e1, homology_rank: h })
            .collect(),
        ranks_match: cert.ranks_match,
    };
    let json_text = emit(common, &report, || {
        println!("spectral sequence of {} over {}: {}", report.input, report.ring, report.certificate);
        for page in &report.pages {
            println!(
                "E_{} (d shift {:?}): {} nonzero spots, {} nonzero differentials",
                page.r,
                page.differential_shift,
                page.entries.len(),
                page.d_nonzero.len()
            );
            for e in &page.entries {
                println!(
                    "  E_{}^({},{}) = {}",
                    page.r,
                    e.p,
                    e.q,
                    render_group_over(&e.group, &report.ring)
                );
            }
        }
        println!("E_1 total ranks vs homology ranks per degree:");
        for rc in &report.rank_comparison {
            println!("  degree {:>3}: {} vs {}", rc.degree, rc.e1_total_rank, rc.homology_rank);
        }
    })?;
    let golden_ok = match &common.golden {
        Some(g) => compare_golden(&json_text, g)?,
        None => true,
    };
    Ok(if golden_ok && cert.ranks_match { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_telescope(
    common: &CommonArgs,
    stages: usize,
    tail: TailArg,
    window: LaurentWindow,
    ring: Ring,
    degrees: &DegreeArgs,
) -> Result<ExitCode> {
    let (lo, hi) = parse_degrees(&degrees.degrees)?;
    let input = load_input(&common.input, ring)?;
    let sys = input.system.as_ref().ok_or_else(|| {
        anyhow!("telescope needs a system input (catalog with inclusions, or stage/map files)")
    })?;
    let tail = match tail {
        TailArg::KeepQ => TelescopeTail::KeepLastQ,
        TailArg::DropQ => TelescopeTail::DropLastQ,
    };
    let tel = build_telescope(sys, stages, tail).map_err(|e| anyhow!(e.to_string()))?;
    let groups = telescope_cyclic(&tel, window, lo, hi).map_err(|e| anyhow!(e.to_string()))?;
    let mut rep = groups_report("telescope", "telescope", ring, window, lo, hi, &groups);
    rep.input = format!("{stages}-stage telescope");
    finish_groups(common, &rep)
}

#[derive(Serialize)]
struct ColimitReportDoc {
    schema: &'static str,
    command: &'static str,
    input: String,
    ring: String,
    variant: String,
    degrees: (i64, i64),
    max_stage: usize,
    per_degree: Vec<ColimitDegreeDoc>,
}

#[derive(Serialize)]
struct ColimitDegreeDoc {
    degree: i64,
    stage_groups: Vec<GroupDoc>,
    q_dims: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stabilized: Option<StabilizedDoc>,
}

#[derive(Serialize)]
struct StabilizedDoc {
    stage: usize,
    dim: usize,
}

fn run_colimit(
    common: &CommonArgs,
    ring: Ring,
    degrees: &DegreeArgs,
    max_stage: usize,
) -> Result<ExitCode> {
    if max_stage < 1 {
        bail!("--max-stage must be at least 1");
    }
    let (lo, hi) = parse_degrees(&degrees.degrees)?;
    let input = load_input(&common.input, ring)?;
    let sys = input.system.as_ref().ok_or_else(|| {
        anyhow!("colimit needs a system input (catalog with inclusions, or stage/map files)")
    })?;
    let res = colimit_homology(sys, LaurentWindow::Periodic, lo, hi, max_stage)
        .map_err(|e| anyhow!(e.to_string()))?;
    let report = ColimitReportDoc {
        schema: json::SCHEMA,
        command: "colimit",
        input: input_label(&common.input),
        ring: ring.to_string(),
        variant: LaurentWindow::Periodic.to_string(),
        degrees: (lo, hi),
        max_stage,
        per_degree: res
            .per_degree
            .iter()
            .map(|(&degree, d)| ColimitDegreeDoc {
                degree,
                stage_groups: d.stage_groups.iter().map(GroupDoc::from).collect(),
                q_dims: d.q_dims.clone(),
                stabilized: d.stabilized.map(|(stage, dim)| StabilizedDoc { stage: stage + 1, dim }),
            })
            .collect(),
    };
    let json_text = emit(common, &report, || {
        println!("colimit of {} over {} (periodic window)", report.input, report.ring);
        println!("degree  stabilized  dim  per-stage groups");
        for d in &report.per_degree {
            let (st, dim) = match &d.stabilized {
                Some(s) => (format!("stage {}", s.stage), s.dim.to_string()),
                None => ("NO".into(), "-".into()),
            };
            let groups: Vec<String> =
                d.stage_groups.iter().map(|g| render_group_over(g, &report.ring)).collect();
            println!("{:>6}  {:>10}  {:>3}  {}", d.degree, st, dim, groups.join(", "));
        }
    })?;
    let golden_ok = match &common.golden {
        Some(g) => compare_golden(&json_text, g)?,
        None => true,
    };
    let all_stable = report.per_degree.iter().all(|d| d.stabilized.is_some());
    Ok(if golden_ok && all_stable { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Verify { common, stage } => run_verify(common, *stage),
        Command::Homology { common, ring, degrees, stage } => run_cyclic(
            common,
            "homology",
            LaurentWindow::Truncation { m: 1, n: 0 },
            (*ring).into(),
            degrees,
            *stage,
        ),
        Command::Cyclic { common, variant, truncation, ring, degrees, stage } => {
            let window = parse_window(*variant, truncation)?;
            run_cyclic(common, "cyclic", window, (*ring).into(), degrees, *stage)
        }
        Command::Spectral { common, ring, degrees, r_max, stage } => {
            run_spectral(common, (*ring).into(), degrees, *r_max, *stage)
        }
        Command::Telescope { common, stages, tail, variant, truncation, ring, degrees } => {
            let window = parse_window(*variant, truncation)?;
            run_telescope(common, *stages, *tail, window, (*ring).into(), degrees)
        }
        Command::Colimit { common, ring, degrees, max_stage } => {
            run_colimit(common, (*ring).into(), degrees, *max_stage)
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when stdout closes early (e.g. piped into head).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
