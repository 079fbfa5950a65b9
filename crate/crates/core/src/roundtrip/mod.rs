// SPDX-License-Identifier: Apache-2.0

//! The closed loop: table to HDL through one backend, HDL back to a table
//! through another, then comparison, simulation and classification.

pub mod backend;
pub mod classify;
pub mod prompt;
pub mod remote;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::equivalence::{align, compare, textual_match, AliasMap, EquivResult, Verdict};
use crate::hdl::{hdl_to_lct, parse_hdl, ExtractOptions, HdlModule, ProcessKind, Schema};
use crate::model::{validate_lct, Clocking, Lct, PortMap};
use crate::simulate::{eval_symbolic, run_trace, Cycle, InitMode, Inputs, SeqState, SymValue};
use crate::space::DEFAULT_ENUM_LIMIT;
use crate::table_io::{parse_table_csv, save_unit, Manifest};

pub use backend::{
    apply_fault, BackendError, Deterministic, Fault, FaultInjecting, TransformBackend,
};
pub use classify::{
    classify_outcome, ArbiterVerdict, Evidence, Label, Outcome, Semantic, SimVerdict,
};
pub use prompt::{
    build_forward_prompt, build_inverse_prompt, TransformKind, TransformRequest, TransformResponse,
};
pub use remote::RemoteChat;

#[derive(Debug, Error)]
pub enum RoundTripError {
    #[error("unit `{unit}` is invalid: {message}")]
    InvalidUnit { unit: String, message: String },
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Default)]
pub struct RoundTripConfig {
    /// Artifacts go to `run_dir/<unit>/` when set.
    pub run_dir: Option<PathBuf>,
    pub aliases: AliasMap,
    pub enum_limit: u64,
    /// Stimulus per unit name; units without one have no simulation
    /// evidence.
    pub sim_suites: BTreeMap<String, Vec<Cycle>>,
}

impl RoundTripConfig {
    pub fn new() -> Self {
        Self {
            enum_limit: DEFAULT_ENUM_LIMIT,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitReport {
    pub unit: String,
    pub outcome: Outcome,
    /// Original against reconstruction.
    pub equivalence: Option<EquivResult>,
    /// Original against the deterministic re-extraction of the forward HDL.
    pub arbiter: Option<EquivResult>,
    pub forward_backend: String,
    pub inverse_backend: String,
    /// sha256 of the source unit, forward HDL and reconstructed CSV.
    pub digests: BTreeMap<String, String>,
    pub timings_ms: BTreeMap<String, u64>,
    /// Evidence that could not be gathered, with reasons.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundTripReport {
    pub forward_backend: String,
    pub inverse_backend: String,
    pub units: Vec<UnitReport>,
    /// Units whose loop aborted, with the error.
    pub failures: Vec<(String, String)>,
}

impl RoundTripReport {
    pub fn label_counts(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for u in &self.units {
            *m.entry(u.outcome.label.to_string()).or_insert(0) += 1;
        }
        m
    }
}

fn sha(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn clock_of(module: &HdlModule) -> (Clocking, Option<String>) {
    for p in &module.processes {
        if let ProcessKind::Clocked { edges } = &p.kind {
            return (Clocking::Clocked, edges.first().map(|e| e.signal.clone()));
        }
    }
    (Clocking::Combinational, None)
}

/// Parses an inverse-transform CSV into a table. Ports and clocking come
/// from the forward HDL when it parses, else from the original unit.
pub fn parse_reconstruction(csv_text: &str, original: &Lct, hdl: &str) -> Result<Lct, String> {
    let (ports, clocking) = match parse_hdl(hdl) {
        Ok(m) => {
            let (clocking, clock) = clock_of(&m);
            let mut ports = PortMap::default();
            for p in &m.ports.entries {
                if Some(&p.name) != clock.as_ref() {
                    ports.push(p.direction, &p.name, p.width);
                }
            }
            (ports, clocking)
        }
        Err(_) => (original.ports.clone(), original.clocking),
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());
    let header = reader
        .records()
        .next()
        .ok_or("reconstruction is empty")?
        .map_err(|e| e.to_string())?;
    let mut names: Vec<&str> = header.iter().collect();
    if names
        .first()
        .is_some_and(|n| n.eq_ignore_ascii_case("case"))
    {
        names.remove(0);
    }
    if names
        .last()
        .is_some_and(|n| n.eq_ignore_ascii_case("comments"))
    {
        names.pop();
    }
    let is_result = |n: &str| {
        original.results.iter().any(|r| r.eq_ignore_ascii_case(n))
            || ports
                .get(n)
                .is_some_and(|p| p.direction == crate::model::Direction::Output)
    };
    let outputs = names.iter().filter(|n| is_result(n)).count();
    let feedback = original
        .feedback
        .iter()
        .filter(|f| ports.get(&f.result).is_some() && ports.get(&f.condition).is_some())
        .cloned()
        .collect();
    let manifest = Manifest {
        name: original.name.clone(),
        clocking,
        inputs: names.len() - outputs,
        outputs,
        ports,
        feedback,
        table_path: None,
    };
    parse_table_csv(&manifest, csv_text).map_err(|e| e.to_string())
}

fn settle(v: &SymValue, clocking: Clocking, width: u32) -> SymValue {
    match v {
        SymValue::Unspecified if clocking == Clocking::Combinational => {
            SymValue::Known(crate::bitvec::BitVector::zero(width))
        }
        SymValue::Known(bv) => SymValue::Known(bv.resize(width)),
        other => other.clone(),
    }
}

/// Runs `suite` on `candidate` and checks each cycle's outputs against the
/// cycle's expected values, or against `golden` where none are given.
pub fn simulate_suite(
    golden: &Lct,
    candidate: &Lct,
    suite: &[Cycle],
) -> Result<SimVerdict, String> {
    let stimulus: Vec<Inputs> = suite.iter().map(|c| c.inputs.clone()).collect();
    let trace = |t: &Lct| -> Result<Vec<SeqState>, String> {
        match t.clocking {
            Clocking::Clocked => run_trace(t, &stimulus, &SeqState::initial(t, InitMode::Zero))
                .map_err(|e| e.to_string()),
            Clocking::Combinational => stimulus
                .iter()
                .map(|i| {
                    eval_symbolic(t, i)
                        .map(|ev| SeqState {
                            registers: ev
                                .outputs
                                .iter()
                                .enumerate()
                                .map(|(k, (n, v))| {
                                    (n.clone(), settle(v, t.clocking, t.result_width(k)))
                                })
                                .collect(),
                        })
                        .map_err(|e| e.to_string())
                })
                .collect(),
        }
    };
    let expected = trace(golden)?;
    let actual = match trace(candidate) {
        Ok(a) => a,
        Err(_) => return Ok(SimVerdict::Fail),
    };
    for (i, cycle) in suite.iter().enumerate() {
        let checks: Vec<(String, SymValue)> = if cycle.expected.is_empty() {
            expected[i]
                .registers
                .iter()
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect()
        } else {
            cycle.expected.clone()
        };
        for (name, want) in checks {
            let width = candidate.ports.width_of(&name).unwrap_or(64);
            let got = actual[i]
                .get(&name)
                .map(|v| settle(v, candidate.clocking, width));
            let want = match want {
                SymValue::Known(bv) => SymValue::Known(bv.resize(width)),
                other => other,
            };
            if got.as_ref() != Some(&want) {
                return Ok(SimVerdict::Fail);
            }
        }
    }
    Ok(SimVerdict::Pass)
}

/// Deterministic re-extraction of the forward HDL.
pub fn arbiter_table(original: &Lct, hdl: &str) -> Result<Lct, String> {
    let module = parse_hdl(hdl).map_err(|e| e.to_string())?;
    let schema = backend::schema_for_module(&Schema::of(original), &module.ports);
    hdl_to_lct(&module, &schema, &ExtractOptions::default())
        .map(|x| x.lct)
        .map_err(|e| e.to_string())
}

struct Artifacts {
    dir: Option<PathBuf>,
}

impl Artifacts {
    fn write(&self, name: &str, text: &str) -> Result<(), RoundTripError> {
        if let Some(dir) = &self.dir {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|source| RoundTripError::Io { path, source })?;
        }
        Ok(())
    }
}

/// One pass of the loop for `unit`.
pub fn run_roundtrip(
    unit: &Lct,
    fwd: &dyn TransformBackend,
    inv: &dyn TransformBackend,
    cfg: &RoundTripConfig,
) -> Result<UnitReport, RoundTripError> {
    let start = Instant::now();
    let invalid = |message: String| RoundTripError::InvalidUnit {
        unit: unit.name.clone(),
        message,
    };
    let violations = validate_lct(unit);
    if !violations.is_empty() {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(invalid(msgs.join("; ")));
    }
    let dir = cfg.run_dir.as_ref().map(|d| d.join(&unit.name));
    if let Some(d) = &dir {
        fs::create_dir_all(d).map_err(|source| RoundTripError::Io {
            path: d.clone(),
            source,
        })?;
    }
    let art = Artifacts { dir: dir.clone() };
    let enum_limit = if cfg.enum_limit == 0 {
        DEFAULT_ENUM_LIMIT
    } else {
        cfg.enum_limit
    };
    let mut timings = BTreeMap::new();
    let mut digests = BTreeMap::new();
    let mut notes = Vec::new();
    digests.insert("source".to_string(), crate::codegen::unit_digest(unit));

    let t = Instant::now();
    let fwd_req =
        build_forward_prompt(unit).map_err(|v| invalid(format!("{} violations", v.len())))?;
    art.write("forward_prompt.txt", &fwd_req.prompt)?;
    let fwd_resp = fwd.complete(&fwd_req)?;
    art.write("forward_response.txt", &fwd_resp.raw)?;
    let hdl = fwd_resp.artifact.clone();
    art.write(&format!("{}.v", unit.name), &hdl)?;
    digests.insert("forward_hdl".to_string(), sha(&hdl));
    timings.insert("forward".to_string(), ms(t));

    let t = Instant::now();
    let inv_req = build_inverse_prompt(&unit.name, &hdl, &Schema::of(unit));
    art.write("inverse_prompt.txt", &inv_req.prompt)?;
    let inv_resp = inv.complete(&inv_req)?;
    art.write("inverse_response.txt", &inv_resp.raw)?;
    digests.insert("reconstructed_csv".to_string(), sha(&inv_resp.artifact));
    timings.insert("inverse".to_string(), ms(t));

    let t = Instant::now();
    let reconstructed = parse_reconstruction(&inv_resp.artifact, unit, &hdl);
    let (textual, semantic, equivalence) = match &reconstructed {
        Ok(rec) => {
            if let Some(d) = &dir {
                save_unit(rec, d).map_err(|e| RoundTripError::Io {
                    path: d.clone(),
                    source: std::io::Error::other(e.to_string()),
                })?;
            }
            let textual = align(unit, rec, &cfg.aliases)
                .map(|(a, b)| textual_match(&a, &b))
                .unwrap_or(false);
            match compare(unit, rec, &cfg.aliases, enum_limit) {
                Ok(r) => {
                    let s = match r.verdict {
                        Verdict::TextuallyIdentical | Verdict::Equivalent => Semantic::Equivalent,
                        Verdict::EquivalentOnSharedColumns => Semantic::EquivalentOnShared,
                        Verdict::NotEquivalent => Semantic::NotEquivalent,
                    };
                    (textual, s, Some(r))
                }
                Err(e) => {
                    notes.push(format!("comparison unavailable: {e}"));
                    (textual, Semantic::Unavailable, None)
                }
            }
        }
        Err(e) => {
            notes.push(format!("reconstruction unparseable: {e}"));
            (false, Semantic::Unavailable, None)
        }
    };
    timings.insert("compare".to_string(), ms(t));

    let t = Instant::now();
    let arbiter_lct = arbiter_table(unit, &hdl);
    let (arbiter, arbiter_result) = match &arbiter_lct {
        Ok(a) => match compare(unit, a, &AliasMap::default(), enum_limit) {
            Ok(r) if r.is_equivalent() => (ArbiterVerdict::Matches, Some(r)),
            Ok(r) => (ArbiterVerdict::Differs, Some(r)),
            Err(e) => {
                notes.push(format!("arbiter comparison unavailable: {e}"));
                (ArbiterVerdict::Unavailable, None)
            }
        },
        Err(e) => {
            notes.push(format!("arbiter could not extract the forward HDL: {e}"));
            (ArbiterVerdict::Unavailable, None)
        }
    };
    let sim = match (cfg.sim_suites.get(&unit.name), &arbiter_lct) {
        (Some(suite), Ok(a)) => match simulate_suite(unit, a, suite) {
            Ok(v) => v,
            Err(e) => {
                notes.push(format!("golden simulation failed: {e}"));
                SimVerdict::Unavailable
            }
        },
        _ => SimVerdict::Unavailable,
    };
    timings.insert("arbiter_and_sim".to_string(), ms(t));

    let outcome = classify_outcome(&Evidence {
        textual_match: textual,
        semantic,
        sim,
        arbiter,
    });
    timings.insert("total".to_string(), ms(start));
    let report = UnitReport {
        unit: unit.name.clone(),
        outcome,
        equivalence,
        arbiter: arbiter_result,
        forward_backend: fwd_resp.backend,
        inverse_backend: inv_resp.backend,
        digests,
        timings_ms: timings,
        notes,
    };
    art.write(
        "verdict.json",
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    Ok(report)
}

/// Runs every unit on a pool of `workers` threads; results keep input
/// order.
pub fn run_batch(
    units: &[Lct],
    fwd: &dyn TransformBackend,
    inv: &dyn TransformBackend,
    cfg: &RoundTripConfig,
    workers: usize,
) -> Result<RoundTripReport, RoundTripError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| RoundTripError::Pool(e.to_string()))?;
    let results: Vec<Result<UnitReport, RoundTripError>> = pool.install(|| {
        units
            .par_iter()
            .map(|u| run_roundtrip(u, fwd, inv, cfg))
            .collect()
    });
    let mut report = RoundTripReport {
        forward_backend: fwd.id(),
        inverse_backend: inv.id(),
        units: Vec::new(),
        failures: Vec::new(),
    };
    for (u, r) in units.iter().zip(results) {
        match r {
            Ok(r) => report.units.push(r),
            Err(e) => report.failures.push((u.name.clone(), e.to_string())),
        }
    }
    if let Some(dir) = &cfg.run_dir {
        let path = dir.join("report.json");
        fs::write(
            &path,
            serde_json::to_string_pretty(&report).expect("report serializes"),
        )
        .map_err(|source| RoundTripError::Io { path, source })?;
    }
    Ok(report)
}

/// Renders the verdict records under a run directory as a text table.
pub fn render_report(run_dir: &Path) -> Result<String, RoundTripError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RoundTripError::Io { path, source }
    };
    let mut entries: Vec<PathBuf> = fs::read_dir(run_dir)
        .map_err(io(run_dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("verdict.json").is_file())
        .collect();
    entries.sort();
    let mut out = String::new();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for dir in entries {
        let path = dir.join("verdict.json");
        let text = fs::read_to_string(&path).map_err(io(&path))?;
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| RoundTripError::Io {
            path: path.clone(),
            source: std::io::Error::other(e),
        })?;
        let label = v["outcome"]["label"].as_str().unwrap_or("?").to_string();
        let verdict = v["equivalence"]["verdict"]
            .as_str()
            .unwrap_or("unavailable");
        out.push_str(&format!(
            "{:<24} {:<8} {:<28} fwd={} inv={}\n",
            v["unit"].as_str().unwrap_or("?"),
            label,
            verdict,
            v["forward_backend"].as_str().unwrap_or("?"),
            v["inverse_backend"].as_str().unwrap_or("?"),
        ));
        if let Some(cx) = v["equivalence"]["counterexample"].as_object() {
            out.push_str(&format!(
                "    counterexample: {} at {}\n",
                cx.get("output").and_then(|o| o.as_str()).unwrap_or("?"),
                cx.get("assignment")
                    .map(|a| a.to_string())
                    .unwrap_or_default()
            ));
        }
        *counts.entry(label).or_insert(0) += 1;
    }
    let summary: Vec<String> = counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
    out.push_str(&format!("summary: {}\n", summary.join(" ")));
    Ok(out)
}
