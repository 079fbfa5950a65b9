// SPDX-License-Identifier: Apache-2.0

//! `lct`: command-line driver for logic condition tables.
//!
//! Exit status: 0 on success, 1 on findings, 2 on usage, I/O or backend
//! errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lct_core::analysis::shadowed_rows;
use lct_core::codegen::UnitInterface;
use lct_core::hdl::{parse_hdl_modules, ExtractOptions};
use lct_core::model::{ConditionHeader, Lct};
use lct_core::roundtrip::{
    render_report, Deterministic, RemoteChat, RoundTripConfig, TransformBackend, TransformKind,
    UnitReport,
};
use lct_core::simulate::{format_trace, parse_stimulus, InitMode, SeqState};
use lct_core::{
    check_completeness, check_overlap, compare, gen_structural, gen_unit_with, generate_fsm,
    hdl_to_lct, load_unit, parse_aliases, parse_connectivity, run_batch, run_trace, save_unit,
    serialize_unit, AliasMap, BitVector, GenOptions, Schema, Style, SymValue, Verdict,
    DEFAULT_ENUM_LIMIT,
};

#[derive(Parser)]
#[command(name = "lct", version, about = "Logic condition table toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Largest control space enumerated exhaustively.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUM_LIMIT)]
    enum_limit: u64,
    /// Treat overlapping rows with differing outputs as findings.
    #[arg(long, global = true)]
    strict_overlap: bool,
    /// Refuse remote backends.
    #[arg(long, global = true)]
    offline: bool,
    /// Directory for round-trip artifacts.
    #[arg(long, global = true)]
    run_dir: Option<PathBuf>,
    /// Emit one JSON record per finding instead of text.
    #[arg(long, global = true)]
    records: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a unit and report completeness and overlap.
    Check { manifest: PathBuf },
    /// Run a stimulus file through a unit.
    Sim {
        manifest: PathBuf,
        stimulus: PathBuf,
        /// Register values before the first cycle.
        #[arg(long, value_enum, default_value_t = Init::Zero)]
        init: Init,
    },
    /// Generate HDL for one or more units.
    Gen {
        #[arg(required = true)]
        manifests: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = StyleArg::IfChain)]
        style: StyleArg,
        #[arg(long)]
        async_reset: bool,
        /// Also emit a structural top module from this connectivity table.
        #[arg(long)]
        connectivity: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Recover a table from an HDL module.
    Extract {
        hdl: PathBuf,
        /// Take the column schema from this unit.
        #[arg(long, conflicts_with_all = ["conditions", "results"])]
        manifest: Option<PathBuf>,
        /// Comma-separated condition headers.
        #[arg(long, value_delimiter = ',', requires = "results")]
        conditions: Vec<String>,
        /// Comma-separated result names.
        #[arg(long, value_delimiter = ',')]
        results: Vec<String>,
        /// Index of the process to extract when several assign the results.
        #[arg(long)]
        process: Option<usize>,
        /// Directory receiving the unit manifest and CSV.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare two units.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// File of `a_name = b_name` lines.
        #[arg(long)]
        aliases: Option<PathBuf>,
    },
    /// Generate a synthetic FSM unit.
    Fsmgen {
        #[arg(long)]
        states: u64,
        #[arg(long)]
        conds: usize,
        #[arg(long)]
        outputs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory receiving the unit manifest and CSV.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the forward and inverse transforms and classify each unit.
    Roundtrip {
        #[arg(required = true)]
        manifests: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = BackendArg::Deterministic)]
        forward: BackendArg,
        #[arg(long, value_enum, default_value_t = BackendArg::Deterministic)]
        inverse: BackendArg,
        #[arg(long, value_enum, default_value_t = StyleArg::IfChain)]
        style: StyleArg,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Simulation suite for a unit, as `unit=stimulus-file`.
        #[arg(long = "sim", value_parser = parse_sim_arg)]
        sims: Vec<(String, PathBuf)>,
        #[arg(long)]
        aliases: Option<PathBuf>,
    },
    /// Render the verdicts stored in a run directory.
    Report { run_dir: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Zero,
    Unknown,
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    IfChain,
    CaseNested,
}

impl From<StyleArg> for Style {
    fn from(s: StyleArg) -> Self {
        match s {
            StyleArg::IfChain => Style::IfChain,
            StyleArg::CaseNested => Style::CaseNested,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Deterministic,
    Remote,
}

fn parse_sim_arg(s: &str) -> Result<(String, PathBuf), String> {
    let (unit, path) = s
        .split_once('=')
        .ok_or_else(|| format!("expected unit=file, got `{s}`"))?;
    Ok((unit.trim().to_string(), PathBuf::from(path.trim())))
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn put(text: &str) {
    let mut stdout = std::io::stdout().lock();
    if stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .is_err()
    {
        std::process::exit(0);
    }
}

/// Human or record output, chosen once per invocation.
struct Out {
    records: bool,
}

impl Out {
    fn text(&self, line: impl AsRef<str>) {
        if !self.records {
            put(&format!("{}\n", line.as_ref()));
        }
    }

    fn record(&self, v: Value) {
        if self.records {
            put(&format!("{v}\n"));
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Ok = 0,
    Findings = 1,
}

fn load(path: &Path) -> Result<Lct> {
    load_unit(path).with_context(|| format!("loading {}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            put(text);
            Ok(())
        }
    }
}

fn emit_unit(table: &Lct, output: Option<&Path>, out: &Out) -> Result<()> {
    match output {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path =
                save_unit(table, dir).with_context(|| format!("saving to {}", dir.display()))?;
            out.text(format!("wrote {}", path.display()));
            out.record(json!({"kind": "unit", "path": path}));
        }
        None => {
            let (manifest, csv) = serialize_unit(table)?;
            put(&format!("{manifest}\n{csv}"));
        }
    }
    Ok(())
}

fn load_aliases(path: Option<&Path>) -> Result<AliasMap> {
    match path {
        Some(p) => parse_aliases(&read(p)?).with_context(|| format!("parsing {}", p.display())),
        None => Ok(AliasMap::default()),
    }
}

fn check(g: &Global, out: &Out, path: &Path) -> Result<Status> {
    let t = load(path)?;
    let mut report = check_completeness(&t, g.enum_limit)?;
    report.shadowed_rows = shadowed_rows(&t, g.enum_limit)?;
    report.conflicts = check_overlap(&t, g.enum_limit)?.conflicts;

    out.text(format!(
        "{}: {} rows, {} clocking",
        path.display(),
        t.rows.len(),
        t.clocking
    ));
    for a in &report.uncovered {
        out.text(format!("uncovered: {a}"));
        out.record(json!({"kind": "uncovered", "unit": t.name, "assignment": assignment_json(a)}));
    }
    for r in &report.shadowed_rows {
        out.text(format!("shadowed: row {}", r + 1));
        out.record(json!({"kind": "shadowed", "unit": t.name, "row": r + 1}));
    }
    for c in &report.conflicts {
        let level = if g.strict_overlap { "error" } else { "warning" };
        out.text(format!(
            "overlap {level}: rows {} and {} differ at {}",
            c.first + 1,
            c.second + 1,
            c.witness
        ));
        out.record(json!({
            "kind": "overlap", "unit": t.name, "level": level,
            "rows": [c.first + 1, c.second + 1], "witness": assignment_json(&c.witness),
        }));
    }
    for w in &report.warnings {
        out.text(format!("warning: {w}"));
        out.record(json!({"kind": "warning", "unit": t.name, "message": w}));
    }
    if report.possibly_infeasible {
        out.text("note: expression columns were enumerated as free booleans; some uncovered entries may be unreachable");
    }
    let findings = !report.uncovered.is_empty()
        || !report.shadowed_rows.is_empty()
        || (g.strict_overlap && !report.conflicts.is_empty());
    out.text(format!(
        "summary: {} uncovered, {} shadowed, {} overlaps",
        report.uncovered.len(),
        report.shadowed_rows.len(),
        report.conflicts.len()
    ));
    Ok(if findings {
        Status::Findings
    } else {
        Status::Ok
    })
}

fn assignment_json(a: &lct_core::space::Assignment) -> Value {
    a.0.iter()
        .map(|(n, v)| (n.clone(), json!(v.value())))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn sim(out: &Out, manifest: &Path, stimulus: &Path, init: Init) -> Result<Status> {
    let t = load(manifest)?;
    let cycles = parse_stimulus(&read(stimulus)?, &t.ports)
        .with_context(|| format!("parsing {}", stimulus.display()))?;
    let mode = match init {
        Init::Zero => InitMode::Zero,
        Init::Unknown => InitMode::Unknown,
    };
    let inputs: Vec<_> = cycles.iter().map(|c| c.inputs.clone()).collect();
    let states = run_trace(&t, &inputs, &SeqState::initial(&t, mode))?;
    out.text(format_trace(&t, &states).trim_end());
    let mut status = Status::Ok;
    for (i, (cycle, state)) in cycles.iter().zip(&states).enumerate() {
        let values: serde_json::Map<_, _> = state
            .registers
            .iter()
            .map(|(k, v)| (k.clone(), json!(v.to_string())))
            .collect();
        out.record(json!({"kind": "cycle", "cycle": i, "outputs": values}));
        for (name, want) in &cycle.expected {
            let got = match state.get(name) {
                // Pass-through tokens resolve against the cycle's inputs.
                Some(SymValue::Token(t)) => match (cycle.inputs.get(t), want) {
                    (Some(v), SymValue::Known(w)) => {
                        SymValue::Known(BitVector::truncating(w.width(), v.value()))
                    }
                    _ => SymValue::Token(t.clone()),
                },
                Some(v) => v.clone(),
                None => SymValue::Unknown,
            };
            if &got != want {
                status = Status::Findings;
                out.text(format!(
                    "mismatch: cycle {i} {name} expected {want} got {got}"
                ));
                out.record(json!({
                    "kind": "mismatch", "cycle": i, "output": name,
                    "expected": want.to_string(), "got": got.to_string(),
                }));
            }
        }
    }
    Ok(status)
}

fn gen(
    manifests: &[PathBuf],
    opts: &GenOptions,
    connectivity: Option<&Path>,
    output: Option<&Path>,
) -> Result<Status> {
    let mut text = String::new();
    let mut units = BTreeMap::new();
    for m in manifests {
        let t = load(m)?;
        let (hdl, report) =
            gen_unit_with(&t, opts).with_context(|| format!("generating {}", m.display()))?;
        for r in &report.unreachable_rows {
            eprintln!("{}: row {} is unreachable", m.display(), r + 1);
        }
        text.push_str(&hdl);
        units.insert(t.name.clone(), UnitInterface::from(&t));
    }
    if let Some(c) = connectivity {
        let conn =
            parse_connectivity(&read(c)?).with_context(|| format!("parsing {}", c.display()))?;
        let top =
            gen_structural(&conn, &units).with_context(|| format!("wiring {}", c.display()))?;
        text.push('\n');
        text.push_str(&top);
    }
    write_or_print(output, &text)?;
    Ok(Status::Ok)
}

#[allow(clippy::too_many_arguments)]
fn extract(
    out: &Out,
    hdl: &Path,
    manifest: Option<&Path>,
    conditions: &[String],
    results: &[String],
    process: Option<usize>,
    output: Option<&Path>,
) -> Result<Status> {
    let schema = match manifest {
        Some(m) => Schema::of(&load(m)?),
        None if !results.is_empty() => {
            let conditions = conditions
                .iter()
                .map(|c| ConditionHeader::parse(c).map_err(|e| anyhow!("condition `{c}`: {e}")))
                .collect::<Result<Vec<_>>>()?;
            Schema::new(conditions, results.to_vec())
        }
        None => bail!("extract needs --manifest or --conditions with --results"),
    };
    let text = read(hdl)?;
    let modules = parse_hdl_modules(&text).with_context(|| format!("parsing {}", hdl.display()))?;
    let module = modules
        .first()
        .ok_or_else(|| anyhow!("{}: no module", hdl.display()))?;
    let x = hdl_to_lct(module, &schema, &ExtractOptions { process })
        .with_context(|| format!("extracting from {}", hdl.display()))?;
    for c in &x.appended_columns {
        eprintln!("{}: appended condition column `{c}`", hdl.display());
    }
    for n in &x.notes {
        eprintln!("{}: {n}", hdl.display());
    }
    emit_unit(&x.lct, output, out)?;
    Ok(Status::Ok)
}

fn equiv(g: &Global, out: &Out, a: &Path, b: &Path, aliases: Option<&Path>) -> Result<Status> {
    let (ta, tb) = (load(a)?, load(b)?);
    let aliases = load_aliases(aliases)?;
    let r = compare(&ta, &tb, &aliases, g.enum_limit)?;
    out.text(format!("verdict: {}", r.verdict));
    if !r.normalizations.is_empty() {
        let names: Vec<String> = r.normalizations.iter().map(|n| format!("{n:?}")).collect();
        out.text(format!("normalizations: {}", names.join(", ")));
    }
    if !r.missing_results.is_empty() {
        out.text(format!("missing results: {}", r.missing_results.join(", ")));
    }
    if let Some(cx) = &r.counterexample {
        out.text(format!("counterexample: {cx}"));
    }
    out.record(json!({"kind": "equivalence", "a": a, "b": b, "result": r}));
    Ok(match r.verdict {
        Verdict::TextuallyIdentical | Verdict::Equivalent => Status::Ok,
        Verdict::EquivalentOnSharedColumns | Verdict::NotEquivalent => Status::Findings,
    })
}

fn backend(
    g: &Global,
    which: BackendArg,
    kind: TransformKind,
    style: Style,
) -> Result<Box<dyn TransformBackend>> {
    match which {
        BackendArg::Deterministic => Ok(Box::new(Deterministic {
            options: GenOptions {
                style,
                async_reset: false,
            },
        })),
        BackendArg::Remote if g.offline => Err(lct_core::roundtrip::BackendError::Offline.into()),
        BackendArg::Remote => Ok(Box::new(RemoteChat::from_env(kind)?)),
    }
}

#[allow(clippy::too_many_arguments)]
fn roundtrip(
    g: &Global,
    out: &Out,
    manifests: &[PathBuf],
    forward: BackendArg,
    inverse: BackendArg,
    style: Style,
    workers: usize,
    sims: &[(String, PathBuf)],
    aliases: Option<&Path>,
) -> Result<Status> {
    let fwd = backend(g, forward, TransformKind::Forward, style)?;
    let inv = backend(g, inverse, TransformKind::Inverse, style)?;
    let units = manifests
        .iter()
        .map(|m| load(m))
        .collect::<Result<Vec<_>>>()?;
    let mut cfg = RoundTripConfig::new();
    cfg.enum_limit = g.enum_limit;
    cfg.run_dir = g.run_dir.clone();
    cfg.aliases = load_aliases(aliases)?;
    for (name, path) in sims {
        let unit = units
            .iter()
            .find(|u| &u.name == name)
            .ok_or_else(|| anyhow!("--sim names unknown unit `{name}`"))?;
        let suite = parse_stimulus(&read(path)?, &unit.ports)
            .with_context(|| format!("parsing {}", path.display()))?;
        cfg.sim_suites.insert(name.clone(), suite);
    }
    if let Some(dir) = &cfg.run_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let report = run_batch(&units, fwd.as_ref(), inv.as_ref(), &cfg, workers)?;
    for u in &report.units {
        out.text(format!(
            "{:<24} {:<8} {}",
            u.unit,
            u.outcome.label,
            equivalence_summary(u)
        ));
        for c in &u.outcome.caveats {
            out.text(format!("  caveat: {c}"));
        }
        out.record(json!({"kind": "unit", "report": u}));
    }
    for (unit, err) in &report.failures {
        eprintln!("{unit}: {err}");
        out.record(json!({"kind": "failure", "unit": unit, "error": err}));
    }
    let counts: Vec<String> = report
        .label_counts()
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    out.text(format!("summary: {}", counts.join(" ")));
    if !report.failures.is_empty() {
        bail!("{} unit(s) failed", report.failures.len());
    }
    let all_match = report.units.iter().all(|u| u.outcome.label.is_match());
    Ok(if all_match {
        Status::Ok
    } else {
        Status::Findings
    })
}

fn equivalence_summary(u: &UnitReport) -> String {
    match &u.equivalence {
        Some(r) => match &r.counterexample {
            Some(cx) => format!("{} ({cx})", r.verdict),
            None => r.verdict.to_string(),
        },
        None => "unavailable".to_string(),
    }
}

fn run(cli: Cli) -> Result<Status> {
    let g = &cli.global;
    let out = Out { records: g.records };
    match cli.command {
        Command::Check { manifest } => check(g, &out, &manifest),
        Command::Sim {
            manifest,
            stimulus,
            init,
        } => sim(&out, &manifest, &stimulus, init),
        Command::Gen {
            manifests,
            style,
            async_reset,
            connectivity,
            output,
        } => gen(
            &manifests,
            &GenOptions {
                style: style.into(),
                async_reset,
            },
            connectivity.as_deref(),
            output.as_deref(),
        ),
        Command::Extract {
            hdl,
            manifest,
            conditions,
            results,
            process,
            output,
        } => extract(
            &out,
            &hdl,
            manifest.as_deref(),
            &conditions,
            &results,
            process,
            output.as_deref(),
        ),
        Command::Equiv { a, b, aliases } => equiv(g, &out, &a, &b, aliases.as_deref()),
        Command::Fsmgen {
            states,
            conds,
            outputs,
            seed,
            output,
        } => {
            let t = generate_fsm(states, conds, outputs, seed)?;
            emit_unit(&t, output.as_deref(), &out)?;
            Ok(Status::Ok)
        }
        Command::Roundtrip {
            manifests,
            forward,
            inverse,
            style,
            workers,
            sims,
            aliases,
        } => roundtrip(
            g,
            &out,
            &manifests,
            forward,
            inverse,
            style.into(),
            workers,
            &sims,
            aliases.as_deref(),
        ),
        Command::Report { run_dir } => {
            out.text(render_report(&run_dir)?.trim_end());
            Ok(Status::Ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(s) => ExitCode::from(s as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
