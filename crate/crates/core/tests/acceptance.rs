// SPDX-License-Identifier: Apache-2.0

//! Acceptance gate. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero when any criterion fails. Runs without network access; the
//! remote smoke test runs only when `LCT_API_BASE` is set.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use lct_core::bundled;
use lct_core::equivalence::replay;
use lct_core::model::{CaseRow, CellValue, Clocking, Lct};
use lct_core::roundtrip::{
    run_roundtrip, Deterministic, Fault, FaultInjecting, Label, RemoteChat, RoundTripConfig,
    TransformKind,
};
use lct_core::simulate::{eval_comb, run_trace, InitMode, Inputs, SeqState};
use lct_core::table_io::{parse_unit, serialize_csv, serialize_manifest};
use lct_core::{
    check_completeness, compare, expand_dont_cares, gen_unit_with, generate_fsm, hdl_to_lct,
    parse_hdl, AliasMap, BitVector, GenOptions, Schema, Style, SymValue, Verdict,
    DEFAULT_ENUM_LIMIT,
};
use rand::Rng;

const C1_RANDOM_UNITS: u64 = 50;
const C1_TIME_LIMIT: Duration = Duration::from_secs(60);
const C2_MIN_CELLS: usize = 2000;
const C2_UNIT_TIME_LIMIT: Duration = Duration::from_secs(10);
const C2_SHAPES: [(u64, usize, usize); 2] = [(32, 5, 8), (64, 8, 8)];
const C5_RANDOM_TABLES: u64 = 128;
const C6_MUTATIONS: usize = 256;
const C8_TIME_LIMIT: Duration = Duration::from_secs(300);
/// Seeds disjoint from those the property tests draw.
const SEED_BASE: u64 = 0x5eed_0000;

struct Gate {
    failed: bool,
}

impl Gate {
    fn report(&mut self, id: &str, ok: bool, detail: String) {
        println!(
            "criterion {id}: {} {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        self.failed |= !ok;
    }
}

fn equiv(a: &Lct, b: &Lct) -> Verdict {
    compare(a, b, &AliasMap::default(), DEFAULT_ENUM_LIMIT)
        .map(|r| r.verdict)
        .unwrap_or(Verdict::NotEquivalent)
}

fn is_equiv(v: Verdict) -> bool {
    matches!(v, Verdict::Equivalent | Verdict::TextuallyIdentical)
}

/// gen, then parse and extract with the original's schema, then compare.
fn round_trip(t: &Lct, style: Style) -> Result<Verdict, String> {
    let (hdl, _) = gen_unit_with(
        t,
        &GenOptions {
            style,
            async_reset: false,
        },
    )
    .map_err(|e| e.to_string())?;
    let module = parse_hdl(&hdl).map_err(|e| e.to_string())?;
    let x = hdl_to_lct(&module, &Schema::of(t), &Default::default()).map_err(|e| e.to_string())?;
    compare(t, &x.lct, &AliasMap::default(), DEFAULT_ENUM_LIMIT)
        .map(|r| r.verdict)
        .map_err(|e| e.to_string())
}

fn criterion1(g: &mut Gate) {
    let start = Instant::now();
    let mut units = vec![bundled::table1(), bundled::table2(), bundled::table3()];
    units.extend((0..C1_RANDOM_UNITS).map(|i| random_table(SEED_BASE + i, GenConfig::default())));
    let clocked = units
        .iter()
        .filter(|u| u.clocking == Clocking::Clocked)
        .count();
    let max_bits = units.iter().map(control_bits).max().unwrap_or(0);
    let mut failures = Vec::new();
    for u in &units {
        for style in [Style::IfChain, Style::CaseNested] {
            match round_trip(u, style) {
                Ok(v) if is_equiv(v) => {}
                other => failures.push(format!("{}/{style:?}: {other:?}", u.name)),
            }
        }
    }
    let elapsed = start.elapsed();
    g.report(
        "1",
        failures.is_empty() && elapsed < C1_TIME_LIMIT && max_bits <= MAX_CONTROL_BITS,
        format!(
            "round-trip identity: {}/{} units equivalent in both styles ({clocked} clocked, max {max_bits} control bits), {:.2}s (limit {}s) {}",
            units.len() - failures.len(),
            units.len(),
            elapsed.as_secs_f64(),
            C1_TIME_LIMIT.as_secs(),
            failures.join("; ")
        ),
    );
}

fn criterion2(g: &mut Gate) {
    let mut details = Vec::new();
    let mut ok = true;
    for (states, conds, outputs) in C2_SHAPES {
        let t = generate_fsm(states, conds, outputs, 1).expect("fsm parameters are valid");
        let start = Instant::now();
        let v = round_trip(&t, Style::IfChain);
        let elapsed = start.elapsed();
        let cells = t.cell_count();
        let pass = matches!(v, Ok(v) if is_equiv(v))
            && cells >= C2_MIN_CELLS
            && elapsed < C2_UNIT_TIME_LIMIT;
        ok &= pass;
        details.push(format!(
            "{} {cells} cells {:?} in {:.2}s",
            t.name,
            v,
            elapsed.as_secs_f64()
        ));
    }
    g.report(
        "2",
        ok,
        format!(
            "scale (>= {C2_MIN_CELLS} cells, < {}s each): {}",
            C2_UNIT_TIME_LIMIT.as_secs(),
            details.join(", ")
        ),
    );
}

fn inputs(pairs: &[(&str, u32, u64)]) -> Inputs {
    pairs
        .iter()
        .map(|(n, w, v)| (n.to_string(), BitVector::truncating(*w, *v)))
        .collect()
}

fn known(w: u32, v: u64) -> SymValue {
    SymValue::Known(BitVector::truncating(w, v))
}

fn token(s: &str) -> SymValue {
    SymValue::Token(s.to_string())
}

fn criterion3(g: &mut Gate) {
    let mut errors = Vec::new();

    // 4-input multiplexer: every (enable, select) pair.
    let t1 = bundled::table1();
    for enable in 0..2u64 {
        for select in 0..4u64 {
            let want = if enable == 0 {
                known(8, 0)
            } else {
                token(&format!("data{select}"))
            };
            let got = eval_comb(
                &t1,
                &inputs(&[("enable", 1, enable), ("select", 2, select)]),
            )
            .map(|e| e.get("data_out").cloned());
            if got != Ok(Some(want.clone())) {
                errors.push(format!(
                    "mux4 enable={enable} select={select}: {got:?} != {want:?}"
                ));
            }
        }
    }

    // Registered multiplexer: reset, select 1, backpressure hold, select 0,
    // no input.
    let t2 = bundled::table2();
    let stim = [
        inputs(&[
            ("rst_n", 1, 0),
            ("ready", 1, 1),
            ("valid_in", 1, 1),
            ("select", 1, 1),
        ]),
        inputs(&[
            ("rst_n", 1, 1),
            ("ready", 1, 1),
            ("valid_in", 1, 1),
            ("select", 1, 1),
        ]),
        inputs(&[
            ("rst_n", 1, 1),
            ("ready", 1, 0),
            ("valid_in", 1, 1),
            ("select", 1, 0),
        ]),
        inputs(&[
            ("rst_n", 1, 1),
            ("ready", 1, 1),
            ("valid_in", 1, 1),
            ("select", 1, 0),
        ]),
        inputs(&[
            ("rst_n", 1, 1),
            ("ready", 1, 1),
            ("valid_in", 1, 0),
            ("select", 1, 0),
        ]),
    ];
    let want = [
        (known(1, 0), known(8, 0)),
        (known(1, 1), token("data1")),
        (known(1, 1), token("data1")),
        (known(1, 1), token("data0")),
        (known(1, 0), known(8, 0)),
    ];
    match run_trace(&t2, &stim, &SeqState::initial(&t2, InitMode::Unknown)) {
        Ok(states) => {
            for (i, (s, (v, d))) in states.iter().zip(&want).enumerate() {
                if s.get("valid_out") != Some(v) || s.get("data_out") != Some(d) {
                    errors.push(format!("regmux2 cycle {i}: {:?}", s.registers));
                }
            }
        }
        Err(e) => errors.push(format!("regmux2: {e}")),
    }

    // Four-state machine: reset, then cond1 from state 0, then cond0 from
    // state 2; `state` is driven only through feedback.
    let t3 = bundled::table3();
    let stim = [
        inputs(&[("rst_n", 1, 0), ("cond0", 1, 0), ("cond1", 1, 0)]),
        inputs(&[("rst_n", 1, 1), ("cond0", 1, 0), ("cond1", 1, 1)]),
        inputs(&[("rst_n", 1, 1), ("cond0", 1, 1), ("cond1", 1, 0)]),
        inputs(&[("rst_n", 1, 1), ("cond0", 1, 0), ("cond1", 1, 0)]),
    ];
    let want: [(u64, [u64; 3]); 4] = [
        (0, [0, 0, 0]),
        (2, [1, 0, 0]),
        (3, [0, 1, 1]),
        (3, [0, 1, 1]),
    ];
    match run_trace(&t3, &stim, &SeqState::initial(&t3, InitMode::Unknown)) {
        Ok(states) => {
            for (i, (s, (next, outs))) in states.iter().zip(&want).enumerate() {
                let ok = s.get("next_state") == Some(&known(2, *next))
                    && ["out0", "out1", "out2"]
                        .iter()
                        .zip(outs)
                        .all(|(n, v)| s.get(n) == Some(&known(1, *v)));
                if !ok {
                    errors.push(format!("fsm4 cycle {i}: {:?}", s.registers));
                }
            }
        }
        Err(e) => errors.push(format!("fsm4: {e}")),
    }

    g.report(
        "3",
        errors.is_empty(),
        format!(
            "simulator fidelity: mux4 8/8 assignments, regmux2 reset/select/backpressure-hold, fsm4 states 0->2->3 {}",
            errors.join("; ")
        ),
    );
}

fn criterion4(g: &mut Gate) {
    let t = bundled::table3();
    let (ok, detail) = match check_completeness(&t, DEFAULT_ENUM_LIMIT) {
        Ok(r) => {
            let mut states: Vec<u64> = r
                .uncovered
                .iter()
                .filter(|a| {
                    a.get("rst_n").map(|v| v.value()) == Some(1)
                        && a.get("cond0").map(|v| v.value()) == Some(1)
                        && a.get("cond1").map(|v| v.value()) == Some(1)
                })
                .filter_map(|a| a.get("state").map(|v| v.value()))
                .collect();
            states.sort_unstable();
            (
                r.uncovered.len() == 4 && states == [0, 1, 2, 3],
                format!(
                    "{} uncovered: {}",
                    r.uncovered.len(),
                    r.uncovered
                        .iter()
                        .map(|a| a.to_string())
                        .collect::<Vec<_>>()
                        .join(" | ")
                ),
            )
        }
        Err(e) => (false, e.to_string()),
    };
    g.report("4", ok, format!("completeness detection on fsm4: {detail}"));
}

/// A combinational unit with one 3-bit column, spelled two ways.
fn literal_pair() -> (Lct, Lct) {
    let manifest = "unit lit\nclocking combinational\ninputs 1\noutputs 1\nport input sel 3\nport output y 4\n";
    let a = parse_unit(manifest, "sel,y\n3'd5,4'd9\n2,1\nX,0\n").unwrap();
    let b = parse_unit(manifest, "sel,y\n3'b101,4'b1001\n3'h2,4'h1\nX,4'b0000\n").unwrap();
    (a, b)
}

fn normalized_variants(t: &Lct, seed: u64) -> Vec<(&'static str, Lct)> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    let order = shuffled(&mut r, t.rows.len());
    let mut rows = t.clone();
    rows.rows = order.iter().map(|i| t.rows[*i].clone()).collect();
    out.push(("row permutation", rows));
    let cols = shuffled(&mut r, t.conditions.len());
    let res = shuffled(&mut r, t.results.len());
    out.push((
        "column permutation",
        permute_results(&permute_columns(t, &cols), &res),
    ));
    out.push((
        "don't-care expansion",
        expand_dont_cares(t, None, 1 << 14).unwrap(),
    ));
    let csv = respelled_csv(&mut r, t);
    out.push((
        "literal rewriting",
        parse_unit(&serialize_manifest(t), &csv).unwrap(),
    ));
    let mut shadow = t.clone();
    let mut copy = t.rows[r.random_range(0..t.rows.len())].clone();
    for (i, c) in copy.outputs.iter_mut().enumerate() {
        *c = CellValue::constant(t.result_width(i), r.random_range(0..2));
    }
    shadow.rows.push(copy);
    out.push(("shadowed default", shadow));
    out
}

fn criterion5(g: &mut Gate) {
    let mut errors = Vec::new();
    let mut fixed = 0;

    let (a, b) = literal_pair();
    fixed += 1;
    if !is_equiv(equiv(&a, &b)) || serialize_csv(&a) != serialize_csv(&b) {
        errors.push("fixed 3'd5 vs 3'b101".to_string());
    }
    let mut t1_default = bundled::table1();
    t1_default.rows.push(CaseRow::new(
        vec![CellValue::DontCare; 2],
        vec![CellValue::constant(8, 0xff)],
    ));
    fixed += 1;
    if !is_equiv(equiv(&bundled::table1(), &t1_default)) {
        errors.push("fixed mux4 + default row".to_string());
    }
    for t in [bundled::table1(), bundled::table2(), bundled::table3()] {
        for (name, v) in normalized_variants(&t, 7) {
            fixed += 1;
            if !is_equiv(equiv(&t, &v)) {
                errors.push(format!("fixed {} {name}", t.name));
            }
        }
    }

    let mut random = 0;
    for i in 0..C5_RANDOM_TABLES {
        let t = random_table(SEED_BASE + 1000 + i, GenConfig::default());
        for (name, v) in normalized_variants(&t, i) {
            random += 1;
            if !is_equiv(equiv(&t, &v)) {
                errors.push(format!("{} {name}", t.name));
            }
        }
    }
    g.report(
        "5",
        errors.is_empty(),
        format!(
            "equivalence normalizations: {fixed} fixed cases, {random} cases over {C5_RANDOM_TABLES} random tables, {} failures {}",
            errors.len(),
            errors.join("; ")
        ),
    );
}

fn criterion6(g: &mut Gate) {
    let mut detected = 0;
    let mut errors = Vec::new();
    let mut seed = SEED_BASE + 5000;
    let mut done = 0;
    while done < C6_MUTATIONS {
        seed += 1;
        let t = random_table(seed, GenConfig::default());
        let mut r = rng(seed);
        let reachable = reachable_rows(&t);
        let row = reachable[r.random_range(0..reachable.len())];
        let res = r.random_range(0..t.results.len());
        let w = t.result_width(res);
        let original = t.rows[row].outputs[res].clone();
        let mutated = loop {
            let c = CellValue::constant(w, r.random_range(0..(1u64 << w)));
            if c != original {
                break c;
            }
        };
        let mut m = t.clone();
        m.rows[row].outputs[res] = mutated;
        done += 1;
        match compare(&t, &m, &AliasMap::default(), DEFAULT_ENUM_LIMIT) {
            Ok(out) if out.verdict == Verdict::NotEquivalent => match &out.counterexample {
                Some(cx) if replay(&t, &m, &AliasMap::default(), cx).unwrap_or(false) => {
                    detected += 1
                }
                _ => errors.push(format!(
                    "{}: counterexample missing or not replayable",
                    t.name
                )),
            },
            other => errors.push(format!(
                "{} row {row} {}: {other:?}",
                t.name, t.results[res]
            )),
        }
    }
    g.report(
        "6",
        detected == done,
        format!(
            "mutation sensitivity: {detected}/{done} detected with replayed counterexample {}",
            errors.join("; ")
        ),
    );
}

fn fault_run(
    t: &Lct,
    fwd: &dyn lct_core::roundtrip::TransformBackend,
    inv: &dyn lct_core::roundtrip::TransformBackend,
) -> Result<Label, String> {
    run_roundtrip(t, fwd, inv, &RoundTripConfig::new())
        .map(|r| r.outcome.label)
        .map_err(|e| e.to_string())
}

fn criterion7(g: &mut Gate) {
    let d = Deterministic::default();
    let mut errors = Vec::new();
    let mut total = 0;
    let t1 = bundled::table1();
    let t2 = bundled::table2();
    let t3 = bundled::table3();

    let forward: Vec<(&Lct, Fault)> = vec![
        (&t1, Fault::DropRow(2)),
        (&t1, Fault::AlterOutput { row: 0, result: 0 }),
        (&t1, Fault::AddSpuriousRow(1)),
        (&t2, Fault::DropRow(0)),
        (&t2, Fault::AlterOutput { row: 3, result: 0 }),
        (&t2, Fault::AddSpuriousRow(4)),
        (&t3, Fault::DropRow(5)),
        (&t3, Fault::AlterOutput { row: 2, result: 1 }),
        (&t3, Fault::AddSpuriousRow(6)),
    ];
    for (t, f) in forward {
        total += 1;
        match fault_run(t, &FaultInjecting::forward(f.clone()), &d) {
            Ok(Label::XFw | Label::XFwNs) => {}
            other => errors.push(format!("{} forward {f:?}: {other:?}", t.name)),
        }
    }
    let inverse: Vec<(&Lct, Fault)> = vec![
        (&t1, Fault::RenameValue { row: 1, column: 1 }),
        (&t1, Fault::MergeRows(3)),
        (&t2, Fault::RenameValue { row: 3, column: 3 }),
        (&t2, Fault::MergeRows(2)),
        (&t3, Fault::RenameValue { row: 2, column: 1 }),
        (&t3, Fault::MergeRows(2)),
    ];
    for (t, f) in inverse {
        total += 1;
        match fault_run(t, &d, &FaultInjecting::inverse(f.clone())) {
            Ok(Label::XInv) => {}
            other => errors.push(format!("{} inverse {f:?}: {other:?}", t.name)),
        }
    }

    // Forward writes a wrong value, inverse writes the original back: the
    // composed loop is the identity, so the method cannot see either fault.
    let original = t1.rows[1].outputs[0].clone();
    let cancel = match fault_run(
        &t1,
        &FaultInjecting::forward(Fault::SetOutput {
            row: 1,
            result: 0,
            value: CellValue::constant(8, 0x55),
        }),
        &FaultInjecting::inverse(Fault::SetOutput {
            row: 1,
            result: 0,
            value: original,
        }),
    ) {
        Ok(Label::M) => true,
        other => {
            errors.push(format!("self-cancelling pair: {other:?}"));
            false
        }
    };
    g.report(
        "7",
        errors.is_empty() && cancel,
        format!(
            "fault taxonomy: {}/{total} scripted faults classified, self-cancelling pair -> M (known blind spot) {}",
            total - errors.len() + usize::from(!cancel),
            errors.join("; ")
        ),
    );
}

fn criterion9() {
    if std::env::var("LCT_API_BASE").is_err() {
        println!("criterion 9: SKIP remote smoke test (LCT_API_BASE not set; offline run)");
        return;
    }
    let backends = RemoteChat::from_env(TransformKind::Forward)
        .and_then(|f| Ok((f, RemoteChat::from_env(TransformKind::Inverse)?)));
    let line = match backends {
        Ok((f, i)) => match run_roundtrip(&bundled::table1(), &f, &i, &RoundTripConfig::new()) {
            Ok(r) => format!("INFO remote round trip labelled {}", r.outcome.label),
            Err(e) => format!("INFO remote round trip did not complete: {e}"),
        },
        Err(e) => format!("INFO remote backend unavailable: {e}"),
    };
    println!("criterion 9: {line}");
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut g = Gate { failed: false };
    criterion1(&mut g);
    criterion2(&mut g);
    criterion3(&mut g);
    criterion4(&mut g);
    criterion5(&mut g);
    criterion6(&mut g);
    criterion7(&mut g);
    let elapsed = start.elapsed();
    g.report(
        "8",
        elapsed < C8_TIME_LIMIT,
        format!(
            "offline run of criteria 1-7 in {:.2}s (limit {}s), deterministic backends only",
            elapsed.as_secs_f64(),
            C8_TIME_LIMIT.as_secs()
        ),
    );
    criterion9();
    if g.failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
