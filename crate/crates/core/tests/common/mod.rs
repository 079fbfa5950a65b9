// SPDX-License-Identifier: Apache-2.0

//! Seeded random tables and independent oracles shared by the integration
//! tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use lct_core::model::{CaseRow, CellValue, Clocking, ConditionHeader, Direction, Lct, PortMap};
use lct_core::table_io::serialize_manifest;
use lct_core::BitVector;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_CONTROL_BITS: u32 = 12;

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub clocking: Option<Clocking>,
    /// Every point of the control space is covered by some row.
    pub complete: bool,
    pub max_rows: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            clocking: None,
            complete: false,
            max_rows: 24,
        }
    }
}

/// A valid table whose rows are pairwise disjoint cubes, built by splitting
/// the control space as a decision tree. Leaves may be dropped unless
/// `cfg.complete`.
pub fn random_table(seed: u64, cfg: GenConfig) -> Lct {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clocking = cfg.clocking.unwrap_or(if rng.random_bool(0.5) {
        Clocking::Clocked
    } else {
        Clocking::Combinational
    });

    let mut widths = Vec::new();
    let mut bits = 0;
    let n_cond = rng.random_range(1..=5);
    for _ in 0..n_cond {
        let w = rng.random_range(1..=3u32).min(MAX_CONTROL_BITS - bits);
        if w == 0 {
            break;
        }
        widths.push(w);
        bits += w;
    }
    let n_res = rng.random_range(1..=3);
    let res_widths: Vec<u32> = (0..n_res).map(|_| rng.random_range(1..=8)).collect();
    let data_widths: Vec<u32> = (0..rng.random_range(0..=2))
        .map(|_| rng.random_range(1..=8))
        .collect();

    let mut ports = PortMap::default();
    let conditions: Vec<ConditionHeader> = widths
        .iter()
        .enumerate()
        .map(|(i, w)| {
            ports.push(Direction::Input, &format!("c{i}"), *w);
            ConditionHeader::Signal(format!("c{i}"))
        })
        .collect();
    for (i, w) in data_widths.iter().enumerate() {
        ports.push(Direction::Input, &format!("d{i}"), *w);
    }
    let results: Vec<String> = res_widths
        .iter()
        .enumerate()
        .map(|(i, w)| {
            ports.push(Direction::Output, &format!("r{i}"), *w);
            format!("r{i}")
        })
        .collect();

    let mut leaves = Vec::new();
    split(
        &mut rng,
        &widths,
        vec![None; widths.len()],
        cfg.max_rows,
        &mut leaves,
    );
    let mut rows = Vec::new();
    for cube in leaves {
        if !cfg.complete && rng.random_bool(0.15) {
            continue;
        }
        let inputs = cube
            .iter()
            .zip(&widths)
            .map(|(v, w)| match v {
                Some(v) => CellValue::constant(*w, *v),
                None => CellValue::DontCare,
            })
            .collect();
        let outputs = res_widths
            .iter()
            .enumerate()
            .map(|(r, w)| random_output(&mut rng, clocking, r, *w, &data_widths))
            .collect();
        rows.push(CaseRow::new(inputs, outputs));
    }
    if rows.is_empty() {
        rows.push(CaseRow::new(
            vec![CellValue::DontCare; widths.len()],
            res_widths
                .iter()
                .map(|w| CellValue::constant(*w, 1))
                .collect(),
        ));
    }

    let t = Lct {
        name: format!("rand{seed}"),
        clocking,
        conditions,
        results,
        rows,
        ports,
        feedback: Vec::new(),
    };
    let violations = lct_core::model::validate_lct(&t);
    assert!(
        violations.is_empty(),
        "generator produced an invalid table: {violations:?}\n{}",
        serialize_manifest(&t)
    );
    t
}

fn random_output(
    rng: &mut ChaCha8Rng,
    clocking: Clocking,
    result: usize,
    width: u32,
    data: &[u32],
) -> CellValue {
    let matching: Vec<usize> = data
        .iter()
        .enumerate()
        .filter(|(_, w)| **w == width)
        .map(|(i, _)| i)
        .collect();
    let roll = rng.random_range(0..10);
    if roll == 0 && clocking == Clocking::Clocked {
        CellValue::SignalRef(format!("r{result}"))
    } else if roll == 1 && !matching.is_empty() {
        CellValue::SignalRef(format!(
            "d{}",
            matching[rng.random_range(0..matching.len())]
        ))
    } else {
        CellValue::constant(width, rng.random_range(0..(1u64 << width)))
    }
}

fn split(
    rng: &mut ChaCha8Rng,
    widths: &[u32],
    cube: Vec<Option<u64>>,
    budget: usize,
    out: &mut Vec<Vec<Option<u64>>>,
) {
    let free: Vec<usize> = (0..widths.len()).filter(|c| cube[*c].is_none()).collect();
    let fanouts: Vec<usize> = free
        .iter()
        .filter(|c| (1usize << widths[**c]) <= budget)
        .copied()
        .collect();
    if fanouts.is_empty() || budget < 2 || (!out.is_empty() && rng.random_bool(0.3)) {
        out.push(cube);
        return;
    }
    let col = fanouts[rng.random_range(0..fanouts.len())];
    let n = 1usize << widths[col];
    let share = budget / n;
    for v in 0..n as u64 {
        let mut child = cube.clone();
        child[col] = Some(v);
        if share >= 2 {
            split(rng, widths, child, share, out);
        } else {
            out.push(child);
        }
    }
}

/// Control bits of a table with signal columns only.
pub fn control_bits(t: &Lct) -> u32 {
    (0..t.conditions.len()).map(|c| t.condition_width(c)).sum()
}

/// Every assignment of the control columns, in odometer order.
pub fn assignments(t: &Lct) -> Vec<Vec<u64>> {
    let widths: Vec<u32> = (0..t.conditions.len())
        .map(|c| t.condition_width(c))
        .collect();
    let total: u64 = 1 << widths.iter().sum::<u32>();
    (0..total)
        .map(|mut i| {
            widths
                .iter()
                .map(|w| {
                    let v = i & ((1 << w) - 1);
                    i >>= w;
                    v
                })
                .collect()
        })
        .collect()
}

/// Brute-force first-match oracle: the index of the first row whose every
/// constant cell equals the assignment.
pub fn first_match(t: &Lct, point: &[u64]) -> Option<usize> {
    t.rows.iter().position(|row| {
        row.inputs.iter().zip(point).all(|(cell, v)| match cell {
            CellValue::DontCare => true,
            CellValue::Constant(bv) => bv.value() == *v,
            CellValue::SignalRef(_) => false,
        })
    })
}

/// Output cell seen at `point` in hardware terms: unmatched combinational
/// points read zero and unmatched clocked points hold.
pub fn observed(t: &Lct, point: &[u64], result: usize) -> String {
    let name = &t.results[result];
    match first_match(t, point) {
        Some(r) => match &t.rows[r].outputs[result] {
            CellValue::Constant(bv) => format!("k{}", bv.value()),
            CellValue::SignalRef(s) if s == name => "hold".into(),
            CellValue::SignalRef(s) => match t.condition_index(s) {
                Some(c) => format!("k{}", point[c] & ((1u64 << t.result_width(result)) - 1)),
                None => format!("sig:{s}"),
            },
            CellValue::DontCare => "x".into(),
        },
        None if t.clocking == Clocking::Clocked => "hold".into(),
        None => "k0".into(),
    }
}

/// Permutes condition columns (and the row cells with them).
pub fn permute_columns(t: &Lct, order: &[usize]) -> Lct {
    let mut p = t.clone();
    p.conditions = order.iter().map(|i| t.conditions[*i].clone()).collect();
    for (row, src) in p.rows.iter_mut().zip(&t.rows) {
        row.inputs = order.iter().map(|i| src.inputs[*i].clone()).collect();
    }
    p
}

/// Permutes result columns.
pub fn permute_results(t: &Lct, order: &[usize]) -> Lct {
    let mut p = t.clone();
    p.results = order.iter().map(|i| t.results[*i].clone()).collect();
    for (row, src) in p.rows.iter_mut().zip(&t.rows) {
        row.outputs = order.iter().map(|i| src.outputs[*i].clone()).collect();
    }
    p
}

pub fn shuffled(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One literal spelled in a randomly chosen sized or bare form.
pub fn respell(rng: &mut ChaCha8Rng, bv: &BitVector) -> String {
    let (w, v) = (bv.width(), bv.value());
    match rng.random_range(0..4) {
        0 => format!("{v}"),
        1 => format!("{w}'d{v}"),
        2 => format!("{w}'b{v:0width$b}", width = w as usize),
        _ => format!("{w}'h{v:x}"),
    }
}

/// CSV text of `t` with every constant respelled.
pub fn respelled_csv(rng: &mut ChaCha8Rng, t: &Lct) -> String {
    let mut lines = vec![t
        .condition_names()
        .into_iter()
        .chain(t.results.iter().cloned())
        .collect::<Vec<_>>()
        .join(",")];
    for row in &t.rows {
        let cells: Vec<String> = row
            .inputs
            .iter()
            .chain(&row.outputs)
            .map(|c| match c {
                CellValue::DontCare => "X".to_string(),
                CellValue::SignalRef(s) => s.clone(),
                CellValue::Constant(bv) => respell(rng, bv),
            })
            .collect();
        lines.push(cells.join(","));
    }
    lines.join("\n") + "\n"
}

/// Reachable rows under first match, by enumeration.
pub fn reachable_rows(t: &Lct) -> Vec<usize> {
    let mut hit = BTreeMap::new();
    for p in assignments(t) {
        if let Some(r) = first_match(t, &p) {
            hit.insert(r, ());
        }
    }
    hit.into_keys().collect()
}
