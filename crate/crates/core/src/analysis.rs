// SPDX-License-Identifier: Apache-2.0

//! Static checks and semantics-preserving table transformations.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bitvec::{mask, BitVector, MAX_WIDTH};
use crate::model::{
    CaseRow, CellValue, Clocking, ConditionHeader, Direction, Feedback, Lct, PortMap,
};
use crate::simulate::row_outputs;
use crate::space::{row_subsumes, rows_overlap, Assignment, CompiledTable, SpaceTooLarge};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Space(#[from] SpaceTooLarge),
    #[error("expansion would produce more than {limit} rows")]
    TooManyRows { limit: u64 },
    #[error("no condition column named `{0}`")]
    UnknownColumn(String),
    #[error("invalid machine parameters: {0}")]
    FsmParams(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub first: usize,
    pub second: usize,
    /// Lexicographically first assignment where both rows match and their
    /// outputs differ.
    pub witness: Assignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverageReport {
    pub uncovered: Vec<Assignment>,
    pub shadowed_rows: Vec<usize>,
    pub conflicts: Vec<Conflict>,
    /// Set when expression columns were enumerated as free booleans, so some
    /// uncovered entries may be unreachable.
    pub possibly_infeasible: bool,
    pub warnings: Vec<String>,
}

impl CoverageReport {
    pub fn is_clean(&self) -> bool {
        self.uncovered.is_empty() && self.shadowed_rows.is_empty() && self.conflicts.is_empty()
    }
}

fn is_reset_name(name: &str) -> bool {
    let n = name.to_ascii_lowercase();
    n.contains("rst") || n.contains("reset")
}

/// Warns when a clocked table has no row constraining only a reset-like
/// signal.
fn reset_warnings(table: &Lct) -> Vec<String> {
    if table.clocking != Clocking::Clocked {
        return Vec::new();
    }
    let reset_cols: Vec<usize> = table
        .conditions
        .iter()
        .enumerate()
        .filter(|(_, c)| c.signal().is_some_and(is_reset_name))
        .map(|(i, _)| i)
        .collect();
    let has_reset_row = table.rows.iter().any(|row| {
        let constrained: Vec<usize> = row
            .inputs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_dont_care())
            .map(|(i, _)| i)
            .collect();
        constrained.len() == 1 && reset_cols.contains(&constrained[0])
    });
    if has_reset_row {
        Vec::new()
    } else {
        vec![format!("clocked table `{}` has no reset row", table.name)]
    }
}

pub fn check_completeness(table: &Lct, enum_limit: u64) -> Result<CoverageReport, SpaceTooLarge> {
    let compiled = CompiledTable::new(table, enum_limit)?;
    let uncovered = (0..compiled.size())
        .filter(|i| compiled.first_match(*i).is_none())
        .map(|i| compiled.space.assignment(i))
        .collect::<Vec<_>>();
    Ok(CoverageReport {
        possibly_infeasible: !uncovered.is_empty() && table.has_expr_columns(),
        uncovered,
        warnings: reset_warnings(table),
        ..Default::default()
    })
}

/// Rows that are never the first match, found by enumeration.
pub fn shadowed_rows(table: &Lct, enum_limit: u64) -> Result<Vec<usize>, SpaceTooLarge> {
    let compiled = CompiledTable::new(table, enum_limit)?;
    let mut hit = vec![false; table.rows.len()];
    for i in 0..compiled.size() {
        if let Some(r) = compiled.first_match(i) {
            hit[r] = true;
        }
    }
    Ok((0..hit.len()).filter(|r| !hit[*r]).collect())
}

/// Depth-first walk of the free bits of a cube in increasing order.
fn cube_points(free: u64, fixed: u64) -> impl Iterator<Item = u64> {
    let bits: Vec<u32> = (0..64).filter(|b| free >> b & 1 == 1).collect();
    let n = bits.len() as u32;
    (0..(1u64 << n)).map(move |k| {
        let mut v = fixed;
        for (j, b) in bits.iter().enumerate() {
            v |= ((k >> j) & 1) << b;
        }
        v
    })
}

fn outputs_depend_on_columns(table: &Lct, row: &CaseRow) -> bool {
    row.outputs.iter().enumerate().any(|(o, c)| match c {
        CellValue::SignalRef(s) => *s != table.results[o] && table.signal_column(s).is_some(),
        _ => false,
    })
}

pub fn check_overlap(table: &Lct, enum_limit: u64) -> Result<CoverageReport, SpaceTooLarge> {
    let compiled = CompiledTable::new(table, enum_limit)?;
    let full = mask(compiled.space.bits);
    let mut conflicts = Vec::new();
    for i in 0..table.rows.len() {
        for j in i + 1..table.rows.len() {
            let (mi, vi) = compiled.cubes[i];
            let (mj, vj) = compiled.cubes[j];
            if (vi ^ vj) & mi & mj != 0 {
                continue;
            }
            let (ri, rj) = (&table.rows[i], &table.rows[j]);
            let dynamic =
                outputs_depend_on_columns(table, ri) || outputs_depend_on_columns(table, rj);
            let points = cube_points(full & !(mi | mj), vi | vj);
            for idx in points {
                let cols = compiled.space.decode(idx);
                if row_outputs(table, i, &cols) != row_outputs(table, j, &cols) {
                    conflicts.push(Conflict {
                        first: i,
                        second: j,
                        witness: compiled.space.assignment(idx),
                    });
                    break;
                }
                if !dynamic {
                    break;
                }
            }
        }
    }
    Ok(CoverageReport {
        shadowed_rows: shadowed_rows(table, enum_limit)?,
        conflicts,
        ..Default::default()
    })
}

/// Replaces don't-cares in the chosen columns (all columns when `None`) by
/// every value of the column, keeping each expansion in place of its row.
pub fn expand_dont_cares(
    table: &Lct,
    columns: Option<&[String]>,
    row_limit: u64,
) -> Result<Lct, AnalysisError> {
    let selected: Vec<usize> = match columns {
        None => (0..table.conditions.len()).collect(),
        Some(names) => names
            .iter()
            .map(|n| {
                table
                    .condition_index(n)
                    .ok_or_else(|| AnalysisError::UnknownColumn(n.clone()))
            })
            .collect::<Result<_, _>>()?,
    };
    let mut rows: Vec<CaseRow> = Vec::new();
    for row in &table.rows {
        let mut partial = vec![row.clone()];
        for &c in &selected {
            if !row.inputs[c].is_dont_care() {
                continue;
            }
            let width = table.condition_width(c);
            if width >= 63 || (partial.len() as u64).saturating_mul(1 << width) > row_limit {
                return Err(AnalysisError::TooManyRows { limit: row_limit });
            }
            partial = partial
                .into_iter()
                .flat_map(|r| {
                    (0..1u64 << width).map(move |v| {
                        let mut r = r.clone();
                        r.inputs[c] = CellValue::Constant(BitVector::truncating(width, v));
                        r
                    })
                })
                .collect();
        }
        rows.extend(partial);
        if rows.len() as u64 > row_limit {
            return Err(AnalysisError::TooManyRows { limit: row_limit });
        }
    }
    Ok(Lct {
        rows,
        ..table.clone()
    })
}

/// Sort key: condition cells with don't-cares last, then output cells.
type RowKey = (Vec<(u8, u64)>, Vec<String>);

fn row_key(row: &CaseRow) -> RowKey {
    let inputs = row
        .inputs
        .iter()
        .map(|c| match c {
            CellValue::Constant(bv) => (0, bv.value()),
            CellValue::SignalRef(_) => (1, 0),
            CellValue::DontCare => (2, 0),
        })
        .collect();
    let outputs = row
        .outputs
        .iter()
        .map(|c| match c {
            CellValue::Constant(bv) => format!("0{:020}", bv.value()),
            CellValue::SignalRef(s) => format!("1{s}"),
            CellValue::DontCare => "2".into(),
        })
        .collect();
    (inputs, outputs)
}

/// Deterministic normal form: names sorted, shadowed rows dropped, literals
/// sized to their columns, annotations dropped, and rows sorted by their
/// condition cells with don't-cares last. Rows that overlap keep their
/// relative order, so the normal form has the same first-match semantics.
pub fn canonicalize(table: &Lct) -> Lct {
    canonicalize_with_limit(table, crate::space::DEFAULT_ENUM_LIMIT)
}

pub fn canonicalize_with_limit(table: &Lct, enum_limit: u64) -> Lct {
    let shadowed = match shadowed_rows(table, enum_limit) {
        Ok(s) => s,
        Err(_) => (0..table.rows.len())
            .filter(|&j| (0..j).any(|i| row_subsumes(&table.rows[i], &table.rows[j])))
            .collect(),
    };

    let mut cond_order: Vec<usize> = (0..table.conditions.len()).collect();
    cond_order.sort_by_key(|&i| table.conditions[i].name());
    let mut res_order: Vec<usize> = (0..table.results.len()).collect();
    res_order.sort_by_key(|&i| table.results[i].clone());

    let cond_widths: Vec<u32> = cond_order
        .iter()
        .map(|&i| table.condition_width(i))
        .collect();
    let res_widths: Vec<u32> = res_order.iter().map(|&i| table.result_width(i)).collect();
    let normalize = |cell: &CellValue, width: u32| match cell {
        CellValue::Constant(bv) => CellValue::Constant(bv.resize(width)),
        other => other.clone(),
    };
    let rows: Vec<CaseRow> = table
        .rows
        .iter()
        .enumerate()
        .filter(|(i, _)| !shadowed.contains(i))
        .map(|(_, r)| CaseRow {
            inputs: cond_order
                .iter()
                .zip(&cond_widths)
                .map(|(&i, &w)| normalize(&r.inputs[i], w))
                .collect(),
            outputs: res_order
                .iter()
                .zip(&res_widths)
                .map(|(&i, &w)| normalize(&r.outputs[i], w))
                .collect(),
            case_label: None,
            comment: None,
        })
        .collect();

    // Kahn's algorithm over the "earlier overlapping row" relation, taking
    // the smallest key among ready rows.
    let n = rows.len();
    let keys: Vec<_> = rows.iter().map(row_key).collect();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if rows_overlap(&rows[i], &rows[j]) {
                succ[i].push(j);
                indeg[j] += 1;
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<(&RowKey, usize)>> = (0..n)
        .filter(|&i| indeg[i] == 0)
        .map(|i| Reverse((&keys[i], i)))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, i))) = ready.pop() {
        order.push(i);
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.push(Reverse((&keys[j], j)));
            }
        }
    }

    let mut ports = table.ports.clone();
    ports.entries.sort_by(|a, b| a.name.cmp(&b.name));
    let mut feedback = table.feedback.clone();
    feedback.sort_by(|a, b| a.result.cmp(&b.result));
    Lct {
        name: table.name.clone(),
        clocking: table.clocking,
        conditions: cond_order
            .iter()
            .map(|&i| table.conditions[i].clone())
            .collect(),
        results: res_order
            .iter()
            .map(|&i| table.results[i].clone())
            .collect(),
        rows: order.into_iter().map(|i| rows[i].clone()).collect(),
        ports,
        feedback,
    }
}

/// Seeded synthetic state machine shaped like the bundled four-state
/// example: a reset row, an all-conditions-low hold row, then one one-hot
/// transition row per state and condition.
pub fn generate_fsm(
    states: u64,
    conds_per_state: usize,
    outputs: usize,
    seed: u64,
) -> Result<Lct, AnalysisError> {
    if states < 2 || !states.is_power_of_two() {
        return Err(AnalysisError::FsmParams(format!(
            "state count {states} must be a power of two and at least 2"
        )));
    }
    let state_width = states.trailing_zeros();
    if state_width > MAX_WIDTH {
        return Err(AnalysisError::FsmParams("state width too large".into()));
    }
    if conds_per_state == 0 {
        return Err(AnalysisError::FsmParams(
            "at least one condition per state is required".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ports = PortMap::default();
    ports.push(Direction::Input, "rst_n", 1);
    ports.push(Direction::Input, "state", state_width);
    let cond_names: Vec<String> = (0..conds_per_state).map(|k| format!("cond{k}")).collect();
    for c in &cond_names {
        ports.push(Direction::Input, c, 1);
    }
    ports.push(Direction::Output, "next_state", state_width);
    let out_names: Vec<String> = (0..outputs).map(|k| format!("out{k}")).collect();
    for o in &out_names {
        ports.push(Direction::Output, o, 1);
    }

    let mut conditions = vec![
        ConditionHeader::Signal("rst_n".into()),
        ConditionHeader::Signal("state".into()),
    ];
    conditions.extend(cond_names.iter().cloned().map(ConditionHeader::Signal));
    let mut results = vec!["next_state".to_string()];
    results.extend(out_names.iter().cloned());

    let bit = |v: u64| CellValue::Constant(BitVector::truncating(1, v));
    let mut rows = Vec::new();

    let mut reset_in = vec![bit(0), CellValue::DontCare];
    reset_in.extend((0..conds_per_state).map(|_| CellValue::DontCare));
    let mut reset_out = vec![CellValue::Constant(BitVector::zero(state_width))];
    reset_out.extend((0..outputs).map(|_| bit(0)));
    rows.push(CaseRow::new(reset_in, reset_out));

    let mut hold_in = vec![bit(1), CellValue::DontCare];
    hold_in.extend((0..conds_per_state).map(|_| bit(0)));
    let mut hold_out = vec![CellValue::SignalRef("state".into())];
    hold_out.extend(out_names.iter().cloned().map(CellValue::SignalRef));
    rows.push(CaseRow::new(hold_in, hold_out));

    for s in 0..states {
        let moore: Vec<CellValue> = (0..outputs).map(|_| bit(rng.random_range(0..2))).collect();
        for k in 0..conds_per_state {
            let mut inputs = vec![
                bit(1),
                CellValue::Constant(BitVector::truncating(state_width, s)),
            ];
            inputs.extend((0..conds_per_state).map(|j| bit((j == k) as u64)));
            let next = rng.random_range(0..states);
            let mut outs = vec![CellValue::Constant(BitVector::truncating(
                state_width,
                next,
            ))];
            outs.extend(moore.iter().cloned());
            rows.push(CaseRow::new(inputs, outs));
        }
    }

    Ok(Lct {
        name: format!("fsm{states}_c{conds_per_state}_o{outputs}_s{seed}"),
        clocking: Clocking::Clocked,
        conditions,
        results,
        rows,
        ports,
        feedback: vec![Feedback {
            result: "next_state".into(),
            condition: "state".into(),
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::model::validate_lct;
    use crate::space::DEFAULT_ENUM_LIMIT;

    const LIMIT: u64 = DEFAULT_ENUM_LIMIT;

    #[test]
    fn table1_is_complete() {
        let r = check_completeness(&bundled::table1(), LIMIT).unwrap();
        assert!(r.uncovered.is_empty());
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn table3_misses_both_conditions_high() {
        let r = check_completeness(&bundled::table3(), LIMIT).unwrap();
        let got: Vec<String> = r.uncovered.iter().map(|a| a.to_string()).collect();
        let want: Vec<String> = (0..4)
            .map(|s| format!("rst_n=1 state={s} cond0=1 cond1=1"))
            .collect();
        assert_eq!(got, want);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn empty_table_is_uncovered_everywhere() {
        let mut t = bundled::mux2();
        t.rows.clear();
        let r = check_completeness(&t, LIMIT).unwrap();
        assert_eq!(r.uncovered.len(), 2);
    }

    #[test]
    fn missing_reset_row_warns() {
        let mut t = bundled::table2();
        t.rows.remove(0);
        let r = check_completeness(&t, LIMIT).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn table2_has_no_conflicts() {
        let r = check_overlap(&bundled::table2(), LIMIT).unwrap();
        assert!(r.conflicts.is_empty());
        assert!(r.shadowed_rows.is_empty());
    }

    #[test]
    fn duplicate_row_is_shadowed() {
        let mut t = bundled::table1();
        t.rows.push(t.rows[0].clone());
        let r = check_overlap(&t, LIMIT).unwrap();
        assert_eq!(r.shadowed_rows, vec![5]);
        assert!(r.conflicts.is_empty());
    }

    #[test]
    fn overlapping_rows_conflict() {
        let mut t = bundled::mux2();
        t.rows = vec![
            CaseRow::new(vec![CellValue::DontCare], vec![CellValue::constant(1, 0)]),
            CaseRow::new(
                vec![CellValue::constant(1, 1)],
                vec![CellValue::constant(1, 1)],
            ),
        ];
        let r = check_overlap(&t, LIMIT).unwrap();
        assert_eq!(r.conflicts.len(), 1);
        assert_eq!(r.conflicts[0].witness.to_string(), "sel=1");
        assert_eq!(r.shadowed_rows, vec![1]);
    }

    #[test]
    fn expansion_of_table1_row0() {
        let t = bundled::table1();
        let e = expand_dont_cares(&t, Some(&["select".into()]), LIMIT).unwrap();
        assert_eq!(e.rows.len(), 8);
        for (v, row) in e.rows[..4].iter().enumerate() {
            assert_eq!(row.inputs[1], CellValue::constant(2, v as u64));
            assert_eq!(row.outputs[0], CellValue::constant(8, 0));
        }
        let none = expand_dont_cares(&e, None, LIMIT).unwrap();
        assert_eq!(none, e);
        assert!(matches!(
            expand_dont_cares(&t, None, 4),
            Err(AnalysisError::TooManyRows { .. })
        ));
    }

    #[test]
    fn canonical_form_ignores_order() {
        let t = bundled::table1();
        let mut rev = t.clone();
        rev.rows.reverse();
        assert_eq!(canonicalize(&t), canonicalize(&rev));
        let mut swapped = t.clone();
        swapped.conditions.swap(0, 1);
        swapped.rows.iter_mut().for_each(|r| r.inputs.swap(0, 1));
        assert_eq!(canonicalize(&t), canonicalize(&swapped));
        let c = canonicalize(&t);
        assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn canonical_form_drops_shadowed_rows() {
        let t = bundled::table1();
        let mut dup = t.clone();
        dup.rows.push(t.rows[2].clone());
        assert_eq!(canonicalize(&dup), canonicalize(&t));
        assert_eq!(canonicalize_with_limit(&dup, 2), canonicalize(&t));
    }

    #[test]
    fn canonical_form_keeps_overlap_order() {
        let mut a = bundled::table2();
        a.rows.truncate(2);
        a.rows[0].inputs = vec![
            CellValue::constant(1, 1),
            CellValue::DontCare,
            CellValue::DontCare,
            CellValue::DontCare,
        ];
        a.rows[1].inputs = vec![
            CellValue::DontCare,
            CellValue::constant(1, 1),
            CellValue::DontCare,
            CellValue::DontCare,
        ];
        let mut b = a.clone();
        b.rows.reverse();
        assert_ne!(canonicalize(&a), canonicalize(&b));
    }

    #[test]
    fn fsm_shapes() {
        let t = generate_fsm(4, 2, 3, 1).unwrap();
        assert_eq!(t.rows.len(), 10);
        assert_eq!(t.conditions.len(), 4);
        assert_eq!(t.results.len(), 4);
        assert_eq!(validate_lct(&t), vec![]);
        let big = generate_fsm(16, 4, 8, 7).unwrap();
        assert_eq!(big.rows.len() - 2, 64);
        assert_eq!(big.cell_count(), 990);
        assert_eq!(generate_fsm(16, 4, 8, 7).unwrap(), big);
        assert_ne!(generate_fsm(16, 4, 8, 8).unwrap(), big);
        assert!(generate_fsm(3, 2, 1, 0).is_err());
        assert!(generate_fsm(1, 2, 1, 0).is_err());
    }

    #[test]
    fn fsm_gaps_need_two_conditions_high() {
        let t = generate_fsm(8, 3, 2, 11).unwrap();
        let r = check_completeness(&t, LIMIT).unwrap();
        assert!(!r.uncovered.is_empty());
        for a in &r.uncovered {
            let high = (0..3)
                .filter(|k| a.get(&format!("cond{k}")).unwrap().is_true())
                .count();
            assert!(high >= 2, "{a}");
        }
    }
}
