// SPDX-License-Identifier: Apache-2.0

//! Semantic comparison of two tables.
//!
//! Two tables are equivalent when every point of the shared control space
//! yields the same symbolic outputs. Data inputs stay opaque tokens, holds
//! are a distinct symbol, and an assignment no row matches takes the
//! hardware value: zero for combinational tables, hold for clocked ones.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{canonicalize_with_limit, shadowed_rows};
use crate::bitvec::BitVector;
use crate::model::{CaseRow, CellValue, Clocking, ConditionHeader, Feedback, Lct, PortMap};
use crate::simulate::{eval_symbolic, row_outputs, Inputs, SimError, SymValue};
use crate::space::{Assignment, CompiledTable, SpaceTooLarge};
use crate::table_io::serialize_csv;

/// Name correspondences from table A to table B; bijective by construction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AliasMap {
    a_to_b: BTreeMap<String, String>,
    b_to_a: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AliasError {
    #[error("line {line}: expected `a_name = b_name`")]
    Syntax { line: usize },
    #[error("alias map is not bijective at `{0}`")]
    NonBijective(String),
}

impl AliasMap {
    pub fn new<I, S>(pairs: I) -> Result<Self, AliasError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut m = Self::default();
        for (a, b) in pairs {
            m.insert(a.into(), b.into())?;
        }
        Ok(m)
    }

    pub fn insert(&mut self, a: String, b: String) -> Result<(), AliasError> {
        match (self.a_to_b.get(&a), self.b_to_a.get(&b)) {
            (Some(x), _) if *x != b => return Err(AliasError::NonBijective(a)),
            (_, Some(y)) if *y != a => return Err(AliasError::NonBijective(b)),
            _ => {}
        }
        self.a_to_b.insert(a.clone(), b.clone());
        self.b_to_a.insert(b, a);
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.a_to_b.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.a_to_b.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    /// A-side name for a B-side name.
    pub fn to_a(&self, b: &str) -> Option<&str> {
        self.b_to_a.get(b).map(String::as_str)
    }
}

/// Parses `a_name = b_name` lines; `#` starts a comment.
pub fn parse_aliases(text: &str) -> Result<AliasMap, AliasError> {
    let mut m = AliasMap::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once('=')
            .map(|(a, b)| (a.trim(), b.trim()))
            .filter(|(a, b)| !a.is_empty() && !b.is_empty())
            .ok_or(AliasError::Syntax { line: i + 1 })?;
        m.insert(a.to_string(), b.to_string())?;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Normalization {
    AliasRename,
    CaseFold,
    ColumnPermutation,
    LiteralNormalization,
    ShadowedRowRemoval,
    RowPermutation,
    DontCareExpansion,
    /// An assignment matched on one side only compared against zero.
    DefaultFill,
    /// An assignment matched on one side only compared against hold.
    HoldFill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    TextuallyIdentical,
    Equivalent,
    /// Equivalent on the results both tables have; one side lacks some.
    EquivalentOnSharedColumns,
    NotEquivalent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::TextuallyIdentical => "textually identical",
            Verdict::Equivalent => "equivalent",
            Verdict::EquivalentOnSharedColumns => "equivalent on shared columns",
            Verdict::NotEquivalent => "not equivalent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Control-space point, in A's column order and namespace.
    #[serde(serialize_with = "ser_assignment")]
    pub assignment: Assignment,
    pub output: String,
    pub a: SymValue,
    pub b: SymValue,
}

fn ser_assignment<S: serde::Serializer>(a: &Assignment, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(a.0.len()))?;
    for (n, v) in &a.0 {
        m.serialize_entry(n, &v.value())?;
    }
    m.end()
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at {}: {} is {} vs {}",
            self.assignment, self.output, self.a, self.b
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivResult {
    pub verdict: Verdict,
    pub counterexample: Option<Counterexample>,
    pub normalizations: Vec<Normalization>,
    /// Results present on one side only.
    pub missing_results: Vec<String>,
}

impl EquivResult {
    /// Equivalent on every result of both tables.
    pub fn is_equivalent(&self) -> bool {
        matches!(
            self.verdict,
            Verdict::Equivalent | Verdict::TextuallyIdentical
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignError {
    #[error("column `{name}` of table {side} has no counterpart")]
    UnmatchedColumn { name: String, side: char },
    #[error("column `{name}` is {a} bits in A and {b} bits in B")]
    WidthMismatch { name: String, a: u32, b: u32 },
    #[error("two B names map to `{0}`")]
    Collision(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("clocking differs: A is {a}, B is {b}")]
    Clocking { a: Clocking, b: Clocking },
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error(transparent)]
    Space(#[from] SpaceTooLarge),
}

/// Alignment of B into A's namespace and column order.
#[derive(Debug, Clone)]
pub struct Aligned {
    pub a: Lct,
    pub b: Lct,
    pub normalizations: Vec<Normalization>,
    pub missing_results: Vec<String>,
}

fn name_map(
    a: &Lct,
    b: &Lct,
    aliases: &AliasMap,
    notes: &mut BTreeSet<Normalization>,
) -> Result<BTreeMap<String, String>, AlignError> {
    let mut a_names: BTreeSet<String> = a.ports.entries.iter().map(|p| p.name.clone()).collect();
    a_names.extend(a.results.iter().cloned());
    a_names.extend(
        a.conditions
            .iter()
            .filter_map(|c| c.signal().map(str::to_string)),
    );
    let mut b_names: BTreeSet<String> = b.ports.entries.iter().map(|p| p.name.clone()).collect();
    b_names.extend(b.results.iter().cloned());
    for c in &b.conditions {
        match c {
            ConditionHeader::Signal(s) => {
                b_names.insert(s.clone());
            }
            ConditionHeader::Expr(e) => {
                b_names.extend(e.identifiers().into_iter().map(str::to_string))
            }
        }
    }
    let mut map = BTreeMap::new();
    let mut taken: BTreeMap<String, String> = BTreeMap::new();
    for name in &b_names {
        let target = if let Some(t) = aliases.to_a(name) {
            notes.insert(Normalization::AliasRename);
            t.to_string()
        } else if a_names.contains(name) {
            name.clone()
        } else if let Some(t) = a_names.iter().find(|x| x.eq_ignore_ascii_case(name)) {
            notes.insert(Normalization::CaseFold);
            t.clone()
        } else {
            name.clone()
        };
        if let Some(prev) = taken.insert(target.clone(), name.clone()) {
            if prev != *name {
                return Err(AlignError::Collision(target));
            }
        }
        map.insert(name.clone(), target);
    }
    Ok(map)
}

fn rename_table(t: &Lct, map: &BTreeMap<String, String>) -> Lct {
    let r = |s: &str| map.get(s).cloned().unwrap_or_else(|| s.to_string());
    let cell = |c: &CellValue| match c {
        CellValue::SignalRef(s) => CellValue::SignalRef(r(s)),
        other => other.clone(),
    };
    Lct {
        name: t.name.clone(),
        clocking: t.clocking,
        conditions: t
            .conditions
            .iter()
            .map(|c| match c {
                ConditionHeader::Signal(s) => ConditionHeader::Signal(r(s)),
                ConditionHeader::Expr(e) => {
                    ConditionHeader::Expr(e.map_idents(&mut |n| crate::expr::Expr::ident(&r(n))))
                }
            })
            .collect(),
        results: t.results.iter().map(|s| r(s)).collect(),
        rows: t
            .rows
            .iter()
            .map(|row| CaseRow {
                inputs: row.inputs.iter().map(cell).collect(),
                outputs: row.outputs.iter().map(cell).collect(),
                case_label: row.case_label.clone(),
                comment: row.comment.clone(),
            })
            .collect(),
        ports: PortMap::new(
            t.ports
                .entries
                .iter()
                .map(|p| {
                    let mut p = p.clone();
                    p.name = r(&p.name);
                    p
                })
                .collect(),
        ),
        feedback: t
            .feedback
            .iter()
            .map(|f| Feedback {
                result: r(&f.result),
                condition: r(&f.condition),
            })
            .collect(),
    }
}

fn project(t: &Lct, conds: &[usize], results: &[usize]) -> Lct {
    Lct {
        name: t.name.clone(),
        clocking: t.clocking,
        conditions: conds.iter().map(|&i| t.conditions[i].clone()).collect(),
        results: results.iter().map(|&i| t.results[i].clone()).collect(),
        rows: t
            .rows
            .iter()
            .map(|row| CaseRow {
                inputs: conds.iter().map(|&i| row.inputs[i].clone()).collect(),
                outputs: results.iter().map(|&i| row.outputs[i].clone()).collect(),
                case_label: row.case_label.clone(),
                comment: row.comment.clone(),
            })
            .collect(),
        ports: t.ports.clone(),
        feedback: t.feedback.clone(),
    }
}

fn align_inner(
    a: &Lct,
    b: &Lct,
    aliases: &AliasMap,
    allow_missing_results: bool,
) -> Result<Aligned, AlignError> {
    let mut notes = BTreeSet::new();
    let map = name_map(a, b, aliases, &mut notes)?;
    let rb = rename_table(b, &map);

    let mut b_conds = Vec::with_capacity(a.conditions.len());
    for c in &a.conditions {
        let j = rb.conditions.iter().position(|x| x == c).ok_or_else(|| {
            AlignError::UnmatchedColumn {
                name: c.name(),
                side: 'A',
            }
        })?;
        b_conds.push(j);
    }
    if let Some(extra) = rb.conditions.iter().find(|c| !a.conditions.contains(c)) {
        return Err(AlignError::UnmatchedColumn {
            name: extra.name(),
            side: 'B',
        });
    }
    for (i, &j) in b_conds.iter().enumerate() {
        let (wa, wb) = (a.condition_width(i), rb.condition_width(j));
        if wa != wb {
            return Err(AlignError::WidthMismatch {
                name: a.conditions[i].name(),
                a: wa,
                b: wb,
            });
        }
    }

    let mut missing = Vec::new();
    let mut a_res = Vec::new();
    let mut b_res = Vec::new();
    for (i, r) in a.results.iter().enumerate() {
        match rb.result_index(r) {
            Some(j) => {
                a_res.push(i);
                b_res.push(j);
            }
            None if allow_missing_results => missing.push(r.clone()),
            None => {
                return Err(AlignError::UnmatchedColumn {
                    name: r.clone(),
                    side: 'A',
                })
            }
        }
    }
    for r in &rb.results {
        if a.result_index(r).is_none() {
            if !allow_missing_results {
                return Err(AlignError::UnmatchedColumn {
                    name: r.clone(),
                    side: 'B',
                });
            }
            missing.push(r.clone());
        }
    }
    if b_conds.iter().enumerate().any(|(i, &j)| i != j)
        || b_res.iter().enumerate().any(|(i, &j)| i != j)
    {
        notes.insert(Normalization::ColumnPermutation);
    }
    let all_conds: Vec<usize> = (0..a.conditions.len()).collect();
    Ok(Aligned {
        a: project(a, &all_conds, &a_res),
        b: project(&rb, &b_conds, &b_res),
        normalizations: notes.into_iter().collect(),
        missing_results: missing,
    })
}

/// Renames B into A's namespace and orders B's columns like A's. Names
/// match exactly after the alias map, then case-insensitively.
pub fn align(a: &Lct, b: &Lct, aliases: &AliasMap) -> Result<(Lct, Lct), AlignError> {
    let al = align_inner(a, b, aliases, false)?;
    Ok((al.a, al.b))
}

/// Output value after filling an unmatched assignment and sizing constants
/// to the result width.
fn settle(v: SymValue, clocking: Clocking, width: u32) -> SymValue {
    match v {
        SymValue::Unspecified if clocking == Clocking::Clocked => SymValue::Hold,
        SymValue::Unspecified => SymValue::Known(BitVector::zero(width)),
        SymValue::Known(bv) => SymValue::Known(bv.resize(width)),
        other => other,
    }
}

fn outputs_at(t: &Lct, row: Option<usize>, cols: &[u64], widths: &[u32]) -> Vec<SymValue> {
    match row {
        Some(r) => row_outputs(t, r, cols)
            .into_iter()
            .zip(widths)
            .map(|(v, &w)| settle(v, t.clocking, w))
            .collect(),
        None => widths
            .iter()
            .map(|&w| settle(SymValue::Unspecified, t.clocking, w))
            .collect(),
    }
}

struct Difference {
    index: u64,
    output: usize,
    a: SymValue,
    b: SymValue,
}

/// First differing point in lexicographic order, plus fill flags.
fn enumerate(
    a: &Lct,
    b: &Lct,
    enum_limit: u64,
) -> Result<(Option<Difference>, bool), SpaceTooLarge> {
    let ca = CompiledTable::new(a, enum_limit)?;
    let cb = CompiledTable::new(b, enum_limit)?;
    let widths: Vec<u32> = (0..a.results.len()).map(|i| a.result_width(i)).collect();
    let size = ca.size();
    let diff = (0..size).into_par_iter().find_map_first(|index| {
        let cols = ca.space.decode(index);
        let oa = outputs_at(a, ca.first_match(index), &cols, &widths);
        let ob = outputs_at(b, cb.first_match(index), &cols, &widths);
        oa.into_iter()
            .zip(ob)
            .enumerate()
            .find(|(_, (x, y))| x != y)
            .map(|(output, (x, y))| Difference {
                index,
                output,
                a: x,
                b: y,
            })
    });
    let one_sided = diff.is_none()
        && (0..size)
            .into_par_iter()
            .any(|i| ca.first_match(i).is_some() != cb.first_match(i).is_some());
    Ok((diff, one_sided))
}

/// Decides whether `a` and `b` specify the same function.
///
/// When B lacks some of A's results or has extra ones, the shared results
/// are compared and an equivalent outcome is
/// [`Verdict::EquivalentOnSharedColumns`].
pub fn compare(
    a: &Lct,
    b: &Lct,
    aliases: &AliasMap,
    enum_limit: u64,
) -> Result<EquivResult, EquivError> {
    if a.clocking != b.clocking {
        return Err(EquivError::Clocking {
            a: a.clocking,
            b: b.clocking,
        });
    }
    let al = align_inner(a, b, aliases, true)?;
    let mut notes: BTreeSet<Normalization> = al.normalizations.iter().copied().collect();
    let (diff, one_sided) = enumerate(&al.a, &al.b, enum_limit)?;

    if let Some(d) = diff {
        let space = CompiledTable::new(&al.a, enum_limit)?.space;
        return Ok(EquivResult {
            verdict: Verdict::NotEquivalent,
            counterexample: Some(Counterexample {
                assignment: space.assignment(d.index),
                output: al.a.results[d.output].clone(),
                a: d.a,
                b: d.b,
            }),
            normalizations: notes.into_iter().collect(),
            missing_results: al.missing_results,
        });
    }

    if one_sided {
        notes.insert(match a.clocking {
            Clocking::Clocked => Normalization::HoldFill,
            Clocking::Combinational => Normalization::DefaultFill,
        });
    }
    let literal_resized = |t: &Lct| {
        t.rows.iter().any(|r| {
            r.outputs.iter().enumerate().any(
                |(i, c)| matches!(c, CellValue::Constant(bv) if bv.width() != t.result_width(i)),
            ) || r.inputs.iter().enumerate().any(
                |(i, c)| matches!(c, CellValue::Constant(bv) if bv.width() != t.condition_width(i)),
            )
        })
    };
    if literal_resized(&al.a) || literal_resized(&al.b) {
        notes.insert(Normalization::LiteralNormalization);
    }
    let shadowed = |t: &Lct| {
        shadowed_rows(t, enum_limit)
            .map(|s| !s.is_empty())
            .unwrap_or(false)
    };
    if shadowed(&al.a) || shadowed(&al.b) {
        notes.insert(Normalization::ShadowedRowRemoval);
    }
    let ka = canonicalize_with_limit(&al.a, enum_limit);
    let kb = canonicalize_with_limit(&al.b, enum_limit);
    let textual = serialize_csv(&ka) == serialize_csv(&kb);
    if !textual {
        if ka.rows.len() == kb.rows.len() && same_multiset(&ka.rows, &kb.rows) {
            notes.insert(Normalization::RowPermutation);
        } else if ka.rows.len() != kb.rows.len() {
            notes.insert(Normalization::DontCareExpansion);
        }
    } else if al.a.rows != al.b.rows {
        notes.insert(Normalization::RowPermutation);
    }

    let verdict = if !al.missing_results.is_empty() {
        Verdict::EquivalentOnSharedColumns
    } else if textual {
        Verdict::TextuallyIdentical
    } else {
        Verdict::Equivalent
    };
    Ok(EquivResult {
        verdict,
        counterexample: None,
        normalizations: notes.into_iter().collect(),
        missing_results: al.missing_results,
    })
}

fn same_multiset(a: &[CaseRow], b: &[CaseRow]) -> bool {
    let key = |r: &CaseRow| format!("{:?}|{:?}", r.inputs, r.outputs);
    let mut x: Vec<String> = a.iter().map(key).collect();
    let mut y: Vec<String> = b.iter().map(key).collect();
    x.sort();
    y.sort();
    x == y
}

/// True when the canonical serializations and clocking of two aligned
/// tables are identical.
pub fn textual_match(a: &Lct, b: &Lct) -> bool {
    a.clocking == b.clocking
        && serialize_csv(&crate::analysis::canonicalize(a))
            == serialize_csv(&crate::analysis::canonicalize(b))
}

/// Re-evaluates a counterexample on both tables and reports whether the
/// named output still differs. Tables with expression columns are replayed
/// at the column level, since their inputs are not recoverable.
pub fn replay(
    a: &Lct,
    b: &Lct,
    aliases: &AliasMap,
    cx: &Counterexample,
) -> Result<bool, EquivError> {
    let al = align_inner(a, b, aliases, true)?;
    let Some(out) = al.a.result_index(&cx.output) else {
        return Ok(false);
    };
    let width = al.a.result_width(out);
    let (va, vb) = if al.a.has_expr_columns() {
        let cols: Vec<u64> = cx.assignment.0.iter().map(|(_, v)| v.value()).collect();
        let first = |t: &Lct| {
            t.rows.iter().position(|r| {
                r.inputs.iter().zip(&cols).all(|(c, v)| match c {
                    CellValue::Constant(bv) => bv.value() == *v,
                    _ => true,
                })
            })
        };
        let widths = vec![width; al.a.results.len()];
        (
            outputs_at(&al.a, first(&al.a), &cols, &widths)[out].clone(),
            outputs_at(&al.b, first(&al.b), &cols, &widths)[out].clone(),
        )
    } else {
        let inputs: Inputs = cx.assignment.0.iter().cloned().collect();
        let sim = |t: &Lct| -> Result<SymValue, SimError> {
            let ev = eval_symbolic(t, &inputs)?;
            Ok(settle(ev.outputs[out].1.clone(), t.clocking, width))
        };
        match (sim(&al.a), sim(&al.b)) {
            (Ok(x), Ok(y)) => (x, y),
            _ => return Ok(false),
        }
    };
    Ok(va == cx.a && vb == cx.b && va != vb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::expand_dont_cares;
    use crate::bundled;
    use crate::space::DEFAULT_ENUM_LIMIT;

    fn cmp(a: &Lct, b: &Lct) -> EquivResult {
        compare(a, b, &AliasMap::default(), DEFAULT_ENUM_LIMIT).unwrap()
    }

    #[test]
    fn identical_tables_are_textually_identical() {
        for t in bundled::all() {
            let r = cmp(&t, &t);
            assert_eq!(r.verdict, Verdict::TextuallyIdentical, "{}", t.name);
            assert!(textual_match(&t, &t));
        }
        assert!(!textual_match(&bundled::table1(), &bundled::table2()));
    }

    #[test]
    fn permuted_and_expanded_table1_is_equivalent() {
        let t = bundled::table1();
        let mut p = expand_dont_cares(&t, None, 1 << 16).unwrap();
        p.rows.reverse();
        let r = cmp(&t, &p);
        assert!(r.is_equivalent(), "{r:?}");
        assert_eq!(r.verdict, Verdict::Equivalent);
        assert!(!textual_match(&t, &p));
    }

    #[test]
    fn changed_output_gives_counterexample() {
        let t = bundled::table1();
        let mut m = t.clone();
        m.rows[2].outputs[0] = CellValue::SignalRef("data3".into());
        let r = cmp(&t, &m);
        assert_eq!(r.verdict, Verdict::NotEquivalent);
        let cx = r.counterexample.unwrap();
        assert_eq!(cx.assignment.get("enable").unwrap().value(), 1);
        assert_eq!(cx.assignment.get("select").unwrap().value(), 1);
        assert_eq!(cx.a, SymValue::Token("data1".into()));
        assert_eq!(cx.b, SymValue::Token("data3".into()));
        assert!(replay(&t, &m, &AliasMap::default(), &cx).unwrap());
    }

    #[test]
    fn aliases_and_case_fold_align() {
        let t = bundled::table1();
        let mut b = t.clone();
        b.results[0] = "dout".into();
        for p in &mut b.ports.entries {
            if p.name == "data_out" {
                p.name = "dout".into();
            }
            if p.name == "enable" {
                p.name = "ENABLE".into();
            }
        }
        b.conditions[0] = ConditionHeader::Signal("ENABLE".into());
        assert!(matches!(
            align(&t, &b, &AliasMap::default()),
            Err(AlignError::UnmatchedColumn { .. })
        ));
        let aliases = parse_aliases("# names\ndata_out = dout\n").unwrap();
        let (x, y) = align(&t, &b, &aliases).unwrap();
        assert_eq!(x.results, y.results);
        assert_eq!(x.conditions, y.conditions);
        let r = compare(&t, &b, &aliases, DEFAULT_ENUM_LIMIT).unwrap();
        assert!(r.is_equivalent());
        assert!(r.normalizations.contains(&Normalization::AliasRename));
        assert!(r.normalizations.contains(&Normalization::CaseFold));
    }

    #[test]
    fn alias_map_rejects_non_bijective_pairs() {
        assert!(matches!(
            parse_aliases("a = x\nb = x\n"),
            Err(AliasError::NonBijective(_))
        ));
        assert!(matches!(
            parse_aliases("a x"),
            Err(AliasError::Syntax { line: 1 })
        ));
    }

    #[test]
    fn missing_result_column_compares_shared_columns() {
        let t = bundled::table2();
        let keep: Vec<usize> = vec![1];
        let all: Vec<usize> = (0..t.conditions.len()).collect();
        let b = project(&t, &all, &keep);
        let r = cmp(&t, &b);
        assert_eq!(r.verdict, Verdict::EquivalentOnSharedColumns);
        assert_eq!(r.missing_results, vec!["valid_out".to_string()]);
        assert!(align(&t, &b, &AliasMap::default()).is_err());
    }

    #[test]
    fn shadowed_default_row_is_equivalent() {
        let t = bundled::table1();
        let mut b = t.clone();
        let n = b.conditions.len();
        b.rows.push(CaseRow::new(
            vec![CellValue::DontCare; n],
            vec![CellValue::constant(8, 0)],
        ));
        let r = cmp(&t, &b);
        assert_eq!(r.verdict, Verdict::TextuallyIdentical);
        assert!(r
            .normalizations
            .contains(&Normalization::ShadowedRowRemoval));
    }

    #[test]
    fn clocking_mismatch_is_an_error() {
        let a = bundled::table1();
        let mut b = a.clone();
        b.clocking = Clocking::Clocked;
        assert!(matches!(
            compare(&a, &b, &AliasMap::default(), DEFAULT_ENUM_LIMIT),
            Err(EquivError::Clocking { .. })
        ));
    }

    #[test]
    fn unmatched_assignments_fill_by_clocking() {
        // The four-state machine leaves some states unmatched; an explicit
        // hold row for them changes nothing.
        let t = bundled::table3();
        let mut b = t.clone();
        let n = b.conditions.len();
        b.rows.push(CaseRow::new(
            vec![CellValue::DontCare; n],
            b.results
                .iter()
                .map(|r| CellValue::SignalRef(r.clone()))
                .collect(),
        ));
        let r = cmp(&t, &b);
        assert!(r.is_equivalent(), "{r:?}");
        assert!(r.normalizations.contains(&Normalization::HoldFill));
    }
}
