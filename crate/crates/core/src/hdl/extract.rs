// SPDX-License-Identifier: Apache-2.0

//! Inverse transform: one process of a parsed module back to a table.
//!
//! Extraction enumerates paths through the statement tree. Each path is a
//! cube over the condition columns plus the assignments made along it, and
//! paths keep source priority so the first matching row of the result
//! reproduces the branch the process takes.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bitvec::{domain_size, mask, BitVector};
use crate::expr::{BinaryOp, Expr, UnaryOp};
use crate::hdl::ast::{HdlModule, Process, ProcessKind, Stmt};
use crate::lexer::Pos;
use crate::model::{
    validate_lct, CaseRow, CellValue, Clocking, ConditionHeader, Direction, Feedback, Lct, PortMap,
    Violation,
};
use crate::space::rows_overlap;

/// Paths beyond this count abort extraction.
pub const MAX_PATHS: usize = 1 << 16;

/// Largest domain enumerated when negating or ordering a comparison.
const MAX_ENUM_DOMAIN: u64 = 64;

/// Column headers for the table to reconstruct.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schema {
    pub conditions: Vec<ConditionHeader>,
    pub results: Vec<String>,
    /// Copied onto the reconstruction; HDL carries no feedback declaration.
    pub feedback: Vec<Feedback>,
}

impl Schema {
    pub fn new(conditions: Vec<ConditionHeader>, results: Vec<String>) -> Self {
        Self {
            conditions,
            results,
            feedback: Vec::new(),
        }
    }

    pub fn of(table: &Lct) -> Self {
        Self {
            conditions: table.conditions.clone(),
            results: table.results.clone(),
            feedback: table.feedback.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExtractOptions {
    /// Index into the module's processes; continuous assignments form one
    /// extra combinational process after them.
    pub process: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub lct: Lct,
    /// Condition columns added beyond the schema.
    pub appended_columns: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("module `{0}` has no process")]
    NoProcess(String),
    #[error("{count} processes drive schema results; select one")]
    AmbiguousProcess { count: usize },
    #[error("process index {index} out of range ({count} available)")]
    ProcessIndex { index: usize, count: usize },
    #[error("condition column `{0}` is not an input of the module")]
    UnknownCondition(String),
    #[error("result `{0}` is not an output of the module")]
    UnknownResult(String),
    #[error("result `{0}` is never assigned by the selected process")]
    UnassignedResult(String),
    #[error("{pos}: condition `{expr}` is not expressible over the schema: {reason}")]
    ConditionNotExpressible {
        pos: Pos,
        expr: String,
        reason: String,
    },
    #[error("{pos}: assignment to `{signal}`, which is not a schema result")]
    AssignmentToNonSchema { pos: Pos, signal: String },
    #[error("{pos}: unsupported right-hand side `{expr}`")]
    UnsupportedRhs { pos: Pos, expr: String },
    #[error("combinational path {row} leaves `{signal}` unassigned and infers a latch")]
    LatchInferred { signal: String, row: usize },
    #[error("more than {0} paths through the process")]
    TooManyPaths(usize),
    #[error("reconstruction is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

type Cube = BTreeMap<usize, u64>;

#[derive(Debug, Clone)]
struct Path {
    cube: Cube,
    assigns: BTreeMap<String, (Expr, Pos)>,
}

fn conjoin(a: &Cube, b: &Cube) -> Option<Cube> {
    let mut out = a.clone();
    for (&col, &v) in b {
        match out.insert(col, v) {
            Some(old) if old != v => return None,
            _ => {}
        }
    }
    Some(out)
}

enum Guard {
    /// True exactly on the cube; `None` when never true.
    Pos(Option<Cube>),
    /// False exactly on the cube.
    Neg(Cube),
}

struct Extractor<'a> {
    module: &'a HdlModule,
    clock: Option<&'a str>,
    columns: Vec<ConditionHeader>,
    widths: Vec<u32>,
    appended: Vec<String>,
    results: &'a [String],
}

impl<'a> Extractor<'a> {
    fn not_expressible(&self, pos: Pos, e: &Expr, reason: impl Into<String>) -> ExtractError {
        ExtractError::ConditionNotExpressible {
            pos,
            expr: e.to_string(),
            reason: reason.into(),
        }
    }

    fn is_input(&self, name: &str) -> bool {
        self.module.ports.is_input(name) && Some(name) != self.clock
    }

    /// Column for the control signal `name`, appending one for an input
    /// outside the schema.
    fn signal_column(&mut self, name: &str, pos: Pos, e: &Expr) -> Result<usize, ExtractError> {
        if let Some(i) = self
            .columns
            .iter()
            .position(|c| matches!(c, ConditionHeader::Signal(s) if s == name))
        {
            return Ok(i);
        }
        if !self.is_input(name) {
            return Err(self.not_expressible(pos, e, format!("`{name}` is not a module input")));
        }
        self.columns.push(ConditionHeader::Signal(name.to_string()));
        self.widths.push(self.module.width_of(name).unwrap_or(1));
        self.appended.push(name.to_string());
        Ok(self.columns.len() - 1)
    }

    fn expr_column(&self, e: &Expr) -> Option<usize> {
        self.columns
            .iter()
            .position(|c| matches!(c, ConditionHeader::Expr(x) if x == e))
    }

    fn append_expr_column(&mut self, e: &Expr, pos: Pos) -> Result<usize, ExtractError> {
        if let Some(i) = self.expr_column(e) {
            return Ok(i);
        }
        if e.contains_ternary() {
            return Err(self.not_expressible(pos, e, "ternary in a condition"));
        }
        for id in e.identifiers() {
            if !self.is_input(id) {
                return Err(self.not_expressible(pos, e, format!("`{id}` is not a module input")));
            }
        }
        self.columns.push(ConditionHeader::Expr(e.clone()));
        self.widths.push(1);
        self.appended.push(e.to_string());
        Ok(self.columns.len() - 1)
    }

    fn width(&self, e: &Expr) -> u32 {
        match e {
            Expr::Ident(n) => self.module.width_of(n).unwrap_or(1),
            Expr::Literal(l) => l.width.unwrap_or(32),
            Expr::Unary(UnaryOp::Not, x) => self.width(x),
            Expr::Unary(UnaryOp::LogicalNot, _) => 1,
            Expr::Binary(op, a, b) => {
                if op.is_comparison() || op.is_logical() {
                    1
                } else {
                    self.width(a).max(self.width(b))
                }
            }
            Expr::Ternary(_, a, b) => self.width(a).max(self.width(b)),
        }
    }

    /// Cubes whose union is exactly where `e` has truth value `pos`, over
    /// existing and input-signal columns. `Ok(None)` when that needs an
    /// expression column.
    fn dnf(&mut self, e: &Expr, pos: bool, at: Pos) -> Result<Option<Vec<Cube>>, ExtractError> {
        if let Some(col) = self.expr_column(e) {
            return Ok(Some(vec![Cube::from([(col, pos as u64)])]));
        }
        match e {
            Expr::Unary(UnaryOp::LogicalNot, x) => self.dnf(x, !pos, at),
            Expr::Unary(UnaryOp::Not, x) if self.width(x) == 1 => self.dnf(x, !pos, at),
            Expr::Literal(l) => Ok(Some(if (l.value != 0) == pos {
                vec![Cube::new()]
            } else {
                vec![]
            })),
            Expr::Ident(n) => {
                if self.module.width_of(n).unwrap_or(1) != 1 {
                    return Ok(None);
                }
                let col = self.signal_column(n, at, e)?;
                Ok(Some(vec![Cube::from([(col, pos as u64)])]))
            }
            Expr::Binary(op, a, b) => {
                let conj = match op {
                    BinaryOp::LogicalAnd => Some(true),
                    BinaryOp::LogicalOr => Some(false),
                    BinaryOp::And if self.width(a) == 1 && self.width(b) == 1 => Some(true),
                    BinaryOp::Or if self.width(a) == 1 && self.width(b) == 1 => Some(false),
                    _ => None,
                };
                if let Some(conj) = conj {
                    let (Some(l), Some(r)) = (self.dnf(a, pos, at)?, self.dnf(b, pos, at)?) else {
                        return Ok(None);
                    };
                    // A conjunction under positive polarity is a product.
                    return Ok(Some(if conj == pos {
                        let mut out = Vec::new();
                        for x in &l {
                            for y in &r {
                                if let Some(c) = conjoin(x, y) {
                                    out.push(c);
                                }
                            }
                        }
                        out
                    } else {
                        l.into_iter().chain(r).collect()
                    }));
                }
                if !op.is_comparison() {
                    return Ok(None);
                }
                let (sig, lit, op) = match (a.as_ref(), b.as_ref()) {
                    (Expr::Ident(s), Expr::Literal(l)) => (s, l, *op),
                    (Expr::Literal(l), Expr::Ident(s)) => (s, l, mirror(*op)),
                    _ => return Ok(None),
                };
                if self.module.width_of(sig).is_none() {
                    return Err(self.not_expressible(at, e, format!("unknown signal `{sig}`")));
                }
                let col = self.signal_column(sig, at, e)?;
                let width = self.widths[col];
                let holds = |v: u64| {
                    let r = match op {
                        BinaryOp::Eq => v == lit.value,
                        BinaryOp::Ne => v != lit.value,
                        BinaryOp::Lt => v < lit.value,
                        BinaryOp::Le => v <= lit.value,
                        BinaryOp::Gt => v > lit.value,
                        _ => v >= lit.value,
                    };
                    r == pos
                };
                if op == BinaryOp::Eq || op == BinaryOp::Ne {
                    let eq_pos = (op == BinaryOp::Eq) == pos;
                    if eq_pos {
                        return Ok(Some(if lit.value > mask(width) {
                            vec![]
                        } else {
                            vec![Cube::from([(col, lit.value)])]
                        }));
                    }
                }
                if domain_size(width) > MAX_ENUM_DOMAIN {
                    return Ok(None);
                }
                Ok(Some(
                    (0..domain_size(width))
                        .filter(|&v| holds(v))
                        .map(|v| Cube::from([(col, v)]))
                        .collect(),
                ))
            }
            _ => Ok(None),
        }
    }

    fn single(
        &mut self,
        e: &Expr,
        pos: bool,
        at: Pos,
    ) -> Result<Option<Option<Cube>>, ExtractError> {
        Ok(match self.dnf(e, pos, at)? {
            Some(mut cubes) if cubes.len() <= 1 => Some(cubes.pop()),
            _ => None,
        })
    }

    /// Reduces a branch condition to one cube, negated when only the
    /// complement is a cube. Residual terms become expression columns.
    fn guard(&mut self, e: &Expr, allow_neg: bool, at: Pos) -> Result<Guard, ExtractError> {
        if let Some(c) = self.single(e, true, at)? {
            return Ok(Guard::Pos(c));
        }
        if let Expr::Binary(BinaryOp::LogicalAnd, a, b) = e {
            let l = self.guard(a, false, at)?;
            let r = self.guard(b, false, at)?;
            let (Guard::Pos(l), Guard::Pos(r)) = (l, r) else {
                unreachable!("negation disabled")
            };
            return Ok(Guard::Pos(match (l, r) {
                (Some(l), Some(r)) => conjoin(&l, &r),
                _ => None,
            }));
        }
        if allow_neg {
            if let Some(Some(c)) = self.single(e, false, at)? {
                return Ok(Guard::Neg(c));
            }
        }
        let (inner, value) = match e {
            Expr::Unary(UnaryOp::LogicalNot, x) => (x.as_ref(), 0),
            _ => (e, 1),
        };
        let col = self.append_expr_column(inner, at)?;
        Ok(Guard::Pos(Some(Cube::from([(col, value)]))))
    }

    fn paths(&mut self, s: &Stmt) -> Result<Vec<Path>, ExtractError> {
        let out = match s {
            Stmt::Empty => vec![catch_all()],
            Stmt::Assign { lhs, rhs, pos, .. } => {
                if !self.results.iter().any(|r| r == lhs) {
                    return Err(ExtractError::AssignmentToNonSchema {
                        pos: *pos,
                        signal: lhs.clone(),
                    });
                }
                if let Expr::Ternary(c, a, b) = rhs {
                    let assign = |rhs: &Expr| Stmt::Assign {
                        lhs: lhs.clone(),
                        rhs: rhs.clone(),
                        blocking: true,
                        pos: *pos,
                    };
                    return self.paths(&Stmt::If {
                        cond: (**c).clone(),
                        then: Box::new(assign(a)),
                        els: Some(Box::new(assign(b))),
                        pos: *pos,
                    });
                }
                vec![Path {
                    cube: Cube::new(),
                    assigns: BTreeMap::from([(lhs.clone(), (rhs.clone(), *pos))]),
                }]
            }
            Stmt::Block(items) => {
                let mut acc = vec![catch_all()];
                for item in items {
                    let next = self.paths(item)?;
                    let mut product = Vec::new();
                    for a in &acc {
                        for b in &next {
                            if let Some(cube) = conjoin(&a.cube, &b.cube) {
                                let mut assigns = a.assigns.clone();
                                assigns
                                    .extend(b.assigns.iter().map(|(k, v)| (k.clone(), v.clone())));
                                product.push(Path { cube, assigns });
                            }
                        }
                        if product.len() > MAX_PATHS {
                            return Err(ExtractError::TooManyPaths(MAX_PATHS));
                        }
                    }
                    acc = product;
                }
                acc
            }
            Stmt::If {
                cond,
                then,
                els,
                pos,
            } => {
                let then_rows = self.paths(then)?;
                let else_rows = match els {
                    Some(e) => self.paths(e)?,
                    None => vec![catch_all()],
                };
                match self.guard(cond, true, *pos)? {
                    Guard::Pos(g) => guarded(g.as_ref(), then_rows, else_rows),
                    Guard::Neg(g) => guarded(Some(&g), else_rows, then_rows),
                }
            }
            Stmt::Case {
                subject,
                arms,
                default,
                pos,
            } => {
                let labels_are_guards = matches!(subject, Expr::Literal(l) if l.value == 1);
                let mut out = Vec::new();
                for arm in arms {
                    let body = self.paths(&arm.body)?;
                    for label in &arm.labels {
                        let cond = if labels_are_guards {
                            label.clone()
                        } else {
                            Expr::binary(BinaryOp::Eq, subject.clone(), label.clone())
                        };
                        let Guard::Pos(g) = self.guard(&cond, false, arm.pos)? else {
                            unreachable!("negation disabled")
                        };
                        if let Some(g) = g {
                            out.extend(body.iter().filter_map(|p| restrict(p, &g)));
                        }
                    }
                }
                match default {
                    Some(d) => out.extend(self.paths(d)?),
                    None => out.push(catch_all()),
                }
                let _ = pos;
                out
            }
        };
        if out.len() > MAX_PATHS {
            return Err(ExtractError::TooManyPaths(MAX_PATHS));
        }
        Ok(out)
    }

    fn cell(&self, result: &str, rhs: &Expr, pos: Pos) -> Result<CellValue, ExtractError> {
        match rhs {
            Expr::Literal(l) => {
                let width = self.module.width_of(result).unwrap_or(1);
                Ok(CellValue::Constant(BitVector::truncating(width, l.value)))
            }
            Expr::Ident(n) => Ok(CellValue::SignalRef(n.clone())),
            other => Err(ExtractError::UnsupportedRhs {
                pos,
                expr: other.to_string(),
            }),
        }
    }
}

fn mirror(op: BinaryOp) -> BinaryOp {
    match op {
        BinaryOp::Lt => BinaryOp::Gt,
        BinaryOp::Le => BinaryOp::Ge,
        BinaryOp::Gt => BinaryOp::Lt,
        BinaryOp::Ge => BinaryOp::Le,
        other => other,
    }
}

fn catch_all() -> Path {
    Path {
        cube: Cube::new(),
        assigns: BTreeMap::new(),
    }
}

fn restrict(p: &Path, g: &Cube) -> Option<Path> {
    conjoin(&p.cube, g).map(|cube| Path {
        cube,
        assigns: p.assigns.clone(),
    })
}

/// Rows for `if (g) a else b`: the guarded `a` rows, then `b` rows, which
/// are reached only where `g` fails.
fn guarded(g: Option<&Cube>, a: Vec<Path>, b: Vec<Path>) -> Vec<Path> {
    let mut out: Vec<Path> = match g {
        Some(g) => a.iter().filter_map(|p| restrict(p, g)).collect(),
        None => Vec::new(),
    };
    // Rows after a guard that is always true are unreachable.
    if g.is_some_and(|g| g.is_empty()) {
        return out;
    }
    out.extend(b);
    out
}

/// Candidate processes: the module's processes, then its continuous
/// assignments as one combinational process.
pub fn candidate_processes(module: &HdlModule) -> Vec<Process> {
    let mut out = module.processes.clone();
    if !module.assigns.is_empty() {
        out.push(Process {
            kind: ProcessKind::Combinational,
            body: Stmt::Block(
                module
                    .assigns
                    .iter()
                    .map(|a| Stmt::Assign {
                        lhs: a.lhs.clone(),
                        rhs: a.rhs.clone(),
                        blocking: true,
                        pos: a.pos,
                    })
                    .collect(),
            ),
            pos: module.assigns[0].pos,
        });
    }
    out
}

fn select_process(
    module: &HdlModule,
    schema: &Schema,
    opts: &ExtractOptions,
) -> Result<Process, ExtractError> {
    let mut candidates = candidate_processes(module);
    if candidates.is_empty() {
        return Err(ExtractError::NoProcess(module.name.clone()));
    }
    if let Some(index) = opts.process {
        if index >= candidates.len() {
            return Err(ExtractError::ProcessIndex {
                index,
                count: candidates.len(),
            });
        }
        return Ok(candidates.swap_remove(index));
    }
    if candidates.len() == 1 {
        return Ok(candidates.remove(0));
    }
    let driving: Vec<Process> = candidates
        .into_iter()
        .filter(|p| {
            p.body
                .assigned()
                .iter()
                .any(|a| schema.results.iter().any(|r| r == a))
        })
        .collect();
    match driving.len() {
        1 => Ok(driving.into_iter().next().expect("one element")),
        0 => Err(ExtractError::NoProcess(module.name.clone())),
        count => Err(ExtractError::AmbiguousProcess { count }),
    }
}

/// Reconstructs the table computed by one process of `module`.
pub fn hdl_to_lct(
    module: &HdlModule,
    schema: &Schema,
    opts: &ExtractOptions,
) -> Result<Extraction, ExtractError> {
    let process = select_process(module, schema, opts)?;
    let clock = process.clock();
    let clocking = match process.kind {
        ProcessKind::Clocked { .. } => Clocking::Clocked,
        ProcessKind::Combinational => Clocking::Combinational,
    };

    let mut widths = Vec::new();
    for c in &schema.conditions {
        match c {
            ConditionHeader::Signal(s) => {
                if !module.ports.is_input(s) || Some(s.as_str()) == clock {
                    return Err(ExtractError::UnknownCondition(s.clone()));
                }
                widths.push(module.width_of(s).unwrap_or(1));
            }
            ConditionHeader::Expr(_) => widths.push(1),
        }
    }
    for r in &schema.results {
        if module.ports.get(r).map(|p| p.direction) != Some(Direction::Output) {
            return Err(ExtractError::UnknownResult(r.clone()));
        }
    }
    let assigned = process.body.assigned();
    let mut notes = Vec::new();
    for r in &schema.results {
        if !assigned.contains(&r.as_str()) {
            if clocking == Clocking::Combinational {
                return Err(ExtractError::UnassignedResult(r.clone()));
            }
            notes.push(format!("`{r}` is never assigned and holds on every row"));
        }
    }

    let mut ex = Extractor {
        module,
        clock,
        columns: schema.conditions.clone(),
        widths,
        appended: Vec::new(),
        results: &schema.results,
    };
    let paths = ex.paths(&process.body)?;
    let leaves = process.body.leaf_count();

    let mut rows: Vec<CaseRow> = Vec::new();
    let mut empty_rows: Vec<(usize, CaseRow, String)> = Vec::new();
    for (i, path) in paths.iter().enumerate() {
        let inputs: Vec<CellValue> = (0..ex.columns.len())
            .map(|c| match path.cube.get(&c) {
                Some(&v) => CellValue::Constant(BitVector::truncating(ex.widths[c], v)),
                None => CellValue::DontCare,
            })
            .collect();
        let mut outputs = Vec::with_capacity(schema.results.len());
        let mut missing = None;
        for r in &schema.results {
            match path.assigns.get(r) {
                Some((rhs, pos)) => outputs.push(ex.cell(r, rhs, *pos)?),
                None if clocking == Clocking::Clocked => {
                    outputs.push(CellValue::SignalRef(r.clone()))
                }
                None => {
                    missing.get_or_insert_with(|| r.clone());
                    outputs.push(CellValue::DontCare);
                }
            }
        }
        let row = CaseRow::new(inputs, outputs);
        match missing {
            None => rows.push(row),
            Some(signal) if path.assigns.is_empty() => empty_rows.push((i, row, signal)),
            Some(signal) => return Err(ExtractError::LatchInferred { signal, row: i }),
        }
    }
    // A path that assigns nothing only matters where a later row would
    // otherwise claim its inputs.
    for (i, empty, signal) in &empty_rows {
        let later_overlaps = paths
            .iter()
            .enumerate()
            .skip(i + 1)
            .filter(|(_, p)| !p.assigns.is_empty())
            .any(|(j, _)| {
                let later = rows_for_path(&ex, &paths[j]);
                rows_overlap(empty, &later)
            });
        if later_overlaps {
            return Err(ExtractError::LatchInferred {
                signal: signal.clone(),
                row: *i,
            });
        }
        notes.push(format!("path {i} assigns nothing and is left unmatched"));
    }
    if clocking == Clocking::Clocked {
        // Unmatched registers hold, so trailing all-hold rows add nothing.
        while rows.last().is_some_and(|r| {
            r.outputs
                .iter()
                .zip(&schema.results)
                .all(|(c, name)| matches!(c, CellValue::SignalRef(s) if s == name))
        }) {
            rows.pop();
            notes.push("trailing hold row dropped".to_string());
        }
    }
    if rows.len() > leaves {
        notes.push(format!("{} rows from {leaves} leaf branches", rows.len()));
    }

    let mut ports = PortMap::default();
    for p in &module.ports.entries {
        if Some(p.name.as_str()) != clock {
            ports.push(p.direction, &p.name, p.width);
        }
    }
    let lct = Lct {
        name: module.name.clone(),
        clocking,
        conditions: ex.columns,
        results: schema.results.clone(),
        rows,
        ports,
        feedback: schema.feedback.clone(),
    };
    let violations = validate_lct(&lct);
    if !violations.is_empty() {
        return Err(ExtractError::Invalid(violations));
    }
    Ok(Extraction {
        lct,
        appended_columns: ex.appended,
        notes,
    })
}

fn rows_for_path(ex: &Extractor<'_>, path: &Path) -> CaseRow {
    let inputs = (0..ex.columns.len())
        .map(|c| match path.cube.get(&c) {
            Some(&v) => CellValue::Constant(BitVector::truncating(ex.widths[c], v)),
            None => CellValue::DontCare,
        })
        .collect();
    CaseRow::new(inputs, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::canonicalize;
    use crate::bundled;
    use crate::codegen::{gen_unit, gen_unit_with, GenOptions, Style};
    use crate::hdl::parse_hdl;

    fn round_trip(table: &Lct, opts: &GenOptions) -> Lct {
        let (text, _) = gen_unit_with(table, opts).unwrap();
        let module = parse_hdl(&text).unwrap();
        hdl_to_lct(&module, &Schema::of(table), &ExtractOptions::default())
            .unwrap()
            .lct
    }

    #[test]
    fn bundled_tables_round_trip_canonically() {
        for table in bundled::all() {
            let back = round_trip(&table, &GenOptions::default());
            assert_eq!(
                canonicalize(&back).rows,
                canonicalize(&table).rows,
                "{}",
                table.name
            );
        }
    }

    #[test]
    fn both_styles_round_trip_to_equivalent() {
        use crate::equivalence::{compare, AliasMap};
        for table in bundled::all() {
            for style in [Style::IfChain, Style::CaseNested] {
                let back = round_trip(
                    &table,
                    &GenOptions {
                        style,
                        async_reset: false,
                    },
                );
                let r = compare(&table, &back, &AliasMap::default(), 1 << 20).unwrap();
                assert!(r.is_equivalent(), "{} {style:?}: {r:?}", table.name);
            }
        }
    }

    #[test]
    fn async_reset_round_trips() {
        let t = bundled::table2();
        let back = round_trip(
            &t,
            &GenOptions {
                style: Style::IfChain,
                async_reset: true,
            },
        );
        assert_eq!(canonicalize(&back).rows, canonicalize(&t).rows);
        assert!(back.ports.get("clk").is_none());
    }

    #[test]
    fn table2_keeps_hold_row() {
        let t = bundled::table2();
        let back = round_trip(&t, &GenOptions::default());
        let holds = back
            .rows
            .iter()
            .filter(|r| {
                r.outputs
                    .iter()
                    .all(|c| matches!(c, CellValue::SignalRef(s) if back.results.contains(s)))
            })
            .count();
        assert!(holds >= 1);
    }

    #[test]
    fn ternary_assign_gives_two_rows() {
        let src = "module m(input sel, input [3:0] a, input [3:0] b, output [3:0] y);\n  assign y = sel ? b : a;\nendmodule";
        let module = parse_hdl(src).unwrap();
        let schema = Schema::new(
            vec![ConditionHeader::Signal("sel".into())],
            vec!["y".into()],
        );
        let ex = hdl_to_lct(&module, &schema, &ExtractOptions::default()).unwrap();
        assert_eq!(ex.lct.rows.len(), 2);
        assert_eq!(ex.lct.rows[0].inputs, vec![CellValue::constant(1, 1)]);
        assert_eq!(
            ex.lct.rows[0].outputs,
            vec![CellValue::SignalRef("b".into())]
        );
        assert_eq!(ex.lct.rows[1].inputs, vec![CellValue::DontCare]);
        assert_eq!(
            ex.lct.rows[1].outputs,
            vec![CellValue::SignalRef("a".into())]
        );
    }

    #[test]
    fn negated_wide_comparison_swaps_branches() {
        let src = "module m(input [1:0] s, output reg y);\n  always @(*) if (s != 2'd2) y = 1'b0; else y = 1'b1;\nendmodule";
        let module = parse_hdl(src).unwrap();
        let schema = Schema::new(vec![ConditionHeader::Signal("s".into())], vec!["y".into()]);
        let ex = hdl_to_lct(&module, &schema, &ExtractOptions::default()).unwrap();
        assert_eq!(ex.lct.rows.len(), 2);
        assert_eq!(ex.lct.rows[0].inputs, vec![CellValue::constant(2, 2)]);
        assert_eq!(ex.lct.rows[0].outputs, vec![CellValue::constant(1, 1)]);
    }

    #[test]
    fn mixed_condition_becomes_expression_column() {
        let src = "module m(input [3:0] a, input [3:0] b, input en, output reg y);\n  always @(*) begin\n    y = 1'b0;\n    if (en && a == b) y = 1'b1;\n  end\nendmodule";
        let module = parse_hdl(src).unwrap();
        let schema = Schema::new(vec![ConditionHeader::Signal("en".into())], vec!["y".into()]);
        let ex = hdl_to_lct(&module, &schema, &ExtractOptions::default()).unwrap();
        assert_eq!(ex.appended_columns, vec!["a == b".to_string()]);
        assert_eq!(ex.lct.conditions.len(), 2);
        assert_eq!(
            ex.lct.rows[0].inputs,
            vec![CellValue::constant(1, 1), CellValue::constant(1, 1)]
        );
    }

    #[test]
    fn errors_are_specific() {
        let schema = Schema::new(vec![ConditionHeader::Signal("s".into())], vec!["y".into()]);
        let src = "module m(input s, output reg y, output reg z);\n  always @(*) begin y = s; z = 1'b1; end\nendmodule";
        assert!(matches!(
            hdl_to_lct(
                &parse_hdl(src).unwrap(),
                &schema,
                &ExtractOptions::default()
            ),
            Err(ExtractError::AssignmentToNonSchema { .. })
        ));
        let src = "module m(input s, input [1:0] t, output reg y);\n  always @(*) if (s) ; else if (t == 2'd1) y = 1'b0;\nendmodule";
        assert!(matches!(
            hdl_to_lct(
                &parse_hdl(src).unwrap(),
                &schema,
                &ExtractOptions::default()
            ),
            Err(ExtractError::LatchInferred { .. })
        ));
        let src = "module m(input s, output reg y, output reg w);\n  always @(*) begin w = 1'b0; if (w) y = 1'b1; else y = 1'b0; end\nendmodule";
        let schema2 = Schema::new(
            vec![ConditionHeader::Signal("s".into())],
            vec!["y".into(), "w".into()],
        );
        assert!(matches!(
            hdl_to_lct(
                &parse_hdl(src).unwrap(),
                &schema2,
                &ExtractOptions::default()
            ),
            Err(ExtractError::ConditionNotExpressible { .. })
        ));
        let src = "module m(input s, output reg y);\n  always @(*) y = s + 1'b1;\nendmodule";
        assert!(parse_hdl(src).is_err());
    }

    #[test]
    fn unreachable_default_is_shadowed() {
        let src = "module m(input s, output reg y);\n  always @(*) case (s)\n    1'b0: y = 1'b1;\n    1'b1: y = 1'b0;\n    default: y = 1'b0;\n  endcase\nendmodule";
        let module = parse_hdl(src).unwrap();
        let schema = Schema::new(vec![ConditionHeader::Signal("s".into())], vec!["y".into()]);
        let ex = hdl_to_lct(&module, &schema, &ExtractOptions::default()).unwrap();
        assert_eq!(ex.lct.rows.len(), 3);
        assert_eq!(canonicalize(&ex.lct).rows.len(), 2);
    }

    #[test]
    fn row_count_bounded_by_leaves() {
        let t = bundled::table3();
        let text = gen_unit(&t, Style::IfChain).unwrap();
        let module = parse_hdl(&text).unwrap();
        let ex = hdl_to_lct(&module, &Schema::of(&t), &ExtractOptions::default()).unwrap();
        assert!(ex.lct.rows.len() <= module.processes[0].body.leaf_count());
    }
}
