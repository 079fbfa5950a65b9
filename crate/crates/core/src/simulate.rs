// SPDX-License-Identifier: Apache-2.0

//! Reference interpreter for tables under first-match row priority.
//!
//! Data inputs are never computed on: an output cell that names a data input
//! yields an opaque [`SymValue::Token`]. An output cell that names a signal
//! condition column yields that column's value, since the value is fixed by
//! the row's control assignment.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitvec::{mask, parse_literal, BitVector};
use crate::expr::{BinaryOp, Expr, UnaryOp};
use crate::lexer::is_identifier;
use crate::model::{CellValue, Clocking, ConditionHeader, Direction, Lct, PortMap};

pub type Inputs = BTreeMap<String, BitVector>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymValue {
    Known(BitVector),
    Token(String),
    /// The register keeps its previous value.
    Hold,
    /// No row matched a combinational assignment.
    Unspecified,
    /// Register contents before any assignment, in [`InitMode::Unknown`].
    Unknown,
}

impl fmt::Display for SymValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymValue::Known(bv) => write!(f, "{bv}"),
            SymValue::Token(s) => f.write_str(s),
            SymValue::Hold => f.write_str("hold"),
            SymValue::Unspecified => f.write_str("unspecified"),
            SymValue::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("input `{0}` is needed but was not supplied")]
    MissingInput(String),
    #[error("operands of `{op}` have widths {left} and {right}")]
    WidthMismatch {
        op: &'static str,
        left: u32,
        right: u32,
    },
    #[error("table `{table}` is {actual}, operation needs {expected}")]
    Clocking {
        table: String,
        expected: Clocking,
        actual: Clocking,
    },
}

/// Evaluates an expression to its full value and width; unsized literals
/// report no width.
pub fn eval_expr_value(expr: &Expr, inputs: &Inputs) -> Result<(u64, Option<u32>), SimError> {
    Ok(match expr {
        Expr::Ident(name) => {
            let bv = inputs
                .get(name)
                .ok_or_else(|| SimError::MissingInput(name.clone()))?;
            (bv.value(), Some(bv.width()))
        }
        Expr::Literal(l) => (l.value, l.width),
        Expr::Unary(UnaryOp::Not, e) => {
            let (v, w) = eval_expr_value(e, inputs)?;
            (!v & mask(w.unwrap_or(32)), w)
        }
        Expr::Unary(UnaryOp::LogicalNot, e) => {
            let (v, _) = eval_expr_value(e, inputs)?;
            ((v == 0) as u64, Some(1))
        }
        Expr::Binary(op, a, b) => {
            let (x, wx) = eval_expr_value(a, inputs)?;
            let (y, wy) = eval_expr_value(b, inputs)?;
            let bit = |c: bool| (c as u64, Some(1));
            match op {
                BinaryOp::And | BinaryOp::Or | BinaryOp::Xor => {
                    if let (Some(l), Some(r)) = (wx, wy) {
                        if l != r {
                            return Err(SimError::WidthMismatch {
                                op: op.symbol(),
                                left: l,
                                right: r,
                            });
                        }
                    }
                    let v = match op {
                        BinaryOp::And => x & y,
                        BinaryOp::Or => x | y,
                        _ => x ^ y,
                    };
                    (v, wx.or(wy))
                }
                BinaryOp::LogicalAnd => bit(x != 0 && y != 0),
                BinaryOp::LogicalOr => bit(x != 0 || y != 0),
                BinaryOp::Eq => bit(x == y),
                BinaryOp::Ne => bit(x != y),
                BinaryOp::Lt => bit(x < y),
                BinaryOp::Le => bit(x <= y),
                BinaryOp::Gt => bit(x > y),
                BinaryOp::Ge => bit(x >= y),
            }
        }
        Expr::Ternary(c, a, b) => {
            let (cv, _) = eval_expr_value(c, inputs)?;
            let (x, wx) = eval_expr_value(a, inputs)?;
            let (y, wy) = eval_expr_value(b, inputs)?;
            let w = match (wx, wy) {
                (Some(l), Some(r)) => Some(l.max(r)),
                (l, r) => l.or(r),
            };
            (if cv != 0 { x } else { y }, w)
        }
    })
}

/// Evaluates a condition expression to a single truth bit.
pub fn eval_expr(expr: &Expr, inputs: &Inputs) -> Result<BitVector, SimError> {
    let (v, _) = eval_expr_value(expr, inputs)?;
    Ok(BitVector::bit(v != 0))
}

/// Condition-column values computed on demand, so inputs that no examined
/// row constrains may be absent.
struct Columns<'a> {
    table: &'a Lct,
    inputs: &'a Inputs,
    cache: Vec<Option<u64>>,
}

impl<'a> Columns<'a> {
    fn new(table: &'a Lct, inputs: &'a Inputs) -> Self {
        Self {
            table,
            inputs,
            cache: vec![None; table.conditions.len()],
        }
    }

    fn get(&mut self, c: usize) -> Result<u64, SimError> {
        if let Some(v) = self.cache[c] {
            return Ok(v);
        }
        let v = match &self.table.conditions[c] {
            ConditionHeader::Signal(s) => {
                let bv = self
                    .inputs
                    .get(s)
                    .ok_or_else(|| SimError::MissingInput(s.clone()))?;
                bv.value() & mask(self.table.condition_width(c))
            }
            ConditionHeader::Expr(e) => eval_expr(e, self.inputs)?.value(),
        };
        self.cache[c] = Some(v);
        Ok(v)
    }

    fn first_match(&mut self) -> Result<Option<usize>, SimError> {
        'rows: for (ri, row) in self.table.rows.iter().enumerate() {
            for (c, cell) in row.inputs.iter().enumerate() {
                if let CellValue::Constant(bv) = cell {
                    if self.get(c)? != bv.value() {
                        continue 'rows;
                    }
                }
            }
            return Ok(Some(ri));
        }
        Ok(None)
    }
}

/// Resolves one output cell given a way to read signal-column values.
fn resolve_cell(
    table: &Lct,
    out: usize,
    cell: &CellValue,
    column: &mut impl FnMut(usize) -> Result<u64, SimError>,
) -> Result<SymValue, SimError> {
    let width = table.result_width(out);
    Ok(match cell {
        CellValue::Constant(bv) => SymValue::Known(bv.resize(width)),
        CellValue::DontCare => SymValue::Unspecified,
        CellValue::SignalRef(s) if *s == table.results[out] => SymValue::Hold,
        CellValue::SignalRef(s) => match table.signal_column(s) {
            Some(c) => SymValue::Known(BitVector::truncating(width, column(c)?)),
            None => SymValue::Token(s.clone()),
        },
    })
}

/// Symbolic outputs of `row` at a point of the control space given as
/// column values; holds stay [`SymValue::Hold`].
pub fn row_outputs(table: &Lct, row: usize, columns: &[u64]) -> Vec<SymValue> {
    table.rows[row]
        .outputs
        .iter()
        .enumerate()
        .map(|(o, cell)| {
            resolve_cell(table, o, cell, &mut |c| Ok(columns[c])).expect("columns supplied")
        })
        .collect()
}

/// First matching row and its symbolic outputs, in result-column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub row: Option<usize>,
    pub outputs: Vec<(String, SymValue)>,
}

impl Evaluation {
    pub fn get(&self, name: &str) -> Option<&SymValue> {
        self.outputs.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

/// Evaluates either kind of table without state: holds appear as
/// [`SymValue::Hold`] and no match yields [`SymValue::Unspecified`].
pub fn eval_symbolic(table: &Lct, inputs: &Inputs) -> Result<Evaluation, SimError> {
    let mut cols = Columns::new(table, inputs);
    let row = cols.first_match()?;
    let outputs = match row {
        None => table
            .results
            .iter()
            .map(|r| (r.clone(), SymValue::Unspecified))
            .collect(),
        Some(ri) => {
            let mut out = Vec::with_capacity(table.results.len());
            for (o, cell) in table.rows[ri].outputs.iter().enumerate() {
                let v = resolve_cell(table, o, cell, &mut |c| cols.get(c))?;
                out.push((table.results[o].clone(), v));
            }
            out
        }
    };
    Ok(Evaluation { row, outputs })
}

fn require(table: &Lct, expected: Clocking) -> Result<(), SimError> {
    if table.clocking != expected {
        return Err(SimError::Clocking {
            table: table.name.clone(),
            expected,
            actual: table.clocking,
        });
    }
    Ok(())
}

pub fn eval_comb(table: &Lct, inputs: &Inputs) -> Result<Evaluation, SimError> {
    require(table, Clocking::Combinational)?;
    eval_symbolic(table, inputs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    #[default]
    Zero,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SeqState {
    pub registers: BTreeMap<String, SymValue>,
}

impl SeqState {
    pub fn initial(table: &Lct, mode: InitMode) -> Self {
        let registers = table
            .results
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let v = match mode {
                    InitMode::Zero => SymValue::Known(BitVector::zero(table.result_width(i))),
                    InitMode::Unknown => SymValue::Unknown,
                };
                (r.clone(), v)
            })
            .collect();
        Self { registers }
    }

    pub fn get(&self, name: &str) -> Option<&SymValue> {
        self.registers.get(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub state: SeqState,
    /// `None` when no row matched and every register held.
    pub row: Option<usize>,
}

pub fn step_clocked(table: &Lct, state: &SeqState, inputs: &Inputs) -> Result<Step, SimError> {
    require(table, Clocking::Clocked)?;
    let ev = eval_symbolic(table, inputs)?;
    let mut next = state.clone();
    if ev.row.is_some() {
        for (name, v) in ev.outputs {
            if v != SymValue::Hold {
                next.registers.insert(name, v);
            }
        }
    }
    Ok(Step {
        state: next,
        row: ev.row,
    })
}

/// Runs one cycle per stimulus vector. Feedback bindings drive their
/// condition input from the previous cycle's register. Combinational tables
/// report their outputs as the per-cycle state.
pub fn run_trace(
    table: &Lct,
    stimulus: &[Inputs],
    initial: &SeqState,
) -> Result<Vec<SeqState>, SimError> {
    let mut state = initial.clone();
    let mut out = Vec::with_capacity(stimulus.len());
    for vector in stimulus {
        let mut inputs = vector.clone();
        for fb in &table.feedback {
            if let Some(SymValue::Known(bv)) = state.get(&fb.result) {
                inputs.insert(fb.condition.clone(), *bv);
            }
        }
        state = match table.clocking {
            Clocking::Clocked => step_clocked(table, &state, &inputs)?.state,
            Clocking::Combinational => SeqState {
                registers: eval_comb(table, &inputs)?.outputs.into_iter().collect(),
            },
        };
        out.push(state.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("stimulus line {line}: {message}")]
pub struct StimulusError {
    pub line: usize,
    pub message: String,
}

/// One cycle of a stimulus file: input values plus optional expected
/// output values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cycle {
    pub inputs: Inputs,
    pub expected: Vec<(String, SymValue)>,
}

/// Parses `name=value` lines, one cycle per blank-line-separated block.
/// Output names give expected values; `X` leaves an output unchecked.
pub fn parse_stimulus(text: &str, ports: &PortMap) -> Result<Vec<Cycle>, StimulusError> {
    let mut cycles = Vec::new();
    let mut cur: Option<Cycle> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if raw.trim().is_empty() {
            if let Some(c) = cur.take() {
                cycles.push(c);
            }
            continue;
        }
        if body.is_empty() {
            continue;
        }
        let err = |message: String| StimulusError { line, message };
        let cycle = cur.get_or_insert_with(Cycle::default);
        for item in body.split_whitespace() {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| err(format!("expected name=value, found `{item}`")))?;
            let port = ports
                .get(name)
                .ok_or_else(|| err(format!("`{name}` is not a port")))?;
            match port.direction {
                Direction::Input => {
                    let bv = parse_literal(value, Some(port.width))
                        .map_err(|e| err(format!("`{name}`: {e}")))?;
                    cycle.inputs.insert(name.to_string(), bv);
                }
                Direction::Output => {
                    if value == "X" {
                        continue;
                    }
                    let v = if is_identifier(value) {
                        SymValue::Token(value.to_string())
                    } else {
                        SymValue::Known(
                            parse_literal(value, Some(port.width))
                                .map_err(|e| err(format!("`{name}`: {e}")))?,
                        )
                    };
                    cycle.expected.push((name.to_string(), v));
                }
            }
        }
    }
    if let Some(c) = cur {
        cycles.push(c);
    }
    Ok(cycles)
}

fn format_value(v: &SymValue) -> String {
    match v {
        SymValue::Known(bv) => bv.value().to_string(),
        SymValue::Token(s) => s.clone(),
        SymValue::Hold => "hold".into(),
        SymValue::Unspecified => "-".into(),
        SymValue::Unknown => "X".into(),
    }
}

/// Renders a trace in the stimulus grammar, results in column order.
pub fn format_trace(table: &Lct, states: &[SeqState]) -> String {
    let blocks: Vec<String> = states
        .iter()
        .map(|s| {
            let mut block = String::new();
            for r in &table.results {
                if let Some(v) = s.get(r) {
                    block.push_str(&format!("{r}={}\n", format_value(v)));
                }
            }
            block
        })
        .collect();
    blocks.join("\n")
}
