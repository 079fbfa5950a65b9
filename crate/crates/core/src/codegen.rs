// SPDX-License-Identifier: Apache-2.0

//! Forward transform: tables to Verilog modules, connectivity tables to
//! structural top modules.
//!
//! Row order maps to branch priority. Combinational processes open with
//! zero assignments to every output so that unmatched inputs never infer a
//! latch. Clocked processes leave held registers unassigned in a branch.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bitvec::BitVector;
use crate::model::{
    validate_lct, CaseRow, CellValue, Clocking, ConditionHeader, ConnectivityError,
    ConnectivityTable, Direction, Lct, NetContext, PortMap, Violation,
};
use crate::table_io::{serialize_csv, serialize_manifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Style {
    /// One `if`/`else if` chain in row order.
    #[default]
    IfChain,
    /// Nested `case` statements, one level per decided column.
    CaseNested,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GenOptions {
    pub style: Style,
    /// Adds the reset signal to the sensitivity list of clocked processes.
    pub async_reset: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GenReport {
    /// Combinational outputs that receive a zero default before the
    /// priority structure.
    pub zero_defaults: Vec<String>,
    /// Rows never reached because an earlier row constrains nothing.
    pub unreachable_rows: Vec<usize>,
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodegenError {
    #[error("table is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("nested case style cannot express expression column `{0}`")]
    ExprInCase(String),
    #[error("asynchronous reset needs a first row that tests only a reset signal for 0")]
    NoAsyncReset,
    #[error(transparent)]
    Connectivity(#[from] ConnectivityError),
    #[error("instance `{instance}` names unknown unit `{unit}`")]
    UnknownUnit { instance: String, unit: String },
    #[error("instance `{instance}` binds `{port}`, which unit `{unit}` does not declare")]
    UnknownPort {
        instance: String,
        unit: String,
        port: String,
    },
    #[error("instance `{instance}` binds `{port}` as {binding} but the port is {declared}")]
    DirectionMismatch {
        instance: String,
        port: String,
        binding: Direction,
        declared: Direction,
    },
    #[error("instance `{instance}` binds {size} bits to `{port}`, which is {width} bits")]
    SizeMismatch {
        instance: String,
        port: String,
        size: u32,
        width: u32,
    },
}

/// SHA-256 of the unit's canonical on-disk text.
pub fn unit_digest(table: &Lct) -> String {
    let mut h = Sha256::new();
    h.update(serialize_manifest(table).as_bytes());
    h.update(serialize_csv(table).as_bytes());
    hex::encode(h.finalize())
}

fn range(width: u32) -> String {
    if width == 1 {
        String::new()
    } else {
        format!("[{}:0] ", width - 1)
    }
}

/// Name of the clock port, avoiding collisions with table ports.
pub fn clock_name(ports: &PortMap) -> String {
    let mut name = "clk".to_string();
    while ports.get(&name).is_some() {
        name.insert_str(0, "lct_");
    }
    name
}

/// The module line and port declarations, ending with `);`. Clocked
/// tables get a leading clock input.
pub fn module_header(table: &Lct) -> String {
    let mut out = String::new();
    let clk = clock_name(&table.ports);
    let mut decls = Vec::new();
    if table.clocking == Clocking::Clocked {
        decls.push(format!("input  wire {clk}"));
    }
    for p in &table.ports.entries {
        let kind = match p.direction {
            Direction::Input => "input  wire",
            Direction::Output if table.result_index(&p.name).is_some() => "output reg ",
            Direction::Output => "output wire",
        };
        decls.push(format!("{kind} {}{}", range(p.width), p.name));
    }
    let _ = writeln!(out, "module {} (", table.name);
    for (i, d) in decls.iter().enumerate() {
        let sep = if i + 1 == decls.len() { "" } else { "," };
        let _ = writeln!(out, "    {d}{sep}");
    }
    let _ = writeln!(out, ");");
    out
}

pub fn gen_unit(table: &Lct, style: Style) -> Result<String, CodegenError> {
    gen_unit_with(
        table,
        &GenOptions {
            style,
            ..Default::default()
        },
    )
    .map(|(text, _)| text)
}

pub fn gen_unit_with(table: &Lct, opts: &GenOptions) -> Result<(String, GenReport), CodegenError> {
    let violations = validate_lct(table);
    if !violations.is_empty() {
        return Err(CodegenError::Invalid(violations));
    }
    if opts.style == Style::CaseNested {
        if let Some(c) = table.conditions.iter().find(|c| c.is_expr()) {
            return Err(CodegenError::ExprInCase(c.name()));
        }
    }
    let reset = if opts.async_reset && table.clocking == Clocking::Clocked {
        Some(async_reset_signal(table).ok_or(CodegenError::NoAsyncReset)?)
    } else {
        None
    };

    let mut report = GenReport {
        digest: unit_digest(table),
        ..Default::default()
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "// lct-gen: source={}.lct digest=sha256:{}",
        table.name, report.digest
    );
    out.push_str(&module_header(table));
    let clk = clock_name(&table.ports);

    let emitter = Emitter { table };
    match table.clocking {
        Clocking::Combinational => {
            let _ = writeln!(out, "    always @(*) begin");
            for (i, r) in table.results.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "        {r} = {};",
                    BitVector::zero(table.result_width(i))
                );
                report.zero_defaults.push(r.clone());
            }
        }
        Clocking::Clocked => match &reset {
            Some(rst) => {
                let _ = writeln!(out, "    always @(posedge {clk} or negedge {rst}) begin");
            }
            None => {
                let _ = writeln!(out, "    always @(posedge {clk}) begin");
            }
        },
    }
    let rows: Vec<usize> = (0..table.rows.len()).collect();
    match opts.style {
        Style::IfChain => emitter.if_chain(&mut out, &rows, 2, &mut report),
        Style::CaseNested => {
            let decided = vec![false; table.conditions.len()];
            emitter.case_tree(&mut out, &rows, &decided, 2, &mut report);
            report.unreachable_rows.sort_unstable();
            report.unreachable_rows.dedup();
        }
    }
    let _ = writeln!(out, "    end");
    let _ = writeln!(out, "endmodule");
    Ok((out, report))
}

/// The reset signal when the first row tests exactly one reset-like signal
/// for zero.
fn async_reset_signal(table: &Lct) -> Option<String> {
    let first = table.rows.first()?;
    let constrained: Vec<(usize, &CellValue)> = first
        .inputs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_dont_care())
        .collect();
    match constrained.as_slice() {
        [(c, CellValue::Constant(bv))] if bv.value() == 0 => {
            let name = table.conditions[*c].signal()?;
            let lower = name.to_ascii_lowercase();
            (lower.contains("rst") || lower.contains("reset")).then(|| name.to_string())
        }
        _ => None,
    }
}

struct Emitter<'a> {
    table: &'a Lct,
}

fn indent(level: usize) -> String {
    "    ".repeat(level)
}

impl Emitter<'_> {
    fn assign_op(&self) -> &'static str {
        match self.table.clocking {
            Clocking::Clocked => "<=",
            Clocking::Combinational => "=",
        }
    }

    fn assignments(&self, out: &mut String, row: &CaseRow, level: usize) {
        let op = self.assign_op();
        for (i, cell) in row.outputs.iter().enumerate() {
            let name = &self.table.results[i];
            let rhs = match cell {
                CellValue::Constant(bv) => bv.resize(self.table.result_width(i)).to_string(),
                CellValue::SignalRef(s) if s == name => continue,
                CellValue::SignalRef(s) => s.clone(),
                CellValue::DontCare => continue,
            };
            let _ = writeln!(out, "{}{name} {op} {rhs};", indent(level));
        }
    }

    fn guard(&self, row: &CaseRow) -> Option<String> {
        let terms: Vec<String> = row
            .inputs
            .iter()
            .enumerate()
            .filter_map(|(c, cell)| {
                let CellValue::Constant(bv) = cell else {
                    return None;
                };
                Some(match &self.table.conditions[c] {
                    ConditionHeader::Signal(s) => {
                        let lit = BitVector::truncating(self.table.condition_width(c), bv.value());
                        format!("({s} == {})", lit.to_binary_literal())
                    }
                    ConditionHeader::Expr(e) if bv.is_true() => format!("({e})"),
                    ConditionHeader::Expr(e) => format!("!({e})"),
                })
            })
            .collect();
        (!terms.is_empty()).then(|| terms.join(" && "))
    }

    fn if_chain(&self, out: &mut String, rows: &[usize], level: usize, report: &mut GenReport) {
        let pad = indent(level);
        let mut opened = false;
        for (k, &ri) in rows.iter().enumerate() {
            let row = &self.table.rows[ri];
            match self.guard(row) {
                Some(g) => {
                    let kw = if opened { "end else if" } else { "if" };
                    let _ = writeln!(out, "{pad}{kw} ({g}) begin");
                    opened = true;
                    self.assignments(out, row, level + 1);
                }
                None => {
                    if opened {
                        let _ = writeln!(out, "{pad}end else begin");
                        self.assignments(out, row, level + 1);
                    } else {
                        self.assignments(out, row, level);
                    }
                    report
                        .unreachable_rows
                        .extend(rows[k + 1..].iter().copied());
                    break;
                }
            }
        }
        if opened {
            let _ = writeln!(out, "{pad}end");
        }
    }

    fn case_tree(
        &self,
        out: &mut String,
        rows: &[usize],
        decided: &[bool],
        level: usize,
        report: &mut GenReport,
    ) {
        let pad = indent(level);
        let Some(&first) = rows.first() else {
            return;
        };
        let column = self.table.rows[first]
            .inputs
            .iter()
            .enumerate()
            .find(|(c, cell)| !decided[*c] && !cell.is_dont_care())
            .map(|(c, _)| c);
        let Some(c) = column else {
            self.assignments(out, &self.table.rows[first], level);
            report.unreachable_rows.extend(rows[1..].iter().copied());
            return;
        };
        let width = self.table.condition_width(c);
        let mut values: Vec<u64> = rows
            .iter()
            .filter_map(|&r| match &self.table.rows[r].inputs[c] {
                CellValue::Constant(bv) => Some(bv.value()),
                _ => None,
            })
            .collect();
        values.sort_unstable();
        values.dedup();
        let mut next = decided.to_vec();
        next[c] = true;
        let name = self.table.conditions[c].name();
        let _ = writeln!(out, "{pad}case ({name})");
        for v in &values {
            let arm: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|&r| match &self.table.rows[r].inputs[c] {
                    CellValue::Constant(bv) => bv.value() == *v,
                    _ => true,
                })
                .collect();
            let lit = BitVector::truncating(width, *v).to_binary_literal();
            let _ = writeln!(out, "{pad}    {lit}: begin");
            self.case_tree(out, &arm, &next, level + 2, report);
            let _ = writeln!(out, "{pad}    end");
        }
        let covered = width < 64 && values.len() as u64 == 1u64 << width;
        if !covered {
            let rest: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|&r| self.table.rows[r].inputs[c].is_dont_care())
                .collect();
            let _ = writeln!(out, "{pad}    default: begin");
            self.case_tree(out, &rest, &next, level + 2, report);
            let _ = writeln!(out, "{pad}    end");
        }
        let _ = writeln!(out, "{pad}endcase");
    }
}

/// Port interface of a unit as seen by a structural parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitInterface {
    pub ports: PortMap,
    pub clocked: bool,
}

impl From<&Lct> for UnitInterface {
    fn from(t: &Lct) -> Self {
        Self {
            ports: t.ports.clone(),
            clocked: t.clocking == Clocking::Clocked,
        }
    }
}

/// Top module wiring the instances of `conn` together. External nets become
/// ports and internal nets become wires; clocked units share one clock.
pub fn gen_structural(
    conn: &ConnectivityTable,
    units: &BTreeMap<String, UnitInterface>,
) -> Result<String, CodegenError> {
    conn.validate()?;
    for inst in &conn.instances {
        let unit = units
            .get(&inst.unit)
            .ok_or_else(|| CodegenError::UnknownUnit {
                instance: inst.name.clone(),
                unit: inst.unit.clone(),
            })?;
        for b in &inst.bindings {
            let p = unit
                .ports
                .get(&b.port)
                .ok_or_else(|| CodegenError::UnknownPort {
                    instance: inst.name.clone(),
                    unit: inst.unit.clone(),
                    port: b.port.clone(),
                })?;
            if p.direction != b.direction {
                return Err(CodegenError::DirectionMismatch {
                    instance: inst.name.clone(),
                    port: b.port.clone(),
                    binding: b.direction,
                    declared: p.direction,
                });
            }
            if p.width != b.size {
                return Err(CodegenError::SizeMismatch {
                    instance: inst.name.clone(),
                    port: b.port.clone(),
                    size: b.size,
                    width: p.width,
                });
            }
        }
    }
    let needs_clock = conn
        .instances
        .iter()
        .any(|i| units.get(&i.unit).is_some_and(|u| u.clocked));
    let top_ports = conn.top_ports();
    let mut clock_ports = PortMap::new(top_ports.clone());
    for u in units.values() {
        clock_ports.entries.extend(u.ports.entries.iter().cloned());
    }
    let clk = clock_name(&clock_ports);

    let mut out = String::new();
    let _ = writeln!(out, "// lct-gen: structural top={}", conn.top);
    let mut decls = Vec::new();
    if needs_clock {
        decls.push(format!("input  wire {clk}"));
    }
    for p in &top_ports {
        let kind = match p.direction {
            Direction::Input => "input ",
            Direction::Output => "output",
        };
        decls.push(format!("{kind} wire {}{}", range(p.width), p.name));
    }
    let _ = writeln!(out, "module {} (", conn.top);
    for (i, d) in decls.iter().enumerate() {
        let sep = if i + 1 == decls.len() { "" } else { "," };
        let _ = writeln!(out, "    {d}{sep}");
    }
    let _ = writeln!(out, ");");
    for net in conn.nets() {
        if net.context == NetContext::Internal {
            let _ = writeln!(out, "    wire {}{};", range(net.size), net.name);
        }
    }
    for inst in &conn.instances {
        let unit = &units[&inst.unit];
        let mut binds: Vec<String> = Vec::new();
        if unit.clocked {
            let unit_clk = clock_name(&unit.ports);
            binds.push(format!(".{unit_clk}({clk})"));
        }
        binds.extend(
            inst.bindings
                .iter()
                .map(|b| format!(".{}({})", b.port, b.net)),
        );
        let _ = writeln!(out, "    {} {} (", inst.unit, inst.name);
        for (i, b) in binds.iter().enumerate() {
            let sep = if i + 1 == binds.len() { "" } else { "," };
            let _ = writeln!(out, "        {b}{sep}");
        }
        let _ = writeln!(out, "    );");
    }
    let _ = writeln!(out, "endmodule");
    Ok(out)
}
