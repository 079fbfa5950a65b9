// SPDX-License-Identifier: Apache-2.0

//! On-disk forms of a design unit: a line-oriented manifest plus the table
//! itself as CSV, and connectivity manifests for structural tops.
//!
//! Unit manifest lines (`#` starts a comment):
//!
//! ```text
//! unit mux4
//! clocking combinational
//! inputs 2
//! outputs 1
//! port input enable 1
//! port output data_out 8
//! feedback next_state -> state
//! table mux4.csv
//! ```
//!
//! The CSV header names the columns left to right: an optional leading
//! `Case` column, the condition columns, the result columns and an optional
//! trailing `Comments` column.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bitvec::{parse_literal, BitVector};
use crate::lexer::is_identifier;
use crate::model::{
    validate_lct, Binding, CaseRow, CellValue, Clocking, ConditionHeader, ConnectivityError,
    ConnectivityTable, Direction, Feedback, Instance, Lct, NetContext, PortMap, Violation,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedViolation {
    pub line: Option<u64>,
    pub column: Option<usize>,
    pub violation: Violation,
}

impl fmt::Display for LocatedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{l}:{c}: {}", self.violation),
            (Some(l), None) => write!(f, "{l}: {}", self.violation),
            _ => write!(f, "{}", self.violation),
        }
    }
}

#[derive(Debug, Error)]
pub enum TableIoError {
    #[error("manifest {line}:{column}: {message}")]
    Manifest {
        line: u64,
        column: usize,
        message: String,
    },
    #[error("csv {line}:{column}: {message}")]
    Cell {
        line: u64,
        column: usize,
        message: String,
    },
    #[error("invalid table:\n{}", list(.0))]
    Invalid(Vec<LocatedViolation>),
    #[error("connectivity: {0}")]
    Connectivity(#[from] ConnectivityError),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn list(items: &[LocatedViolation]) -> String {
    items
        .iter()
        .map(|v| format!("  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Everything a unit manifest declares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub name: String,
    pub clocking: Clocking,
    pub inputs: usize,
    pub outputs: usize,
    pub ports: PortMap,
    pub feedback: Vec<Feedback>,
    pub table_path: Option<String>,
}

fn manifest_err(line: usize, column: usize, message: impl Into<String>) -> TableIoError {
    TableIoError::Manifest {
        line: line as u64,
        column,
        message: message.into(),
    }
}

pub fn parse_manifest(text: &str) -> Result<Manifest, TableIoError> {
    let mut name = None;
    let mut clocking = None;
    let mut inputs = None;
    let mut outputs = None;
    let mut ports = PortMap::default();
    let mut feedback = Vec::new();
    let mut table_path = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let col = raw.len() - raw.trim_start().len() + 1;
        let words: Vec<&str> = line.split_whitespace().collect();
        let count = |w: &str| -> Result<usize, TableIoError> {
            w.parse()
                .map_err(|_| manifest_err(lineno, col, format!("`{w}` is not a count")))
        };
        match words.as_slice() {
            ["unit", n] => name = Some(n.to_string()),
            ["clocking", "clocked"] => clocking = Some(Clocking::Clocked),
            ["clocking", "combinational"] => clocking = Some(Clocking::Combinational),
            ["inputs", n] => inputs = Some(count(n)?),
            ["outputs", n] => outputs = Some(count(n)?),
            ["port", dir, n, w] => {
                let direction = match *dir {
                    "input" => Direction::Input,
                    "output" => Direction::Output,
                    other => {
                        return Err(manifest_err(
                            lineno,
                            col,
                            format!("port direction `{other}` is not input/output"),
                        ))
                    }
                };
                let width: u32 = w
                    .parse()
                    .map_err(|_| manifest_err(lineno, col, format!("`{w}` is not a width")))?;
                if width == 0 {
                    return Err(manifest_err(lineno, col, "port width must be at least 1"));
                }
                if !is_identifier(n) {
                    return Err(manifest_err(
                        lineno,
                        col,
                        format!("`{n}` is not an identifier"),
                    ));
                }
                ports.push(direction, n, width);
            }
            ["feedback", r, "->", c] => feedback.push(Feedback {
                result: r.to_string(),
                condition: c.to_string(),
            }),
            ["table", p] => table_path = Some(p.to_string()),
            _ => {
                return Err(manifest_err(
                    lineno,
                    col,
                    format!("unrecognized manifest line `{line}`"),
                ))
            }
        }
    }
    let missing = |what: &str| manifest_err(1, 1, format!("manifest has no `{what}` line"));
    Ok(Manifest {
        name: name.ok_or_else(|| missing("unit"))?,
        clocking: clocking.ok_or_else(|| missing("clocking"))?,
        inputs: inputs.ok_or_else(|| missing("inputs"))?,
        outputs: outputs.ok_or_else(|| missing("outputs"))?,
        ports,
        feedback,
        table_path,
    })
}

fn is_case_header(s: &str) -> bool {
    s.eq_ignore_ascii_case("case")
}

fn is_comment_header(s: &str) -> bool {
    s.eq_ignore_ascii_case("comments") || s.eq_ignore_ascii_case("comment")
}

fn cell_err(line: u64, column: usize, message: impl Into<String>) -> TableIoError {
    TableIoError::Cell {
        line,
        column,
        message: message.into(),
    }
}

/// Parses one condition cell of a column `width` bits wide.
pub fn parse_condition_cell(text: &str, width: u32) -> Result<CellValue, String> {
    match text {
        "" => Err("empty cell; use X for don't care".into()),
        "X" | "x" => Ok(CellValue::DontCare),
        t => parse_literal(t, Some(width))
            .map(CellValue::Constant)
            .map_err(|e| format!("condition cell `{t}`: {e}")),
    }
}

/// Parses one result cell: a literal, `X`, or a signal name.
pub fn parse_result_cell(text: &str, width: u32) -> Result<CellValue, String> {
    match text {
        "" => Err("empty cell".into()),
        "X" => Ok(CellValue::DontCare),
        t if is_identifier(t) => Ok(CellValue::SignalRef(t.to_string())),
        t => parse_literal(t, Some(width))
            .map(CellValue::Constant)
            .map_err(|e| format!("result cell `{t}`: {e}")),
    }
}

/// Parses a unit from its manifest and CSV texts and validates it.
pub fn parse_unit(manifest_text: &str, csv_text: &str) -> Result<Lct, TableIoError> {
    let m = parse_manifest(manifest_text)?;
    parse_table_csv(&m, csv_text)
}

/// Parses the CSV of a unit whose manifest is already known.
pub fn parse_table_csv(m: &Manifest, csv_text: &str) -> Result<Lct, TableIoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            cell_err(line, 1, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push((line, rec));
    }
    let Some((hline, header)) = records.first().cloned() else {
        return Err(cell_err(1, 1, "missing header row"));
    };
    let header: Vec<String> = header.iter().map(str::to_string).collect();
    let is_port = |s: &str| m.ports.get(s).is_some();
    let has_case = header
        .first()
        .is_some_and(|h| is_case_header(h) && !is_port(h));
    let has_comments = header.len() > 1
        && header
            .last()
            .is_some_and(|h| is_comment_header(h) && !is_port(h));
    let start = has_case as usize;
    let end = header.len() - has_comments as usize;
    let body = &header[start..end];
    if body.len() != m.inputs + m.outputs {
        return Err(cell_err(
            hline,
            start + 1,
            format!(
                "header has {} table columns but the manifest declares {} inputs and {} outputs",
                body.len(),
                m.inputs,
                m.outputs
            ),
        ));
    }

    let mut conditions = Vec::with_capacity(m.inputs);
    for (i, text) in body[..m.inputs].iter().enumerate() {
        let column = start + i + 1;
        let h = ConditionHeader::parse(text)
            .map_err(|e| cell_err(hline, column, format!("condition header `{text}`: {e}")))?;
        if let ConditionHeader::Signal(s) = &h {
            if !is_port(s) {
                return Err(cell_err(
                    hline,
                    column,
                    format!("column `{s}` is not a declared port"),
                ));
            }
        }
        conditions.push(h);
    }
    let mut results = Vec::with_capacity(m.outputs);
    for (i, text) in body[m.inputs..].iter().enumerate() {
        let column = start + m.inputs + i + 1;
        if !is_identifier(text) || !is_port(text) {
            return Err(cell_err(
                hline,
                column,
                format!("result column `{text}` is not a declared port"),
            ));
        }
        results.push(text.clone());
    }

    let mut table = Lct {
        name: m.name.clone(),
        clocking: m.clocking,
        conditions,
        results,
        rows: Vec::new(),
        ports: m.ports.clone(),
        feedback: m.feedback.clone(),
    };
    let cond_widths: Vec<u32> = (0..m.inputs).map(|i| table.condition_width(i)).collect();
    let res_widths: Vec<u32> = (0..m.outputs).map(|i| table.result_width(i)).collect();
    let mut lines = Vec::new();
    for (line, rec) in &records[1..] {
        if rec.len() != header.len() {
            return Err(cell_err(
                *line,
                rec.len().min(header.len()) + 1,
                format!("row has {} cells, header has {}", rec.len(), header.len()),
            ));
        }
        let fields: Vec<&str> = rec.iter().collect();
        let mut row = CaseRow::default();
        if has_case && !fields[0].is_empty() {
            row.case_label = Some(fields[0].to_string());
        }
        if has_comments && !fields[end].is_empty() {
            row.comment = Some(fields[end].to_string());
        }
        for (i, w) in cond_widths.iter().enumerate() {
            let cell = parse_condition_cell(fields[start + i], *w)
                .map_err(|msg| cell_err(*line, start + i + 1, msg))?;
            row.inputs.push(cell);
        }
        for (i, w) in res_widths.iter().enumerate() {
            let col = start + m.inputs + i;
            let cell =
                parse_result_cell(fields[col], *w).map_err(|msg| cell_err(*line, col + 1, msg))?;
            row.outputs.push(cell);
        }
        table.rows.push(row);
        lines.push(*line);
    }

    let violations = validate_lct(&table);
    if !violations.is_empty() {
        let column_of = |name: &Option<String>| -> Option<usize> {
            let name = name.as_deref()?;
            header
                .iter()
                .position(|h| {
                    h == name
                        || ConditionHeader::parse(h).map(|c| c.name()).ok().as_deref() == Some(name)
                })
                .map(|i| i + 1)
        };
        return Err(TableIoError::Invalid(
            violations
                .into_iter()
                .map(|v| LocatedViolation {
                    line: v.row.map(|r| lines[r]).or(Some(hline)),
                    column: column_of(&v.column),
                    violation: v,
                })
                .collect(),
        ));
    }
    Ok(table)
}

/// Text of a cell in a column `width` bits wide; literals of the column's
/// own width print as bare decimals.
pub fn format_cell(cell: &CellValue, width: u32) -> String {
    match cell {
        CellValue::DontCare => "X".into(),
        CellValue::SignalRef(s) => s.clone(),
        CellValue::Constant(bv) => format_constant(bv, width),
    }
}

fn format_constant(bv: &BitVector, width: u32) -> String {
    if bv.width() == width {
        bv.value().to_string()
    } else {
        bv.to_string()
    }
}

pub fn serialize_manifest(table: &Lct) -> String {
    let mut out = String::new();
    out.push_str(&format!("unit {}\n", table.name));
    out.push_str(&format!("clocking {}\n", table.clocking));
    out.push_str(&format!("inputs {}\n", table.conditions.len()));
    out.push_str(&format!("outputs {}\n", table.results.len()));
    for p in &table.ports.entries {
        out.push_str(&format!("port {} {} {}\n", p.direction, p.name, p.width));
    }
    for fb in &table.feedback {
        out.push_str(&format!("feedback {} -> {}\n", fb.result, fb.condition));
    }
    out.push_str(&format!("table {}.csv\n", table.name));
    out
}

/// The table body as CSV. Does not validate.
pub fn serialize_csv(table: &Lct) -> String {
    let has_case = table.rows.iter().any(|r| r.case_label.is_some());
    let has_comments = table.rows.iter().any(|r| r.comment.is_some());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header: Vec<String> = Vec::new();
    if has_case {
        header.push("Case".into());
    }
    header.extend(table.condition_names());
    header.extend(table.results.iter().cloned());
    if has_comments {
        header.push("Comments".into());
    }
    w.write_record(&header).expect("in-memory write");
    for row in &table.rows {
        let mut rec: Vec<String> = Vec::new();
        if has_case {
            rec.push(row.case_label.clone().unwrap_or_default());
        }
        for (i, c) in row.inputs.iter().enumerate() {
            rec.push(format_cell(c, table.condition_width(i)));
        }
        for (i, c) in row.outputs.iter().enumerate() {
            rec.push(format_cell(c, table.result_width(i)));
        }
        if has_comments {
            rec.push(row.comment.clone().unwrap_or_default());
        }
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Renders a valid table as `(manifest, csv)`.
pub fn serialize_unit(table: &Lct) -> Result<(String, String), TableIoError> {
    let violations = validate_lct(table);
    if !violations.is_empty() {
        return Err(TableIoError::Invalid(
            violations
                .into_iter()
                .map(|v| LocatedViolation {
                    line: None,
                    column: None,
                    violation: v,
                })
                .collect(),
        ));
    }
    Ok((serialize_manifest(table), serialize_csv(table)))
}

fn read(path: &Path) -> Result<String, TableIoError> {
    fs::read_to_string(path).map_err(|source| TableIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a unit from its manifest path; the CSV path is resolved relative
/// to the manifest.
pub fn load_unit(manifest_path: &Path) -> Result<Lct, TableIoError> {
    let text = read(manifest_path)?;
    let m = parse_manifest(&text)?;
    let csv_name = m
        .table_path
        .clone()
        .unwrap_or_else(|| format!("{}.csv", m.name));
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let csv_text = read(&dir.join(csv_name))?;
    parse_table_csv(&m, &csv_text)
}

/// Writes `<name>.lct` and `<name>.csv` into `dir`; returns the manifest path.
pub fn save_unit(table: &Lct, dir: &Path) -> Result<PathBuf, TableIoError> {
    let (manifest, csv) = serialize_unit(table)?;
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| TableIoError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mpath = dir.join(format!("{}.lct", table.name));
    let cpath = dir.join(format!("{}.csv", table.name));
    fs::write(&mpath, manifest).map_err(io(&mpath))?;
    fs::write(&cpath, csv).map_err(io(&cpath))?;
    Ok(mpath)
}

/// Parses a connectivity manifest:
///
/// ```text
/// top request_top
/// instance req_n request_N
///   input  rx_valid  n_valid  1 external
///   output req       req_n    5 internal
/// ```
pub fn parse_connectivity(text: &str) -> Result<ConnectivityTable, TableIoError> {
    let mut top = None;
    let mut instances: Vec<Instance> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let col = raw.len() - raw.trim_start().len() + 1;
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["top", name] => top = Some(name.to_string()),
            ["instance", name, unit] => instances.push(Instance {
                name: name.to_string(),
                unit: unit.to_string(),
                bindings: Vec::new(),
            }),
            [dir @ ("input" | "output"), port, net, size, ctx] => {
                let Some(inst) = instances.last_mut() else {
                    return Err(manifest_err(lineno, col, "binding before any instance"));
                };
                let size: u32 = size.parse().ok().filter(|s| *s > 0).ok_or_else(|| {
                    manifest_err(lineno, col, format!("`{size}` is not a net size"))
                })?;
                let context = match *ctx {
                    "internal" => NetContext::Internal,
                    "external" => NetContext::External,
                    other => {
                        return Err(manifest_err(
                            lineno,
                            col,
                            format!("net context `{other}` is not internal/external"),
                        ))
                    }
                };
                for name in [port, net] {
                    if !is_identifier(name) {
                        return Err(manifest_err(
                            lineno,
                            col,
                            format!("`{name}` is not an identifier"),
                        ));
                    }
                }
                inst.bindings.push(Binding {
                    direction: if *dir == "input" {
                        Direction::Input
                    } else {
                        Direction::Output
                    },
                    port: port.to_string(),
                    net: net.to_string(),
                    size,
                    context,
                });
            }
            _ => {
                return Err(manifest_err(
                    lineno,
                    col,
                    format!("unrecognized connectivity line `{line}`"),
                ))
            }
        }
    }
    let conn = ConnectivityTable {
        top: top.ok_or_else(|| manifest_err(1, 1, "connectivity manifest has no `top` line"))?,
        instances,
    };
    conn.validate()?;
    Ok(conn)
}

pub fn serialize_connectivity(conn: &ConnectivityTable) -> String {
    let mut out = format!("top {}\n", conn.top);
    for inst in &conn.instances {
        out.push_str(&format!("instance {} {}\n", inst.name, inst.unit));
        for b in &inst.bindings {
            out.push_str(&format!(
                "  {} {} {} {} {}\n",
                b.direction, b.port, b.net, b.size, b.context
            ));
        }
    }
    out
}
