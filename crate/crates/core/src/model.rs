// SPDX-License-Identifier: Apache-2.0

//! Domain types shared by every stage: tables, cells, port maps and
//! hierarchical connectivity.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitvec::{mask, BitVector};
use crate::expr::{Expr, UnaryOp};
use crate::lexer::{is_identifier, is_keyword};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clocking {
    Clocked,
    Combinational,
}

impl fmt::Display for Clocking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clocking::Clocked => "clocked",
            Clocking::Combinational => "combinational",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Input,
    Output,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Input => "input",
            Direction::Output => "output",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Port {
    pub direction: Direction,
    pub name: String,
    pub width: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PortMap {
    pub entries: Vec<Port>,
}

impl PortMap {
    pub fn new(entries: Vec<Port>) -> Self {
        Self { entries }
    }

    pub fn get(&self, name: &str) -> Option<&Port> {
        self.entries.iter().find(|p| p.name == name)
    }

    pub fn width_of(&self, name: &str) -> Option<u32> {
        self.get(name).map(|p| p.width)
    }

    pub fn is_input(&self, name: &str) -> bool {
        matches!(self.get(name), Some(p) if p.direction == Direction::Input)
    }

    pub fn push(&mut self, direction: Direction, name: &str, width: u32) {
        self.entries.push(Port {
            direction,
            name: name.to_string(),
            width,
        });
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellValue {
    Constant(BitVector),
    DontCare,
    SignalRef(String),
}

impl CellValue {
    pub fn constant(width: u32, value: u64) -> Self {
        CellValue::Constant(BitVector::truncating(width, value))
    }

    pub fn is_dont_care(&self) -> bool {
        matches!(self, CellValue::DontCare)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConditionHeader {
    Signal(String),
    Expr(Expr),
}

impl ConditionHeader {
    /// Parses a header cell: a bare identifier names a signal, anything else
    /// is an expression.
    pub fn parse(text: &str) -> Result<Self, crate::expr::ExprError> {
        let text = text.trim();
        if is_identifier(text) && !is_keyword(text) {
            return Ok(ConditionHeader::Signal(text.to_string()));
        }
        match crate::expr::parse_expr(text)? {
            Expr::Ident(name) => Ok(ConditionHeader::Signal(name)),
            e => Ok(ConditionHeader::Expr(e)),
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn signal(&self) -> Option<&str> {
        match self {
            ConditionHeader::Signal(s) => Some(s),
            ConditionHeader::Expr(_) => None,
        }
    }

    pub fn is_expr(&self) -> bool {
        matches!(self, ConditionHeader::Expr(_))
    }
}

impl fmt::Display for ConditionHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionHeader::Signal(s) => f.write_str(s),
            ConditionHeader::Expr(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CaseRow {
    pub inputs: Vec<CellValue>,
    pub outputs: Vec<CellValue>,
    /// Contents of the optional leading "Case" column; carries no semantics.
    pub case_label: Option<String>,
    pub comment: Option<String>,
}

impl CaseRow {
    pub fn new(inputs: Vec<CellValue>, outputs: Vec<CellValue>) -> Self {
        Self {
            inputs,
            outputs,
            case_label: None,
            comment: None,
        }
    }
}

/// Closes a register loop for simulation: `result` drives `condition` on the
/// next cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Feedback {
    pub result: String,
    pub condition: String,
}

/// A logic condition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lct {
    pub name: String,
    pub clocking: Clocking,
    pub conditions: Vec<ConditionHeader>,
    pub results: Vec<String>,
    pub rows: Vec<CaseRow>,
    pub ports: PortMap,
    pub feedback: Vec<Feedback>,
}

impl Lct {
    pub fn condition_names(&self) -> Vec<String> {
        self.conditions.iter().map(|c| c.name()).collect()
    }

    pub fn condition_index(&self, name: &str) -> Option<usize> {
        self.conditions.iter().position(|c| c.name() == name)
    }

    pub fn result_index(&self, name: &str) -> Option<usize> {
        self.results.iter().position(|r| r == name)
    }

    /// Bit width of a condition column; expression columns are single bits.
    pub fn condition_width(&self, idx: usize) -> u32 {
        match &self.conditions[idx] {
            ConditionHeader::Signal(s) => self.ports.width_of(s).unwrap_or(1),
            ConditionHeader::Expr(_) => 1,
        }
    }

    pub fn result_width(&self, idx: usize) -> u32 {
        self.ports.width_of(&self.results[idx]).unwrap_or(1)
    }

    /// Index of the signal column named `name`, if `name` is a control input.
    pub fn signal_column(&self, name: &str) -> Option<usize> {
        self.conditions
            .iter()
            .position(|c| matches!(c, ConditionHeader::Signal(s) if s == name))
    }

    pub fn has_expr_columns(&self) -> bool {
        self.conditions.iter().any(|c| c.is_expr())
    }

    /// Number of table cells, rows times condition plus result columns.
    pub fn cell_count(&self) -> usize {
        self.rows.len() * (self.conditions.len() + self.results.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    BadIdentifier,
    ReservedWord,
    DuplicatePort,
    ZeroWidth,
    DuplicateColumn,
    UnknownPort,
    WrongDirection,
    Arity,
    InputSignalRef,
    LiteralTooWide,
    ExprUnbound,
    ExprWidth,
    ExprTernary,
    ExprCell,
    OutputDontCare,
    BadSignalRef,
    SignalRefWidth,
    NoHoldInCombinational,
    BadFeedback,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::BadIdentifier => "bad-identifier",
            ViolationKind::ReservedWord => "reserved-word",
            ViolationKind::DuplicatePort => "duplicate-port",
            ViolationKind::ZeroWidth => "zero-width",
            ViolationKind::DuplicateColumn => "duplicate-column",
            ViolationKind::UnknownPort => "unknown-port",
            ViolationKind::WrongDirection => "wrong-direction",
            ViolationKind::Arity => "arity",
            ViolationKind::InputSignalRef => "input-signal-ref",
            ViolationKind::LiteralTooWide => "literal-too-wide",
            ViolationKind::ExprUnbound => "expr-unbound",
            ViolationKind::ExprWidth => "expr-width",
            ViolationKind::ExprTernary => "expr-ternary",
            ViolationKind::ExprCell => "expr-cell",
            ViolationKind::OutputDontCare => "output-dont-care",
            ViolationKind::BadSignalRef => "bad-signal-ref",
            ViolationKind::SignalRefWidth => "signal-ref-width",
            ViolationKind::NoHoldInCombinational => "no-hold-in-combinational",
            ViolationKind::BadFeedback => "bad-feedback",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub row: Option<usize>,
    pub column: Option<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.as_str())?;
        if let Some(r) = self.row {
            write!(f, " row {r}")?;
        }
        if let Some(c) = &self.column {
            write!(f, " column {c}")?;
        }
        write!(f, ": {}", self.message)
    }
}

fn violation(
    kind: ViolationKind,
    row: Option<usize>,
    column: Option<&str>,
    message: impl Into<String>,
) -> Violation {
    Violation {
        kind,
        row,
        column: column.map(str::to_string),
        message: message.into(),
    }
}

/// Infers the width of an expression over `ports`; `None` means an unsized
/// literal that adapts to its context.
pub fn expr_width(expr: &Expr, ports: &PortMap) -> Result<Option<u32>, Violation> {
    match expr {
        Expr::Ident(name) => match ports.get(name) {
            Some(p) if p.direction == Direction::Input => Ok(Some(p.width)),
            _ => Err(violation(
                ViolationKind::ExprUnbound,
                None,
                None,
                format!("`{name}` is not an input port"),
            )),
        },
        Expr::Literal(l) => Ok(l.width),
        Expr::Unary(UnaryOp::Not, e) => expr_width(e, ports),
        Expr::Unary(UnaryOp::LogicalNot, e) => {
            expr_width(e, ports)?;
            Ok(Some(1))
        }
        Expr::Binary(op, a, b) => {
            let wa = expr_width(a, ports)?;
            let wb = expr_width(b, ports)?;
            if op.is_comparison() || op.is_logical() {
                return Ok(Some(1));
            }
            match (wa, wb) {
                (Some(x), Some(y)) if x != y => Err(violation(
                    ViolationKind::ExprWidth,
                    None,
                    None,
                    format!("operands of `{}` have widths {x} and {y}", op.symbol()),
                )),
                (Some(x), _) | (_, Some(x)) => Ok(Some(x)),
                (None, None) => Ok(None),
            }
        }
        Expr::Ternary(..) => Err(violation(
            ViolationKind::ExprTernary,
            None,
            None,
            "conditional operator is not allowed in a header",
        )),
    }
}

fn check_name(name: &str, out: &mut Vec<Violation>) {
    if !is_identifier(name) {
        out.push(violation(
            ViolationKind::BadIdentifier,
            None,
            Some(name),
            format!("`{name}` is not an identifier"),
        ));
    } else if is_keyword(name) {
        out.push(violation(
            ViolationKind::ReservedWord,
            None,
            Some(name),
            format!("`{name}` is a reserved word"),
        ));
    }
}

/// Checks every structural rule of a table; an empty result means valid.
pub fn validate_lct(table: &Lct) -> Vec<Violation> {
    use ViolationKind as K;
    let mut out = Vec::new();
    check_name(&table.name, &mut out);

    let mut seen = BTreeSet::new();
    for p in &table.ports.entries {
        check_name(&p.name, &mut out);
        if !seen.insert(p.name.as_str()) {
            out.push(violation(
                K::DuplicatePort,
                None,
                Some(&p.name),
                "port declared twice",
            ));
        }
        if p.width == 0 || p.width > crate::bitvec::MAX_WIDTH {
            out.push(violation(
                K::ZeroWidth,
                None,
                Some(&p.name),
                format!("width {} out of range", p.width),
            ));
        }
    }

    let mut names = BTreeSet::new();
    for c in &table.conditions {
        let name = c.name();
        if !names.insert(name.clone()) {
            out.push(violation(
                K::DuplicateColumn,
                None,
                Some(&name),
                "condition column repeated",
            ));
        }
        match c {
            ConditionHeader::Signal(s) => match table.ports.get(s) {
                None => out.push(violation(
                    K::UnknownPort,
                    None,
                    Some(s),
                    "condition signal missing from the port map",
                )),
                Some(p) if p.direction != Direction::Input => out.push(violation(
                    K::WrongDirection,
                    None,
                    Some(s),
                    "condition signal is not an input",
                )),
                _ => {}
            },
            ConditionHeader::Expr(e) => {
                if let Err(mut v) = expr_width(e, &table.ports) {
                    v.column = Some(name.clone());
                    out.push(v);
                }
            }
        }
    }
    let mut result_names = BTreeSet::new();
    for r in &table.results {
        if !result_names.insert(r.as_str()) {
            out.push(violation(
                K::DuplicateColumn,
                None,
                Some(r),
                "result column repeated",
            ));
        }
        match table.ports.get(r) {
            None => out.push(violation(
                K::UnknownPort,
                None,
                Some(r),
                "result signal missing from the port map",
            )),
            Some(p) if p.direction != Direction::Output => out.push(violation(
                K::WrongDirection,
                None,
                Some(r),
                "result signal is not an output",
            )),
            _ => {}
        }
    }

    for (ri, row) in table.rows.iter().enumerate() {
        if row.inputs.len() != table.conditions.len() {
            out.push(violation(
                K::Arity,
                Some(ri),
                None,
                format!(
                    "{} input cells for {} condition columns",
                    row.inputs.len(),
                    table.conditions.len()
                ),
            ));
        }
        if row.outputs.len() != table.results.len() {
            out.push(violation(
                K::Arity,
                Some(ri),
                None,
                format!(
                    "{} output cells for {} result columns",
                    row.outputs.len(),
                    table.results.len()
                ),
            ));
        }
        for (ci, (cell, header)) in row.inputs.iter().zip(&table.conditions).enumerate() {
            let col = header.name();
            let width = table.condition_width(ci);
            match cell {
                CellValue::DontCare => {}
                CellValue::SignalRef(s) => out.push(violation(
                    K::InputSignalRef,
                    Some(ri),
                    Some(&col),
                    format!("condition cell names signal `{s}`"),
                )),
                CellValue::Constant(bv) => {
                    if header.is_expr() && bv.value() > 1 {
                        out.push(violation(
                            K::ExprCell,
                            Some(ri),
                            Some(&col),
                            "expression columns hold 0, 1 or X",
                        ));
                    } else if bv.value() > mask(width) {
                        out.push(violation(
                            K::LiteralTooWide,
                            Some(ri),
                            Some(&col),
                            format!("{bv} does not fit {width} bits"),
                        ));
                    }
                }
            }
        }
        for (oi, (cell, name)) in row.outputs.iter().zip(&table.results).enumerate() {
            let width = table.result_width(oi);
            match cell {
                CellValue::DontCare => out.push(violation(
                    K::OutputDontCare,
                    Some(ri),
                    Some(name),
                    "result cells may not be X",
                )),
                CellValue::Constant(bv) => {
                    if bv.value() > mask(width) {
                        out.push(violation(
                            K::LiteralTooWide,
                            Some(ri),
                            Some(name),
                            format!("{bv} does not fit {width} bits"),
                        ));
                    }
                }
                CellValue::SignalRef(s) if s == name => {
                    if table.clocking == Clocking::Combinational {
                        out.push(violation(
                            K::NoHoldInCombinational,
                            Some(ri),
                            Some(name),
                            "combinational tables cannot hold a value",
                        ));
                    }
                }
                CellValue::SignalRef(s) => match table.ports.get(s) {
                    Some(p) if p.direction == Direction::Input => {
                        if p.width != width {
                            out.push(violation(
                                K::SignalRefWidth,
                                Some(ri),
                                Some(name),
                                format!("`{s}` is {} bits, column is {width}", p.width),
                            ));
                        }
                    }
                    _ => out.push(violation(
                        K::BadSignalRef,
                        Some(ri),
                        Some(name),
                        format!("`{s}` is neither an input port nor this column"),
                    )),
                },
            }
        }
    }

    for fb in &table.feedback {
        let ok = table.result_index(&fb.result).is_some()
            && table.signal_column(&fb.condition).is_some()
            && table.ports.width_of(&fb.result) == table.ports.width_of(&fb.condition);
        if !ok {
            out.push(violation(
                K::BadFeedback,
                None,
                Some(&fb.result),
                format!(
                    "feedback {} -> {} must join a result to a same-width condition signal",
                    fb.result, fb.condition
                ),
            ));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Hierarchical connectivity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetContext {
    Internal,
    External,
}

impl fmt::Display for NetContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetContext::Internal => "internal",
            NetContext::External => "external",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub direction: Direction,
    pub port: String,
    pub net: String,
    pub size: u32,
    pub context: NetContext,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub unit: String,
    pub bindings: Vec<Binding>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityTable {
    pub top: String,
    pub instances: Vec<Instance>,
}

/// One net after collecting every binding that references it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    pub name: String,
    pub size: u32,
    pub context: NetContext,
    /// (instance, port) pairs.
    pub drivers: Vec<(String, String)>,
    pub loads: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectivityError {
    #[error("net `{net}` is driven by {count} outputs")]
    MultipleDrivers { net: String, count: usize },
    #[error("net `{net}` is bound with sizes {first} and {second}")]
    SizeConflict {
        net: String,
        first: u32,
        second: u32,
    },
    #[error("internal net `{net}` has no driver")]
    Dangling { net: String },
    #[error("internal net `{net}` has no load")]
    NoLoad { net: String },
    #[error("net `{net}` is bound both internal and external")]
    ContextConflict { net: String },
    #[error("instance `{0}` declared twice")]
    DuplicateInstance(String),
    #[error("port `{port}` of instance `{instance}` bound twice")]
    DuplicateBinding { instance: String, port: String },
}

impl ConnectivityTable {
    /// Collects nets in first-appearance order.
    pub fn nets(&self) -> Vec<Net> {
        let mut order: Vec<String> = Vec::new();
        let mut nets: HashMap<String, Net> = HashMap::new();
        for inst in &self.instances {
            for b in &inst.bindings {
                let net = nets.entry(b.net.clone()).or_insert_with(|| {
                    order.push(b.net.clone());
                    Net {
                        name: b.net.clone(),
                        size: b.size,
                        context: b.context,
                        drivers: Vec::new(),
                        loads: Vec::new(),
                    }
                });
                let end = (inst.name.clone(), b.port.clone());
                match b.direction {
                    Direction::Output => net.drivers.push(end),
                    Direction::Input => net.loads.push(end),
                }
            }
        }
        order
            .into_iter()
            .map(|n| nets.remove(&n).expect("net recorded"))
            .collect()
    }

    pub fn validate(&self) -> Result<(), ConnectivityError> {
        let mut inst_names = BTreeSet::new();
        let mut sizes: BTreeMap<&str, (u32, NetContext)> = BTreeMap::new();
        for inst in &self.instances {
            if !inst_names.insert(inst.name.as_str()) {
                return Err(ConnectivityError::DuplicateInstance(inst.name.clone()));
            }
            let mut ports = BTreeSet::new();
            for b in &inst.bindings {
                if !ports.insert(b.port.as_str()) {
                    return Err(ConnectivityError::DuplicateBinding {
                        instance: inst.name.clone(),
                        port: b.port.clone(),
                    });
                }
                match sizes.get(b.net.as_str()) {
                    Some((size, _)) if *size != b.size => {
                        return Err(ConnectivityError::SizeConflict {
                            net: b.net.clone(),
                            first: *size,
                            second: b.size,
                        })
                    }
                    Some((_, ctx)) if *ctx != b.context => {
                        return Err(ConnectivityError::ContextConflict { net: b.net.clone() })
                    }
                    Some(_) => {}
                    None => {
                        sizes.insert(&b.net, (b.size, b.context));
                    }
                }
            }
        }
        for net in self.nets() {
            if net.drivers.len() > 1 {
                return Err(ConnectivityError::MultipleDrivers {
                    net: net.name,
                    count: net.drivers.len(),
                });
            }
            if net.context == NetContext::Internal {
                if net.drivers.is_empty() {
                    return Err(ConnectivityError::Dangling { net: net.name });
                }
                if net.loads.is_empty() {
                    return Err(ConnectivityError::NoLoad { net: net.name });
                }
            }
        }
        Ok(())
    }

    /// Top-level ports: every external net, an output when an instance drives it.
    pub fn top_ports(&self) -> Vec<Port> {
        self.nets()
            .into_iter()
            .filter(|n| n.context == NetContext::External)
            .map(|n| Port {
                direction: if n.drivers.is_empty() {
                    Direction::Input
                } else {
                    Direction::Output
                },
                name: n.name,
                width: n.size,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn bundled_tables_are_valid() {
        for t in [bundled::table1(), bundled::table2(), bundled::table3()] {
            assert_eq!(validate_lct(&t), vec![], "{}", t.name);
        }
    }

    #[test]
    fn hold_in_combinational_is_flagged() {
        let mut t = bundled::table1();
        t.rows[1].outputs[0] = CellValue::SignalRef("data_out".into());
        let v = validate_lct(&t);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::NoHoldInCombinational);
        assert_eq!(v[0].row, Some(1));
        assert_eq!(v[0].column.as_deref(), Some("data_out"));
    }

    #[test]
    fn arity_is_flagged() {
        let mut t = bundled::table1();
        t.rows[2].inputs.push(CellValue::DontCare);
        let v = validate_lct(&t);
        assert!(v
            .iter()
            .any(|x| x.kind == ViolationKind::Arity && x.row == Some(2)));
    }

    #[test]
    fn signal_refs_in_conditions_and_bad_refs() {
        let mut t = bundled::table1();
        t.rows[0].inputs[1] = CellValue::SignalRef("data0".into());
        t.rows[1].outputs[0] = CellValue::SignalRef("enable".into());
        let kinds: Vec<_> = validate_lct(&t).into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::InputSignalRef));
        assert!(kinds.contains(&ViolationKind::SignalRefWidth));
    }

    #[test]
    fn expression_headers_must_bind_inputs() {
        let mut t = bundled::table1();
        t.conditions[1] = ConditionHeader::parse("select <= 2").unwrap();
        t.rows.iter_mut().for_each(|r| {
            if let CellValue::Constant(bv) = &r.inputs[1] {
                r.inputs[1] = CellValue::constant(1, bv.value() & 1);
            }
        });
        assert_eq!(validate_lct(&t), vec![]);
        t.conditions[1] = ConditionHeader::parse("bogus <= 2").unwrap();
        assert!(validate_lct(&t)
            .iter()
            .any(|v| v.kind == ViolationKind::ExprUnbound));
        t.conditions[1] = ConditionHeader::parse("enable & select").unwrap();
        assert!(validate_lct(&t)
            .iter()
            .any(|v| v.kind == ViolationKind::ExprWidth));
    }

    fn bind(dir: Direction, port: &str, net: &str, size: u32, ctx: NetContext) -> Binding {
        Binding {
            direction: dir,
            port: port.into(),
            net: net.into(),
            size,
            context: ctx,
        }
    }

    #[test]
    fn connectivity_rules() {
        use Direction::*;
        use NetContext::*;
        let mut conn = ConnectivityTable {
            top: "top".into(),
            instances: vec![
                Instance {
                    name: "a".into(),
                    unit: "ua".into(),
                    bindings: vec![bind(Output, "out", "n", 8, Internal)],
                },
                Instance {
                    name: "b".into(),
                    unit: "ub".into(),
                    bindings: vec![bind(Input, "inp", "n", 8, Internal)],
                },
            ],
        };
        assert_eq!(conn.validate(), Ok(()));
        conn.instances[1]
            .bindings
            .push(bind(Output, "o2", "n", 8, Internal));
        assert!(matches!(
            conn.validate(),
            Err(ConnectivityError::MultipleDrivers { .. })
        ));
        conn.instances[1].bindings.pop();
        conn.instances[1].bindings[0].size = 4;
        assert!(matches!(
            conn.validate(),
            Err(ConnectivityError::SizeConflict { .. })
        ));
    }
}
