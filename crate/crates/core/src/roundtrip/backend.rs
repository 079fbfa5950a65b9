// SPDX-License-Identifier: Apache-2.0

//! Transform backends: the deterministic pair and its fault-injecting
//! wrapper.

use thiserror::Error;

use crate::bitvec::{domain_size, mask, BitVector};
use crate::codegen::{gen_unit_with, GenOptions};
use crate::hdl::{hdl_to_lct, parse_hdl, ExtractOptions, Schema};
use crate::model::{CellValue, Direction, Lct};
use crate::roundtrip::prompt::{Payload, TransformKind, TransformRequest, TransformResponse};
use crate::table_io::serialize_csv;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("{backend}: {message}")]
    Transform { backend: String, message: String },
    #[error("remote backends are disabled in offline mode")]
    Offline,
    #[error("{backend}: request failed after {attempts} attempts: {message}")]
    Request {
        backend: String,
        attempts: u32,
        message: String,
    },
    #[error("backend configuration: {0}")]
    Config(String),
}

pub trait TransformBackend: Send + Sync {
    /// Identity recorded in reports.
    fn id(&self) -> String;
    fn complete(&self, req: &TransformRequest) -> Result<TransformResponse, BackendError>;
}

/// Codegen forward, extraction inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Deterministic {
    pub options: GenOptions,
}

impl Deterministic {
    fn err(&self, message: impl ToString) -> BackendError {
        BackendError::Transform {
            backend: self.id(),
            message: message.to_string(),
        }
    }

    fn forward(&self, table: &Lct) -> Result<String, BackendError> {
        gen_unit_with(table, &self.options)
            .map(|(text, _)| text)
            .map_err(|e| self.err(e))
    }

    fn inverse(&self, hdl: &str, schema: &Schema) -> Result<Lct, BackendError> {
        let module = parse_hdl(hdl).map_err(|e| self.err(e))?;
        let schema = schema_for_module(schema, &module.ports);
        hdl_to_lct(&module, &schema, &ExtractOptions::default())
            .map(|x| x.lct)
            .map_err(|e| self.err(e))
    }
}

/// Drops schema results that the module does not declare as outputs.
pub fn schema_for_module(schema: &Schema, ports: &crate::model::PortMap) -> Schema {
    let mut s = schema.clone();
    s.results.retain(|r| {
        ports
            .get(r)
            .is_some_and(|p| p.direction == Direction::Output)
    });
    s.feedback.retain(|f| s.results.contains(&f.result));
    s
}

fn respond(kind: TransformKind, artifact: String, backend: String) -> TransformResponse {
    let lang = match kind {
        TransformKind::Forward => "verilog",
        TransformKind::Inverse => "csv",
    };
    TransformResponse {
        raw: format!("```{lang}\n{}\n```\n", artifact.trim_end()),
        artifact,
        backend,
    }
}

impl TransformBackend for Deterministic {
    fn id(&self) -> String {
        let style = match self.options.style {
            crate::codegen::Style::IfChain => "if-chain",
            crate::codegen::Style::CaseNested => "case-nested",
        };
        format!("deterministic/{style}")
    }

    fn complete(&self, req: &TransformRequest) -> Result<TransformResponse, BackendError> {
        let artifact = match &req.payload {
            Payload::Forward(table) => self.forward(table)?,
            Payload::Inverse { hdl, schema } => serialize_csv(&self.inverse(hdl, schema)?),
        };
        Ok(respond(req.kind, artifact, self.id()))
    }
}

/// A scripted mutation of a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fault {
    DropRow(usize),
    /// Replaces an output cell with a different value.
    AlterOutput {
        row: usize,
        result: usize,
    },
    /// Sets an output cell to a given value.
    SetOutput {
        row: usize,
        result: usize,
        value: CellValue,
    },
    /// Inserts, before `row`, a copy of it whose outputs all differ.
    AddSpuriousRow(usize),
    /// Exchanges one condition cell between two rows.
    SwapConditionValues {
        first: usize,
        second: usize,
        column: usize,
    },
    /// Replaces a constant condition cell with the next value of its domain.
    RenameValue {
        row: usize,
        column: usize,
    },
    /// Replaces a row and its successor with one row that keeps the shared
    /// condition cells and the first row's outputs.
    MergeRows(usize),
    /// Removes a result column and its port.
    DropOutputColumn(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fault {fault:?} does not apply: {reason}")]
pub struct FaultError {
    pub fault: Fault,
    pub reason: String,
}

fn other_value(cell: &CellValue, width: u32) -> CellValue {
    match cell {
        CellValue::Constant(bv) => {
            CellValue::Constant(BitVector::truncating(width, bv.value() ^ 1))
        }
        _ => CellValue::Constant(BitVector::zero(width)),
    }
}

pub fn apply_fault(table: &Lct, fault: &Fault) -> Result<Lct, FaultError> {
    let fail = |reason: &str| FaultError {
        fault: fault.clone(),
        reason: reason.to_string(),
    };
    let mut t = table.clone();
    let rows = t.rows.len();
    let row_ok = |r: usize| {
        if r < rows {
            Ok(())
        } else {
            Err(fail("row out of range"))
        }
    };
    match fault {
        Fault::DropRow(r) => {
            row_ok(*r)?;
            t.rows.remove(*r);
        }
        Fault::AlterOutput { row, result } => {
            row_ok(*row)?;
            if *result >= t.results.len() {
                return Err(fail("result out of range"));
            }
            let w = t.result_width(*result);
            let cell = &mut t.rows[*row].outputs[*result];
            *cell = other_value(cell, w);
        }
        Fault::SetOutput { row, result, value } => {
            row_ok(*row)?;
            if *result >= t.results.len() {
                return Err(fail("result out of range"));
            }
            t.rows[*row].outputs[*result] = value.clone();
        }
        Fault::AddSpuriousRow(r) => {
            row_ok(*r)?;
            let mut spurious = t.rows[*r].clone();
            for (i, cell) in spurious.outputs.iter_mut().enumerate() {
                *cell = other_value(cell, table.result_width(i));
            }
            spurious.case_label = None;
            spurious.comment = None;
            t.rows.insert(*r, spurious);
        }
        Fault::SwapConditionValues {
            first,
            second,
            column,
        } => {
            row_ok(*first)?;
            row_ok(*second)?;
            if *column >= t.conditions.len() {
                return Err(fail("column out of range"));
            }
            let a = t.rows[*first].inputs[*column].clone();
            let b = std::mem::replace(&mut t.rows[*second].inputs[*column], a);
            t.rows[*first].inputs[*column] = b;
        }
        Fault::RenameValue { row, column } => {
            row_ok(*row)?;
            if *column >= t.conditions.len() {
                return Err(fail("column out of range"));
            }
            let w = t.condition_width(*column);
            let CellValue::Constant(bv) = &t.rows[*row].inputs[*column] else {
                return Err(fail("condition cell is not a constant"));
            };
            let next = ((bv.value() + 1) % domain_size(w).max(2)) & mask(w);
            t.rows[*row].inputs[*column] = CellValue::Constant(BitVector::truncating(w, next));
        }
        Fault::MergeRows(r) => {
            row_ok(*r + 1)?;
            let second = t.rows.remove(*r + 1);
            let first = &mut t.rows[*r];
            for (a, b) in first.inputs.iter_mut().zip(&second.inputs) {
                if a != b {
                    *a = CellValue::DontCare;
                }
            }
        }
        Fault::DropOutputColumn(name) => {
            let i = t.result_index(name).ok_or_else(|| fail("no such result"))?;
            t.results.remove(i);
            for row in &mut t.rows {
                row.outputs.remove(i);
            }
            t.ports.entries.retain(|p| p.name != *name);
            t.feedback.retain(|f| f.result != *name);
            if t.results.is_empty() {
                return Err(fail("table would have no results"));
            }
        }
    }
    Ok(t)
}

/// The deterministic pair with one fault applied on one side: before code
/// generation for forward faults, after extraction for inverse faults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultInjecting {
    pub inner: Deterministic,
    pub fault: Fault,
    pub side: TransformKind,
}

impl FaultInjecting {
    pub fn forward(fault: Fault) -> Self {
        Self {
            inner: Deterministic::default(),
            fault,
            side: TransformKind::Forward,
        }
    }

    pub fn inverse(fault: Fault) -> Self {
        Self {
            inner: Deterministic::default(),
            fault,
            side: TransformKind::Inverse,
        }
    }
}

impl TransformBackend for FaultInjecting {
    fn id(&self) -> String {
        format!("{}+fault({:?})", self.inner.id(), self.fault)
    }

    fn complete(&self, req: &TransformRequest) -> Result<TransformResponse, BackendError> {
        let apply = |t: &Lct| {
            apply_fault(t, &self.fault).map_err(|e| BackendError::Transform {
                backend: self.id(),
                message: e.to_string(),
            })
        };
        let artifact = match (&req.payload, self.side == req.kind) {
            (Payload::Forward(table), true) => self.inner.forward(&apply(table)?)?,
            (Payload::Forward(table), false) => self.inner.forward(table)?,
            (Payload::Inverse { hdl, schema }, true) => {
                serialize_csv(&apply(&self.inner.inverse(hdl, schema)?)?)
            }
            (Payload::Inverse { hdl, schema }, false) => {
                serialize_csv(&self.inner.inverse(hdl, schema)?)
            }
        };
        Ok(respond(req.kind, artifact, self.id()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::roundtrip::prompt::{build_forward_prompt, build_inverse_prompt};

    #[test]
    fn deterministic_backend_is_referentially_transparent() {
        let t = bundled::table2();
        let b = Deterministic::default();
        let req = build_forward_prompt(&t).unwrap();
        let r1 = b.complete(&req).unwrap();
        assert_eq!(r1, b.complete(&req).unwrap());
        let inv = build_inverse_prompt(&t.name, &r1.artifact, &Schema::of(&t));
        let csv = b.complete(&inv).unwrap().artifact;
        assert!(csv.starts_with("rst_n,ready,valid_in,select,valid_out,data_out"));
    }

    #[test]
    fn faults_change_the_table() {
        let t = bundled::table1();
        let faults = [
            Fault::DropRow(1),
            Fault::AlterOutput { row: 0, result: 0 },
            Fault::AddSpuriousRow(2),
            Fault::SwapConditionValues {
                first: 1,
                second: 2,
                column: 1,
            },
            Fault::RenameValue { row: 1, column: 1 },
            Fault::MergeRows(1),
        ];
        for f in faults {
            assert_ne!(apply_fault(&t, &f).unwrap(), t, "{f:?}");
        }
        assert!(apply_fault(&t, &Fault::DropRow(9)).is_err());
        assert!(apply_fault(&t, &Fault::RenameValue { row: 1, column: 9 }).is_err());
    }

    #[test]
    fn merge_rows_keeps_shared_cells() {
        let t = bundled::table1();
        let m = apply_fault(&t, &Fault::MergeRows(1)).unwrap();
        assert_eq!(m.rows.len(), t.rows.len() - 1);
        assert_eq!(m.rows[1].inputs[0], CellValue::constant(1, 1));
        assert_eq!(m.rows[1].inputs[1], CellValue::DontCare);
    }

    #[test]
    fn drop_output_column_removes_port() {
        let t = bundled::table2();
        let d = apply_fault(&t, &Fault::DropOutputColumn("valid_out".into())).unwrap();
        assert_eq!(d.results, vec!["data_out".to_string()]);
        assert!(d.ports.get("valid_out").is_none());
        assert!(crate::model::validate_lct(&d).is_empty());
    }
}
