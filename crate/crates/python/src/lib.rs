// SPDX-License-Identifier: Apache-2.0

//! Python bindings: tables, analysis, code generation, extraction,
//! comparison and the deterministic round trip.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use lct_core::analysis::shadowed_rows;
use lct_core::equivalence::EquivResult;
use lct_core::hdl::{parse_hdl_modules, ExtractOptions};
use lct_core::model::Lct;
use lct_core::roundtrip::{Deterministic, RoundTripConfig};
use lct_core::simulate::{eval_symbolic, run_trace, InitMode, Inputs, SeqState};
use lct_core::table_io::{serialize_csv, serialize_manifest};
use lct_core::{
    canonicalize, check_completeness, check_overlap, compare as core_compare, gen_unit_with,
    generate_fsm, hdl_to_lct, load_unit, parse_aliases, parse_unit, run_roundtrip, save_unit,
    BitVector, GenOptions, Schema, Style, DEFAULT_ENUM_LIMIT,
};

create_exception!(lct, LctError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    LctError::new_err(e.to_string())
}

fn style(name: &str) -> PyResult<Style> {
    match name {
        "if-chain" => Ok(Style::IfChain),
        "case-nested" => Ok(Style::CaseNested),
        other => Err(err(format!("unknown style `{other}`"))),
    }
}

/// A logic condition table.
#[pyclass(name = "Table", module = "lct", frozen)]
struct PyTable {
    inner: Lct,
}

impl PyTable {
    fn inputs(&self, values: &BTreeMap<String, u64>) -> PyResult<Inputs> {
        values
            .iter()
            .map(|(name, v)| {
                let port =
                    self.inner.ports.get(name).ok_or_else(|| {
                        err(format!("`{name}` is not a port of {}", self.inner.name))
                    })?;
                Ok((name.clone(), BitVector::truncating(port.width, *v)))
            })
            .collect()
    }
}

fn state_dict(state: &SeqState) -> BTreeMap<String, String> {
    state
        .registers
        .iter()
        .map(|(k, v)| (k.clone(), v.to_string()))
        .collect()
}

#[pymethods]
impl PyTable {
    /// Loads a unit from its manifest path.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        load_unit(&path)
            .map(|inner| Self { inner })
            .map_err(|e| err(format!("{}: {e}", path.display())))
    }

    /// Parses a unit from manifest and CSV text.
    #[staticmethod]
    fn parse(manifest: &str, csv: &str) -> PyResult<Self> {
        parse_unit(manifest, csv)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    /// A synthetic FSM table.
    #[staticmethod]
    #[pyo3(signature = (states, conds, outputs, seed = 0))]
    fn fsm(states: u64, conds: usize, outputs: usize, seed: u64) -> PyResult<Self> {
        generate_fsm(states, conds, outputs, seed)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn clocked(&self) -> bool {
        self.inner.clocking == lct_core::Clocking::Clocked
    }

    #[getter]
    fn conditions(&self) -> Vec<String> {
        self.inner.condition_names()
    }

    #[getter]
    fn results(&self) -> Vec<String> {
        self.inner.results.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.rows.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Table({:?}, {} rows, {})",
            self.inner.name,
            self.inner.rows.len(),
            self.inner.clocking
        )
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn to_manifest(&self) -> String {
        serialize_manifest(&self.inner)
    }

    fn to_csv(&self) -> String {
        serialize_csv(&self.inner)
    }

    /// Writes manifest and CSV into `dir`; returns the manifest path.
    fn save(&self, dir: PathBuf) -> PyResult<PathBuf> {
        save_unit(&self.inner, &dir).map_err(err)
    }

    fn canonical(&self) -> Self {
        Self {
            inner: canonicalize(&self.inner),
        }
    }

    /// Completeness and overlap findings as a dict.
    #[pyo3(signature = (enum_limit = DEFAULT_ENUM_LIMIT))]
    fn check<'py>(&self, py: Python<'py>, enum_limit: u64) -> PyResult<Bound<'py, PyDict>> {
        let t = &self.inner;
        let report = check_completeness(t, enum_limit).map_err(err)?;
        let overlap = check_overlap(t, enum_limit).map_err(err)?;
        let d = PyDict::new(py);
        let uncovered: Vec<BTreeMap<String, u64>> = report
            .uncovered
            .iter()
            .map(|a| a.0.iter().map(|(n, v)| (n.clone(), v.value())).collect())
            .collect();
        d.set_item("uncovered", uncovered)?;
        d.set_item("shadowed_rows", shadowed_rows(t, enum_limit).map_err(err)?)?;
        let conflicts: Vec<(usize, usize)> = overlap
            .conflicts
            .iter()
            .map(|c| (c.first, c.second))
            .collect();
        d.set_item("conflicts", conflicts)?;
        d.set_item("possibly_infeasible", report.possibly_infeasible)?;
        d.set_item("warnings", report.warnings)?;
        Ok(d)
    }

    /// Verilog for the unit.
    #[pyo3(signature = (style = "if-chain", async_reset = false))]
    fn gen(&self, style: &str, async_reset: bool) -> PyResult<String> {
        let opts = GenOptions {
            style: self::style(style)?,
            async_reset,
        };
        gen_unit_with(&self.inner, &opts)
            .map(|(text, _)| text)
            .map_err(err)
    }

    /// Stateless evaluation; symbolic results are returned as text.
    fn eval(&self, inputs: BTreeMap<String, u64>) -> PyResult<BTreeMap<String, String>> {
        let ev = eval_symbolic(&self.inner, &self.inputs(&inputs)?).map_err(err)?;
        Ok(ev
            .outputs
            .into_iter()
            .map(|(k, v)| (k, v.to_string()))
            .collect())
    }

    /// Runs one cycle per input dict from zeroed registers.
    fn trace(
        &self,
        stimulus: Vec<BTreeMap<String, u64>>,
    ) -> PyResult<Vec<BTreeMap<String, String>>> {
        let inputs = stimulus
            .iter()
            .map(|s| self.inputs(s))
            .collect::<PyResult<Vec<_>>>()?;
        let init = SeqState::initial(&self.inner, InitMode::Zero);
        let states = run_trace(&self.inner, &inputs, &init).map_err(err)?;
        Ok(states.iter().map(state_dict).collect())
    }
}

fn equiv_dict<'py>(py: Python<'py>, r: &EquivResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("verdict", r.verdict.to_string())?;
    d.set_item("equivalent", r.is_equivalent())?;
    let norms: Vec<String> = r.normalizations.iter().map(|n| format!("{n:?}")).collect();
    d.set_item("normalizations", norms)?;
    d.set_item("missing_results", r.missing_results.clone())?;
    match &r.counterexample {
        Some(cx) => {
            let c = PyDict::new(py);
            let point: BTreeMap<String, u64> = cx
                .assignment
                .0
                .iter()
                .map(|(n, v)| (n.clone(), v.value()))
                .collect();
            c.set_item("assignment", point)?;
            c.set_item("output", cx.output.clone())?;
            c.set_item("a", cx.a.to_string())?;
            c.set_item("b", cx.b.to_string())?;
            d.set_item("counterexample", c)?;
        }
        None => d.set_item("counterexample", py.None())?,
    }
    Ok(d)
}

/// Compares two tables under first-match semantics.
#[pyfunction]
#[pyo3(signature = (a, b, aliases = None, enum_limit = DEFAULT_ENUM_LIMIT))]
fn compare<'py>(
    py: Python<'py>,
    a: &PyTable,
    b: &PyTable,
    aliases: Option<&str>,
    enum_limit: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let aliases = match aliases {
        Some(text) => parse_aliases(text).map_err(err)?,
        None => Default::default(),
    };
    let r = core_compare(&a.inner, &b.inner, &aliases, enum_limit).map_err(err)?;
    equiv_dict(py, &r)
}

/// Recovers a table from Verilog, using `schema`'s columns.
#[pyfunction]
#[pyo3(signature = (hdl, schema, process = None))]
fn extract(hdl: &str, schema: &PyTable, process: Option<usize>) -> PyResult<PyTable> {
    let modules = parse_hdl_modules(hdl).map_err(err)?;
    let module = modules.first().ok_or_else(|| err("no module in source"))?;
    hdl_to_lct(
        module,
        &Schema::of(&schema.inner),
        &ExtractOptions { process },
    )
    .map(|x| PyTable { inner: x.lct })
    .map_err(err)
}

/// Deterministic forward and inverse loop; returns the label and verdict.
#[pyfunction]
#[pyo3(signature = (table, style = "if-chain", run_dir = None))]
fn roundtrip<'py>(
    py: Python<'py>,
    table: &PyTable,
    style: &str,
    run_dir: Option<PathBuf>,
) -> PyResult<Bound<'py, PyDict>> {
    let backend = Deterministic {
        options: GenOptions {
            style: self::style(style)?,
            async_reset: false,
        },
    };
    let mut cfg = RoundTripConfig::new();
    cfg.run_dir = run_dir;
    let report = run_roundtrip(&table.inner, &backend, &backend, &cfg).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("label", report.outcome.label.as_str())?;
    d.set_item("caveats", report.outcome.caveats.clone())?;
    match &report.equivalence {
        Some(r) => d.set_item("equivalence", equiv_dict(py, r)?)?,
        None => d.set_item("equivalence", py.None())?,
    }
    Ok(d)
}

#[pymodule]
fn lct(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LctError", m.py().get_type::<LctError>())?;
    m.add_class::<PyTable>()?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    m.add_function(wrap_pyfunction!(roundtrip, m)?)?;
    Ok(())
}
