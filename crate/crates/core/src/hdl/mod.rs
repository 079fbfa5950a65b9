// SPDX-License-Identifier: Apache-2.0

//! Verilog front end and the deterministic inverse transform.

pub mod ast;
pub mod extract;
pub mod parser;

pub use ast::{HdlModule, Process, ProcessKind, Stmt};
pub use extract::{hdl_to_lct, ExtractError, ExtractOptions, Extraction, Schema};
pub use parser::{parse_hdl, parse_hdl_modules};
