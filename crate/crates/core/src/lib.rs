// SPDX-License-Identifier: Apache-2.0

//! Logic condition tables: parsing, analysis, simulation, HDL generation and
//! extraction, semantic comparison, and the closed generate/reconstruct loop.

pub mod analysis;
pub mod bitvec;
pub mod bundled;
pub mod codegen;
pub mod equivalence;
pub mod expr;
pub mod hdl;
pub mod lexer;
pub mod model;
pub mod roundtrip;
pub mod simulate;
pub mod space;
pub mod table_io;

pub use analysis::{
    canonicalize, check_completeness, check_overlap, expand_dont_cares, generate_fsm,
};
pub use bitvec::{parse_literal, BitVector, LiteralError};
pub use codegen::{gen_structural, gen_unit, gen_unit_with, GenOptions, Style};
pub use equivalence::{compare, parse_aliases, textual_match, AliasMap, EquivResult, Verdict};
pub use hdl::{hdl_to_lct, parse_hdl, Schema};
pub use model::{
    validate_lct, CaseRow, CellValue, Clocking, ConditionHeader, ConnectivityTable, Direction,
    Feedback, Lct, Port, PortMap, Violation, ViolationKind,
};
pub use roundtrip::{classify_outcome, run_batch, run_roundtrip, Label, Outcome};
pub use simulate::{eval_comb, run_trace, step_clocked, SymValue};
pub use space::DEFAULT_ENUM_LIMIT;
pub use table_io::{
    load_unit, parse_connectivity, parse_unit, save_unit, serialize_unit, TableIoError,
};
