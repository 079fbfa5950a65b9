// SPDX-License-Identifier: Apache-2.0

//! Reference units shipped with the toolkit: a 4-input multiplexer, a
//! registered 2-input multiplexer with backpressure, a four-state machine,
//! and the 2-input multiplexer used as the worked example in inverse prompts.

use crate::model::Lct;
use crate::table_io::parse_unit;

pub const TABLE1_MANIFEST: &str = include_str!("../data/mux4.lct");
pub const TABLE1_CSV: &str = include_str!("../data/mux4.csv");
pub const TABLE2_MANIFEST: &str = include_str!("../data/regmux2.lct");
pub const TABLE2_CSV: &str = include_str!("../data/regmux2.csv");
pub const TABLE3_MANIFEST: &str = include_str!("../data/fsm4.lct");
pub const TABLE3_CSV: &str = include_str!("../data/fsm4.csv");
pub const MUX2_MANIFEST: &str = include_str!("../data/mux2.lct");
pub const MUX2_CSV: &str = include_str!("../data/mux2.csv");
pub const MUX2_VERILOG: &str = include_str!("../data/mux2.v");

fn load(manifest: &str, csv: &str) -> Lct {
    parse_unit(manifest, csv).expect("bundled unit parses")
}

/// Combinational 4-input multiplexer with enable, 8-bit data.
pub fn table1() -> Lct {
    load(TABLE1_MANIFEST, TABLE1_CSV)
}

/// Registered 2-input multiplexer with valid and ready.
pub fn table2() -> Lct {
    load(TABLE2_MANIFEST, TABLE2_CSV)
}

/// Four-state machine; `next_state` feeds back into `state`.
pub fn table3() -> Lct {
    load(TABLE3_MANIFEST, TABLE3_CSV)
}

pub fn mux2() -> Lct {
    load(MUX2_MANIFEST, MUX2_CSV)
}

/// All bundled units by name.
pub fn all() -> Vec<Lct> {
    vec![table1(), table2(), table3(), mux2()]
}
