// SPDX-License-Identifier: Apache-2.0

//! The control space of a table: every combination of condition-column
//! values, packed into one integer with the first column most significant so
//! that numeric order is lexicographic order.

use std::fmt;

use thiserror::Error;

use crate::bitvec::{mask, BitVector};
use crate::model::{CaseRow, CellValue, Lct};

/// Default cap on enumerated assignments.
pub const DEFAULT_ENUM_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("control space of {bits} bits exceeds the enumeration limit of {limit} assignments")]
pub struct SpaceTooLarge {
    pub bits: u32,
    pub limit: u64,
}

/// One point of the control space, as (column name, value) in column order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<(String, BitVector)>);

impl Assignment {
    pub fn get(&self, name: &str) -> Option<BitVector> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(n, v)| format!("{n}={}", v.value()))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlSpace {
    pub names: Vec<String>,
    pub widths: Vec<u32>,
    shifts: Vec<u32>,
    pub bits: u32,
}

impl ControlSpace {
    pub fn of(table: &Lct) -> Self {
        let names = table.condition_names();
        let widths: Vec<u32> = (0..names.len()).map(|i| table.condition_width(i)).collect();
        let mut shifts = vec![0; widths.len()];
        let mut acc = 0u32;
        for i in (0..widths.len()).rev() {
            shifts[i] = acc;
            acc = acc.saturating_add(widths[i]);
        }
        Self {
            names,
            widths,
            shifts,
            bits: acc,
        }
    }

    /// Number of assignments, or `None` when it does not fit in 63 bits.
    pub fn size(&self) -> Option<u64> {
        (self.bits < 63).then(|| 1u64 << self.bits)
    }

    pub fn check(&self, limit: u64) -> Result<u64, SpaceTooLarge> {
        match self.size() {
            Some(n) if n <= limit => Ok(n),
            _ => Err(SpaceTooLarge {
                bits: self.bits,
                limit,
            }),
        }
    }

    pub fn column_value(&self, index: u64, col: usize) -> u64 {
        (index >> self.shifts[col]) & mask(self.widths[col])
    }

    pub fn decode(&self, index: u64) -> Vec<u64> {
        (0..self.widths.len())
            .map(|c| self.column_value(index, c))
            .collect()
    }

    pub fn encode(&self, values: &[u64]) -> u64 {
        values
            .iter()
            .zip(&self.shifts)
            .fold(0, |acc, (v, s)| acc | (v << s))
    }

    pub fn assignment(&self, index: u64) -> Assignment {
        Assignment(
            self.names
                .iter()
                .zip(&self.widths)
                .enumerate()
                .map(|(c, (n, w))| {
                    (
                        n.clone(),
                        BitVector::truncating(*w, self.column_value(index, c)),
                    )
                })
                .collect(),
        )
    }

    /// Packs a row's condition cells into a `(mask, value)` cube.
    pub fn cube(&self, row: &CaseRow) -> (u64, u64) {
        let mut m = 0u64;
        let mut v = 0u64;
        for (c, cell) in row.inputs.iter().enumerate() {
            if let CellValue::Constant(bv) = cell {
                let w = mask(self.widths[c]);
                m |= w << self.shifts[c];
                v |= (bv.value() & w) << self.shifts[c];
            }
        }
        (m, v)
    }
}

/// A table with its rows compiled to cubes for fast first-match lookup.
/// Only valid when the space fits in 63 bits.
#[derive(Debug, Clone)]
pub struct CompiledTable {
    pub space: ControlSpace,
    pub cubes: Vec<(u64, u64)>,
}

impl CompiledTable {
    pub fn new(table: &Lct, limit: u64) -> Result<Self, SpaceTooLarge> {
        let space = ControlSpace::of(table);
        space.check(limit)?;
        let cubes = table.rows.iter().map(|r| space.cube(r)).collect();
        Ok(Self { space, cubes })
    }

    pub fn first_match(&self, index: u64) -> Option<usize> {
        self.cubes.iter().position(|(m, v)| index & m == *v)
    }

    pub fn size(&self) -> u64 {
        self.space.size().expect("checked at construction")
    }
}

/// True when some assignment satisfies both rows' condition cells.
pub fn rows_overlap(a: &CaseRow, b: &CaseRow) -> bool {
    a.inputs.iter().zip(&b.inputs).all(|(x, y)| match (x, y) {
        (CellValue::Constant(p), CellValue::Constant(q)) => p.value() == q.value(),
        _ => true,
    })
}

/// True when every assignment matching `inner` also matches `outer`.
pub fn row_subsumes(outer: &CaseRow, inner: &CaseRow) -> bool {
    outer
        .inputs
        .iter()
        .zip(&inner.inputs)
        .all(|(o, i)| match (o, i) {
            (CellValue::DontCare, _) => true,
            (CellValue::Constant(p), CellValue::Constant(q)) => p.value() == q.value(),
            _ => false,
        })
}
